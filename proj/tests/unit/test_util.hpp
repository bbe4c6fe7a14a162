// Copyright 2026 The slsia Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "slsia/nn/network.hpp"
#include "slsia/nn/tensor.hpp"

namespace slsia::testing {

inline nn::Tensor random_tensor(nn::Shape shape, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  nn::Tensor t(std::move(shape));
  for (auto& v : t.values()) v = u(rng);
  return t;
}

inline std::vector<int> random_labels(std::size_t n, std::size_t k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> u(0, static_cast<int>(k) - 1);
  std::vector<int> y(n);
  for (auto& v : y) v = u(rng);
  return y;
}

// Largest per-coordinate relative error between the analytic gradient and a
// central difference of the mean loss. Coordinates with both magnitudes below
// `floor` are compared against the floor.
inline double max_fd_rel_error(const nn::NetworkSpec& spec, nn::ParamSet params, const nn::Tensor& x,
                               const std::vector<int>& y, nn::Mode mode, double h = 1e-5, double floor = 1e-6) {
  const auto analytic = nn::loss_and_grad(spec, params, x, y, mode).grad.values;
  double worst = 0.0;
  auto w = params.flat();
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double keep = w[i];
    w[i] = keep + h;
    const double lp = nn::loss_and_grad(spec, params, x, y, mode).loss;
    w[i] = keep - h;
    const double lm = nn::loss_and_grad(spec, params, x, y, mode).loss;
    w[i] = keep;
    const double numeric = (lp - lm) / (2 * h);
    const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), floor});
    worst = std::max(worst, std::abs(analytic[i] - numeric) / denom);
  }
  return worst;
}

}  // namespace slsia::testing
