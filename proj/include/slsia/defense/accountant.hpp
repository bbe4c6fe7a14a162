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
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "slsia/common/error.hpp"

namespace slsia::defense {

struct PrivacySpent {
  double epsilon = 0.0;
  double delta = 0.0;
  std::uint64_t steps = 0;
  double q = 0.0;
  double sigma = 0.0;
  int order = 0;  // RDP order attaining the minimum; 0 when not applicable

  bool infinite() const { return std::isinf(epsilon); }
};

inline constexpr int kMinOrder = 2;
inline constexpr int kMaxOrder = 256;
// A sparse tail past 256 so very large noise is not floored at ln(1/delta)/255.
inline constexpr int kTailOrders[] = {320, 384, 512, 768, 1024, 1536, 2048, 3072, 4096};

// RDP of one step of the Poisson-subsampled Gaussian mechanism at integer
// order alpha (binomial expansion of the privacy-loss moment).
inline double rdp_subsampled_gaussian(double q, double sigma, int alpha) {
  if (q == 0.0) return 0.0;
  if (q == 1.0) return alpha / (2.0 * sigma * sigma);
  const double lq = std::log(q), l1q = std::log1p(-q);
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(alpha) + 1);
  for (int k = 0; k <= alpha; ++k) {
    const double lbin = std::lgamma(alpha + 1.0) - std::lgamma(k + 1.0) - std::lgamma(alpha - k + 1.0);
    terms.push_back(lbin + k * lq + (alpha - k) * l1q + (static_cast<double>(k) * k - k) / (2.0 * sigma * sigma));
  }
  double mx = -std::numeric_limits<double>::infinity();
  for (double t : terms) mx = std::max(mx, t);
  double s = 0.0;
  for (double t : terms) s += std::exp(t - mx);
  return (mx + std::log(s)) / (alpha - 1.0);
}

// Composes `steps` subsampled Gaussian steps and converts to (epsilon, delta)
// by minimizing over integer orders 2..256 plus kTailOrders.
inline PrivacySpent account_epsilon(double q, double sigma, std::uint64_t steps, double delta) {
  if (!(q > 0.0 && q <= 1.0)) throw ConfigError("sampling rate must lie in (0, 1]");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
  if (!(sigma >= 0.0)) throw ConfigError("noise multiplier must be non-negative");
  PrivacySpent out{0.0, delta, steps, q, sigma, 0};
  if (sigma == 0.0) {
    out.epsilon = std::numeric_limits<double>::infinity();
    return out;
  }
  if (steps == 0) return out;
  out.epsilon = std::numeric_limits<double>::infinity();
  const double ld = std::log(1.0 / delta);
  auto consider = [&](int a) {
    const double eps = static_cast<double>(steps) * rdp_subsampled_gaussian(q, sigma, a) + ld / (a - 1.0);
    if (eps < out.epsilon) {
      out.epsilon = eps;
      out.order = a;
    }
  };
  for (int a = kMinOrder; a <= kMaxOrder; ++a) consider(a);
  for (int a : kTailOrders) consider(a);
  return out;
}

// Expected number of distinct subjects in a batch of `batch` points drawn
// without replacement from a dataset with the given per-subject counts.
inline double expected_distinct_subjects(const std::vector<std::size_t>& counts, std::size_t batch) {
  std::size_t n = 0;
  for (auto c : counts) n += c;
  if (batch >= n) return static_cast<double>(counts.size());
  // P(subject absent) = C(n - c, b) / C(n, b)
  auto lchoose = [](double a, double b) { return std::lgamma(a + 1) - std::lgamma(b + 1) - std::lgamma(a - b + 1); };
  double e = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    const double absent = (n - c >= batch) ? std::exp(lchoose(double(n - c), double(batch)) - lchoose(double(n), double(batch))) : 0.0;
    e += 1.0 - absent;
  }
  return e;
}

}  // namespace slsia::defense
