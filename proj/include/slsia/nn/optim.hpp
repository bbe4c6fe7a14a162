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
#include <variant>
#include <vector>

#include "slsia/common/error.hpp"
#include "slsia/nn/params.hpp"

namespace slsia::nn {

// Heavy-ball momentum: v <- m*v + g; w <- w - lr*v.
struct SgdMomentum {
  double lr = 0.01;
  double momentum = 0.9;
};

// Adam with weight decay folded into the gradient as an L2 term.
struct Adam {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
};

using OptimizerKind = std::variant<SgdMomentum, Adam>;

class OptimizerState {
 public:
  OptimizerState(OptimizerKind kind, std::size_t num_params)
      : kind_(kind), first_(num_params, 0.0), second_(std::holds_alternative<Adam>(kind) ? num_params : 0, 0.0) {}

  const OptimizerKind& kind() const noexcept { return kind_; }
  std::uint64_t steps() const noexcept { return steps_; }
  const std::vector<double>& first_moment() const noexcept { return first_; }
  const std::vector<double>& second_moment() const noexcept { return second_; }

  void step(ParamSet& params, const GradientRecord& grad) {
    auto w = params.flat();
    if (w.size() != first_.size() || grad.values.size() != first_.size()) {
      throw ConfigError("optimizer buffers, parameters and gradient differ in length");
    }
    ++steps_;
    if (const auto* sgd = std::get_if<SgdMomentum>(&kind_)) {
      for (std::size_t i = 0; i < w.size(); ++i) {
        first_[i] = sgd->momentum * first_[i] + grad.values[i];
        w[i] -= sgd->lr * first_[i];
      }
      return;
    }
    const auto& a = std::get<Adam>(kind_);
    const double t = static_cast<double>(steps_);
    const double c1 = 1.0 - std::pow(a.beta1, t);
    const double c2 = 1.0 - std::pow(a.beta2, t);
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double g = grad.values[i] + a.weight_decay * w[i];
      first_[i] = a.beta1 * first_[i] + (1.0 - a.beta1) * g;
      second_[i] = a.beta2 * second_[i] + (1.0 - a.beta2) * g * g;
      w[i] -= a.lr * (first_[i] / c1) / (std::sqrt(second_[i] / c2) + a.eps);
    }
  }

 private:
  OptimizerKind kind_;
  std::vector<double> first_;
  std::vector<double> second_;
  std::uint64_t steps_ = 0;
};

}  // namespace slsia::nn
