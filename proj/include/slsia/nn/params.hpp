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
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "slsia/common/error.hpp"
#include "slsia/common/rng.hpp"
#include "slsia/nn/layers.hpp"
#include "slsia/nn/tensor.hpp"

namespace slsia::nn {

// Trainable parameters as one contiguous vector, plus batch-norm running
// statistics kept apart so optimizers and DP never touch them.
class ParamSet {
 public:
  ParamSet() = default;
  ParamSet(std::vector<double> flat, std::vector<double> buffers)
      : flat_(std::move(flat)), buffers_(std::move(buffers)) {}

  static ParamSet zeros(const NetworkSpec& spec) {
    return ParamSet(std::vector<double>(spec.num_params(), 0.0), std::vector<double>(spec.num_buffers(), 0.0));
  }

  std::span<double> flat() noexcept { return flat_; }
  std::span<const double> flat() const noexcept { return flat_; }
  std::span<double> buffers() noexcept { return buffers_; }
  std::span<const double> buffers() const noexcept { return buffers_; }
  std::vector<double>& flat_storage() noexcept { return flat_; }
  std::vector<double>& buffer_storage() noexcept { return buffers_; }
  std::size_t size() const noexcept { return flat_.size(); }

  std::span<double> block(const ParamBlock& b) { return {flat_.data() + b.offset, b.size}; }
  std::span<const double> block(const ParamBlock& b) const { return {flat_.data() + b.offset, b.size}; }
  std::span<double> buffer(const ParamBlock& b) { return {buffers_.data() + b.offset, b.size}; }
  std::span<const double> buffer(const ParamBlock& b) const { return {buffers_.data() + b.offset, b.size}; }

  void check_matches(const NetworkSpec& spec) const {
    if (flat_.size() != spec.num_params() || buffers_.size() != spec.num_buffers()) {
      throw ConfigError("parameter set (" + std::to_string(flat_.size()) + " params, " +
                        std::to_string(buffers_.size()) + " buffers) does not match network (" +
                        std::to_string(spec.num_params()) + ", " + std::to_string(spec.num_buffers()) + ")");
    }
  }

  friend bool operator==(const ParamSet&, const ParamSet&) = default;

 private:
  std::vector<double> flat_;
  std::vector<double> buffers_;
};

struct NamedTensor {
  std::size_t layer = 0;
  std::string name;
  Tensor tensor;
};

// Per-layer view of the trainable parameters, in layout order.
inline std::vector<NamedTensor> structured(const NetworkSpec& spec, const ParamSet& params) {
  params.check_matches(spec);
  std::vector<NamedTensor> out;
  for (const auto& b : spec.param_blocks()) {
    auto src = params.block(b);
    out.push_back({b.layer, b.name, Tensor(b.shape, std::vector<double>(src.begin(), src.end()))});
  }
  return out;
}

inline ParamSet from_structured(const NetworkSpec& spec, const std::vector<NamedTensor>& tensors,
                                std::vector<double> buffers = {}) {
  const auto& blocks = spec.param_blocks();
  if (tensors.size() != blocks.size()) throw ConfigError("wrong number of parameter tensors");
  if (buffers.empty()) buffers.assign(spec.num_buffers(), 0.0);
  ParamSet p(std::vector<double>(spec.num_params()), std::move(buffers));
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (tensors[i].layer != blocks[i].layer || tensors[i].name != blocks[i].name || tensors[i].tensor.shape() != blocks[i].shape) {
      throw ConfigError("parameter tensor " + std::to_string(i) + " does not match layout");
    }
    auto dst = p.block(blocks[i]);
    std::copy(tensors[i].tensor.values().begin(), tensors[i].tensor.values().end(), dst.begin());
  }
  p.check_matches(spec);
  return p;
}

namespace detail {
inline std::size_t fan_in(const LayerSpec& l) {
  if (auto* a = std::get_if<Linear>(&l)) return a->in;
  if (auto* c = std::get_if<Conv2D>(&l)) return c->in_channels * c->kernel * c->kernel;
  if (auto* c = std::get_if<Conv1D>(&l)) return c->in_channels * c->kernel;
  return 1;
}
}  // namespace detail

// Weights and biases uniform in +-1/sqrt(fan_in); batch norm starts at
// gamma=1, beta=0, running mean 0 and running variance 1.
inline ParamSet init_params(const NetworkSpec& spec, std::uint64_t seed) {
  ParamSet p = ParamSet::zeros(spec);
  for (const auto& b : spec.param_blocks()) {
    const auto& layer = spec.layers()[b.layer];
    auto dst = p.block(b);
    if (std::holds_alternative<BatchNorm1D>(layer)) {
      std::fill(dst.begin(), dst.end(), b.name == "gamma" ? 1.0 : 0.0);
      continue;
    }
    const double bound = 1.0 / std::sqrt(static_cast<double>(detail::fan_in(layer)));
    Rng rng = make_rng(seed, "init:" + b.name, b.layer);
    std::uniform_real_distribution<double> u(-bound, bound);
    for (double& v : dst) v = u(rng);
  }
  for (const auto& b : spec.buffer_blocks()) {
    auto dst = p.buffer(b);
    std::fill(dst.begin(), dst.end(), b.name == "running_var" ? 1.0 : 0.0);
  }
  return p;
}

using SubjectId = std::string;

// Flat gradient with its cached L2 norm.
struct GradientRecord {
  std::vector<double> values;
  double norm = 0.0;
  std::optional<SubjectId> subject;

  GradientRecord() = default;
  explicit GradientRecord(std::vector<double> v, std::optional<SubjectId> s = std::nullopt)
      : values(std::move(v)), norm(l2_norm(values)), subject(std::move(s)) {}

  void refresh_norm() { norm = l2_norm(values); }
};

}  // namespace slsia::nn
