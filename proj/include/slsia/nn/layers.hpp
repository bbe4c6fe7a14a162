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

#include <cstddef>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "slsia/common/error.hpp"
#include "slsia/nn/tensor.hpp"

namespace slsia::nn {

struct Linear {
  std::size_t in = 0;
  std::size_t out = 0;
};
// Convolutions are stride 1, no padding.
struct Conv2D {
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::size_t kernel = 0;
};
// Pooling stride equals the kernel; trailing remainders are dropped.
struct MaxPool2D {
  std::size_t kernel = 2;
};
struct Conv1D {
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::size_t kernel = 0;
};
struct MaxPool1D {
  std::size_t kernel = 3;
};
struct BatchNorm1D {
  std::size_t channels = 0;
  double momentum = 0.1;
  double eps = 1e-5;
};
struct ReLU {};
struct Flatten {};
struct Softmax {};

using LayerSpec = std::variant<Linear, Conv2D, MaxPool2D, Conv1D, MaxPool1D, BatchNorm1D, ReLU, Flatten, Softmax>;

inline std::string layer_kind(const LayerSpec& layer) {
  return std::visit(
      [](const auto& l) -> std::string {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, Linear>) return "linear";
        else if constexpr (std::is_same_v<T, Conv2D>) return "conv2d";
        else if constexpr (std::is_same_v<T, MaxPool2D>) return "maxpool2d";
        else if constexpr (std::is_same_v<T, Conv1D>) return "conv1d";
        else if constexpr (std::is_same_v<T, MaxPool1D>) return "maxpool1d";
        else if constexpr (std::is_same_v<T, BatchNorm1D>) return "batchnorm1d";
        else if constexpr (std::is_same_v<T, ReLU>) return "relu";
        else if constexpr (std::is_same_v<T, Flatten>) return "flatten";
        else return "softmax";
      },
      layer);
}

enum class LossKind { CrossEntropy };

// One named trainable tensor inside the flat parameter vector.
struct ParamBlock {
  std::size_t layer = 0;
  std::string name;
  Shape shape;
  std::size_t offset = 0;
  std::size_t size = 0;
};

// Validated architecture: layer list plus inferred per-layer shapes and the
// flat layout of trainable parameters and batch-norm running statistics.
class NetworkSpec {
 public:
  NetworkSpec() = default;

  static NetworkSpec build(Shape input_shape, std::vector<LayerSpec> layers, std::size_t num_classes) {
    NetworkSpec spec;
    spec.input_shape_ = std::move(input_shape);
    spec.layers_ = std::move(layers);
    spec.num_classes_ = num_classes;
    spec.infer();
    return spec;
  }

  const Shape& input_shape() const noexcept { return input_shape_; }
  const std::vector<LayerSpec>& layers() const noexcept { return layers_; }
  std::size_t num_layers() const noexcept { return layers_.size(); }
  std::size_t num_classes() const noexcept { return num_classes_; }
  LossKind loss() const noexcept { return LossKind::CrossEntropy; }

  const Shape& layer_input_shape(std::size_t i) const { return in_shapes_.at(i); }
  const Shape& layer_output_shape(std::size_t i) const { return out_shapes_.at(i); }

  const std::vector<ParamBlock>& param_blocks() const noexcept { return blocks_; }
  const std::vector<ParamBlock>& buffer_blocks() const noexcept { return buffers_; }
  std::size_t num_params() const noexcept { return num_params_; }
  std::size_t num_buffers() const noexcept { return num_buffers_; }

  // Index of the layer whose output feeds the cross-entropy (the logits).
  std::size_t logits_layer() const noexcept {
    return has_softmax() ? layers_.size() - 2 : layers_.size() - 1;
  }
  bool has_softmax() const noexcept { return !layers_.empty() && std::holds_alternative<Softmax>(layers_.back()); }
  bool has_batchnorm() const noexcept {
    for (const auto& l : layers_)
      if (std::holds_alternative<BatchNorm1D>(l)) return true;
    return false;
  }

  // First block index owned by a layer, or npos.
  std::size_t first_block_of(std::size_t layer) const noexcept { return first_block_[layer]; }
  std::size_t first_buffer_of(std::size_t layer) const noexcept { return first_buffer_[layer]; }
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  void fail(std::size_t i, const std::string& what) const {
    throw ConfigError("layer " + std::to_string(i) + " (" + layer_kind(layers_[i]) + "): " + what);
  }

  void add_block(std::size_t layer, std::string name, Shape shape) {
    const std::size_t n = shape_size(shape);
    if (first_block_[layer] == npos) first_block_[layer] = blocks_.size();
    blocks_.push_back({layer, std::move(name), std::move(shape), num_params_, n});
    num_params_ += n;
  }
  void add_buffer(std::size_t layer, std::string name, Shape shape) {
    const std::size_t n = shape_size(shape);
    if (first_buffer_[layer] == npos) first_buffer_[layer] = buffers_.size();
    buffers_.push_back({layer, std::move(name), std::move(shape), num_buffers_, n});
    num_buffers_ += n;
  }

  void infer() {
    if (layers_.empty()) throw ConfigError("network has no layers");
    if (input_shape_.empty() || shape_size(input_shape_) == 0) throw ConfigError("input shape must be non-empty");
    first_block_.assign(layers_.size(), npos);
    first_buffer_.assign(layers_.size(), npos);
    Shape cur = input_shape_;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      in_shapes_.push_back(cur);
      std::visit(
          [&](const auto& l) {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, Linear>) {
              if (cur.size() != 1 || cur[0] != l.in) fail(i, "expects input [" + std::to_string(l.in) + "], got " + shape_string(cur));
              if (l.out == 0) fail(i, "zero output width");
              add_block(i, "weight", {l.out, l.in});
              add_block(i, "bias", {l.out});
              cur = {l.out};
            } else if constexpr (std::is_same_v<T, Conv2D>) {
              if (cur.size() != 3 || cur[0] != l.in_channels) fail(i, "expects [C,H,W] with C=" + std::to_string(l.in_channels) + ", got " + shape_string(cur));
              if (l.kernel == 0 || cur[1] < l.kernel || cur[2] < l.kernel) fail(i, "kernel larger than input");
              add_block(i, "weight", {l.out_channels, l.in_channels, l.kernel, l.kernel});
              add_block(i, "bias", {l.out_channels});
              cur = {l.out_channels, cur[1] - l.kernel + 1, cur[2] - l.kernel + 1};
            } else if constexpr (std::is_same_v<T, MaxPool2D>) {
              if (cur.size() != 3) fail(i, "expects [C,H,W], got " + shape_string(cur));
              if (l.kernel == 0 || cur[1] < l.kernel || cur[2] < l.kernel) fail(i, "kernel larger than input");
              cur = {cur[0], cur[1] / l.kernel, cur[2] / l.kernel};
            } else if constexpr (std::is_same_v<T, Conv1D>) {
              if (cur.size() != 2 || cur[0] != l.in_channels) fail(i, "expects [C,L] with C=" + std::to_string(l.in_channels) + ", got " + shape_string(cur));
              if (l.kernel == 0 || cur[1] < l.kernel) fail(i, "kernel larger than input");
              add_block(i, "weight", {l.out_channels, l.in_channels, l.kernel});
              add_block(i, "bias", {l.out_channels});
              cur = {l.out_channels, cur[1] - l.kernel + 1};
            } else if constexpr (std::is_same_v<T, MaxPool1D>) {
              if (cur.size() != 2) fail(i, "expects [C,L], got " + shape_string(cur));
              if (l.kernel == 0 || cur[1] < l.kernel) fail(i, "kernel larger than input");
              cur = {cur[0], cur[1] / l.kernel};
            } else if constexpr (std::is_same_v<T, BatchNorm1D>) {
              if ((cur.size() != 1 && cur.size() != 2) || cur[0] != l.channels) fail(i, "expects [C] or [C,L] with C=" + std::to_string(l.channels) + ", got " + shape_string(cur));
              add_block(i, "gamma", {l.channels});
              add_block(i, "beta", {l.channels});
              add_buffer(i, "running_mean", {l.channels});
              add_buffer(i, "running_var", {l.channels});
            } else if constexpr (std::is_same_v<T, Flatten>) {
              cur = {shape_size(cur)};
            } else if constexpr (std::is_same_v<T, Softmax>) {
              if (i + 1 != layers_.size()) fail(i, "softmax is only allowed as the terminal layer");
              if (cur.size() != 1) fail(i, "expects a flat logit vector, got " + shape_string(cur));
            }
          },
          layers_[i]);
      out_shapes_.push_back(cur);
    }
    if (out_shapes_.back() != Shape{num_classes_}) {
      throw ConfigError("network output " + shape_string(out_shapes_.back()) + " does not match " +
                        std::to_string(num_classes_) + " classes");
    }
  }

  Shape input_shape_;
  std::vector<LayerSpec> layers_;
  std::size_t num_classes_ = 0;
  std::vector<Shape> in_shapes_, out_shapes_;
  std::vector<ParamBlock> blocks_, buffers_;
  std::vector<std::size_t> first_block_, first_buffer_;
  std::size_t num_params_ = 0, num_buffers_ = 0;
};

}  // namespace slsia::nn
