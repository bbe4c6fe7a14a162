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
#include <vector>

#include "slsia/common/error.hpp"
#include "slsia/nn/layers.hpp"

namespace slsia::nn {

// How ambiguous tap points resolve. Defaults: the MLP/CNN linear taps read
// the linear output before ReLU, and the CNN conv taps include pooling.
struct TapOptions {
  bool linear_post_relu = false;
  bool conv_include_pool = true;
};

// A network plus its logical embedding taps: taps[i] is the layer index whose
// output is "layer i" for attack purposes.
struct Architecture {
  std::string name;
  NetworkSpec spec;
  std::vector<std::size_t> taps;

  std::size_t tap_layer(std::size_t logical) const {
    if (logical >= taps.size()) {
      throw ConfigError(name + " has " + std::to_string(taps.size()) + " taps; tap " + std::to_string(logical) + " is invalid");
    }
    return taps[logical];
  }
  std::size_t tap_width(std::size_t logical) const { return shape_size(spec.layer_output_shape(tap_layer(logical))); }
};

// 60 -> 200 (ReLU) -> 2 task model for the Synthetic data.
inline Architecture make_mlp(std::size_t input_dim = 60, std::size_t hidden = 200, std::size_t classes = 2,
                             TapOptions taps = {}) {
  Architecture a;
  a.name = "mlp";
  a.spec = NetworkSpec::build({input_dim}, {Linear{input_dim, hidden}, ReLU{}, Linear{hidden, classes}, Softmax{}}, classes);
  a.taps = {taps.linear_post_relu ? 1u : 0u, 2, 3};
  return a;
}

// Two 5x5 conv blocks (32, 64 filters, each followed by ReLU and 2x2 max
// pool) and a 512-128-classes head. On 28x28 input the flattened conv output
// is 64*4*4 = 1024.
inline Architecture make_cnn(std::size_t side = 28, std::size_t classes = 10, TapOptions taps = {}) {
  Architecture a;
  a.name = "cnn";
  const std::size_t after = ((side - 4) / 2 - 4) / 2;
  const std::size_t flat = 64 * after * after;
  a.spec = NetworkSpec::build({1, side, side},
                              {Conv2D{1, 32, 5}, ReLU{}, MaxPool2D{2},          //  0..2
                               Conv2D{32, 64, 5}, ReLU{}, MaxPool2D{2},         //  3..5
                               Flatten{},                                        //  6
                               Linear{flat, 512}, ReLU{}, Linear{512, 128}, ReLU{}, //  7..10
                               Linear{128, classes}, Softmax{}},                //  11..12
                              classes);
  const std::size_t lin1 = taps.linear_post_relu ? 8 : 7;
  const std::size_t lin2 = taps.linear_post_relu ? 10 : 9;
  a.taps = {taps.conv_include_pool ? 2u : 1u, taps.conv_include_pool ? 6u : 4u, lin1, lin2, 11, 12};
  return a;
}

// Attack classifier over a 1-channel embedding sequence of width `dim`:
// conv(1->4,k3) -> pool3 -> BN -> conv(4->8,k3) -> pool3 -> BN -> flatten ->
// linear -> softmax.
inline NetworkSpec make_attack_conv(std::size_t dim, std::size_t kernel = 3) {
  if (dim < kernel) throw ConfigError("embedding width " + std::to_string(dim) + " too small for the attack network");
  const std::size_t l1 = (dim - kernel + 1) / 3;
  if (l1 < kernel) throw ConfigError("embedding width " + std::to_string(dim) + " too small for the attack network");
  const std::size_t l2 = (l1 - kernel + 1) / 3;
  if (l2 == 0) throw ConfigError("embedding width " + std::to_string(dim) + " too small for the attack network");
  return NetworkSpec::build({1, dim},
                            {Conv1D{1, 4, kernel}, MaxPool1D{3}, BatchNorm1D{4}, Conv1D{4, 8, kernel}, MaxPool1D{3},
                             BatchNorm1D{8}, Flatten{}, Linear{8 * l2, 2}, Softmax{}},
                            2);
}

}  // namespace slsia::nn
