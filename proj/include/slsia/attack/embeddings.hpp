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

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "slsia/common/error.hpp"
#include "slsia/common/format.hpp"
#include "slsia/fl/train.hpp"
#include "slsia/nn/network.hpp"

namespace slsia::attack {

struct EmbeddingExample {
  std::vector<double> vector;
  int label = 0;
  std::size_t model = 0;
  std::size_t input = 0;
};

// One flattened tap activation per point, eval mode.
inline std::vector<std::vector<double>> embed_points(const nn::NetworkSpec& spec, const nn::ParamSet& p,
                                                     std::size_t tap, std::span<const data::DataPoint> pts) {
  std::vector<std::vector<double>> rows;
  rows.reserve(pts.size());
  fl::for_each_chunk(pts, spec.input_shape(), [&](std::size_t, const nn::Tensor& x, const std::vector<int>&) {
    nn::Tensor e = nn::embed(spec, p, tap, x);
    for (std::size_t r = 0; r < e.dim(0); ++r) rows.emplace_back(e.row(r).begin(), e.row(r).end());
  });
  return rows;
}

// Model-major: every eval point through model 0, then model 1, ...
inline std::vector<EmbeddingExample> extract_embeddings(const nn::NetworkSpec& spec,
                                                        const std::vector<nn::ParamSet>& models,
                                                        const std::vector<int>& model_labels,
                                                        std::span<const data::DataPoint> eval, std::size_t tap) {
  if (eval.empty()) throw InputError("empty evaluation set");
  if (models.size() != model_labels.size()) throw ConfigError("one label per model required");
  std::vector<EmbeddingExample> out;
  out.reserve(models.size() * eval.size());
  for (std::size_t m = 0; m < models.size(); ++m) {
    auto rows = embed_points(spec, models[m], tap, eval);
    for (std::size_t i = 0; i < rows.size(); ++i) out.push_back({std::move(rows[i]), model_labels[m], m, i});
  }
  return out;
}

inline void write_embeddings_csv(const std::filesystem::path& path, const std::vector<EmbeddingExample>& ex,
                                 const std::string& source = "pretrain") {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw InputError("cannot write '" + path.string() + "'");
  const std::size_t d = ex.empty() ? 0 : ex.front().vector.size();
  os << "source,model,input,label";
  for (std::size_t i = 0; i < d; ++i) os << ",e" << i;
  os << '\n';
  for (const auto& e : ex) {
    os << source << ',' << e.model << ',' << e.input << ',' << e.label;
    for (double v : e.vector) os << ',' << format_double(v);
    os << '\n';
  }
}

}  // namespace slsia::attack
