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

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "slsia/common/error.hpp"
#include "slsia/common/format.hpp"
#include "slsia/data/dataset.hpp"
#include "slsia/data/synthetic.hpp"

namespace slsia::data {

inline nlohmann::json to_json(const SyntheticParams& p) {
  return {{"n_subjects", p.n_subjects}, {"points_per_subject", p.points_per_subject},
          {"dim", p.dim},               {"min_sep", p.min_sep},
          {"mean_range", p.mean_range}, {"cov_scale", p.cov_scale},
          {"retry_budget", p.retry_budget}, {"seed", p.seed}};
}

inline SyntheticParams synthetic_params_from_json(const nlohmann::json& j) {
  SyntheticParams p;
  p.n_subjects = j.value("n_subjects", p.n_subjects);
  p.points_per_subject = j.value("points_per_subject", p.points_per_subject);
  p.dim = j.value("dim", p.dim);
  p.min_sep = j.value("min_sep", p.min_sep);
  p.mean_range = j.value("mean_range", p.mean_range);
  p.cov_scale = j.value("cov_scale", p.cov_scale);
  p.retry_budget = j.value("retry_budget", p.retry_budget);
  p.seed = j.value("seed", p.seed);
  return p;
}

// Bundle layout: <dir>/manifest.json and <dir>/points.csv with columns
// subject,label,f0..f{d-1}. `extra` is merged into the manifest.
inline void save_dataset_bundle(const std::filesystem::path& dir, const SubjectDataset& ds,
                                const nlohmann::json& extra = nlohmann::json::object()) {
  std::filesystem::create_directories(dir);
  std::ofstream csv(dir / "points.csv");
  if (!csv) throw InputError("cannot write '" + (dir / "points.csv").string() + "'");
  csv << "subject,label";
  for (std::size_t i = 0; i < ds.feature_size(); ++i) csv << ",f" << i;
  csv << '\n';
  for (const auto& [id, pts] : ds.subjects())
    for (const auto& p : pts) {
      csv << id << ',' << p.label;
      for (double v : p.features) csv << ',' << format_double(v);
      csv << '\n';
    }
  nlohmann::json m = extra;
  m["format"] = "slsia-dataset";
  m["schema_version"] = 1;
  m["feature_shape"] = ds.feature_shape();
  m["num_classes"] = ds.num_classes();
  m["num_subjects"] = ds.num_subjects();
  m["num_points"] = ds.total_points();
  m["points_file"] = "points.csv";
  std::ofstream(dir / "manifest.json") << m.dump(2) << '\n';
}

inline SubjectDataset load_dataset_bundle(const std::filesystem::path& dir, nlohmann::json* manifest_out = nullptr) {
  std::ifstream mf(dir / "manifest.json");
  if (!mf) throw InputError("no manifest.json in '" + dir.string() + "'");
  nlohmann::json m;
  try {
    m = nlohmann::json::parse(mf);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("manifest.json: ") + e.what());
  }
  if (m.value("format", "") != "slsia-dataset") throw ParseError("manifest.json is not a dataset bundle");
  SubjectDataset ds(m.at("feature_shape").get<nn::Shape>(), m.at("num_classes").get<std::size_t>());
  const std::string file = m.value("points_file", "points.csv");
  std::ifstream csv(dir / file);
  if (!csv) throw InputError("cannot open '" + (dir / file).string() + "'");
  std::string line;
  std::getline(csv, line);  // header
  std::size_t lineno = 1;
  while (std::getline(csv, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::string_view rest(line);
    auto next = [&]() {
      const auto pos = rest.find(',');
      std::string_view f = rest.substr(0, pos);
      rest = pos == std::string_view::npos ? std::string_view{} : rest.substr(pos + 1);
      return f;
    };
    auto bad = [&](const std::string& what) { return ParseError(file + ":" + std::to_string(lineno) + ": " + what); };
    DataPoint p;
    p.subject = std::string(next());
    auto lab = next();
    if (std::from_chars(lab.data(), lab.data() + lab.size(), p.label).ec != std::errc{}) throw bad("bad label");
    p.features.reserve(ds.feature_size());
    while (!rest.empty()) {
      auto f = next();
      double v = 0;
      if (std::from_chars(f.data(), f.data() + f.size(), v).ec != std::errc{}) throw bad("bad feature value");
      p.features.push_back(v);
    }
    if (p.features.size() != ds.feature_size()) throw bad("wrong feature count");
    ds.add(std::move(p));
  }
  if (ds.total_points() != m.value("num_points", ds.total_points())) throw ParseError("point count differs from manifest");
  if (manifest_out) *manifest_out = std::move(m);
  return ds;
}

}  // namespace slsia::data
