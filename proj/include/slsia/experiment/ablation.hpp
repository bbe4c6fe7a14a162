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

#include "slsia/common/format.hpp"
#include "slsia/eval/metrics.hpp"
#include "slsia/experiment/runner.hpp"

namespace slsia::experiment {

enum class AblationAxis { Rate, Layer, Epochs };

inline const char* to_string(AblationAxis a) {
  switch (a) {
    case AblationAxis::Rate: return "rate";
    case AblationAxis::Layer: return "layer";
    case AblationAxis::Epochs: return "epochs";
  }
  return "?";
}

inline AblationAxis ablation_axis_from_string(const std::string& s) {
  if (s == "rate") return AblationAxis::Rate;
  if (s == "layer") return AblationAxis::Layer;
  if (s == "epochs") return AblationAxis::Epochs;
  throw ConfigError("unknown ablation axis '" + s + "' (expected rate, layer or epochs)");
}

inline std::vector<double> default_axis_values(AblationAxis a, const ExperimentConfig& cfg) {
  switch (a) {
    case AblationAxis::Rate: return {0.5, 0.3, 0.1};
    case AblationAxis::Epochs: return {5, 10, 15};
    case AblationAxis::Layer: {
      std::vector<double> v;
      const std::size_t n = cfg.model == "cnn" ? 6 : 3;
      for (std::size_t i = 0; i < n; ++i) v.push_back(static_cast<double>(i));
      return v;
    }
  }
  return {};
}

struct AblationPoint {
  double value = 0.0;
  std::string label;
  RunManifest manifest;
};

struct AblationResult {
  AblationAxis axis = AblationAxis::Rate;
  std::vector<AblationPoint> points;
};

inline ExperimentConfig with_axis_value(ExperimentConfig cfg, AblationAxis a, double v) {
  switch (a) {
    case AblationAxis::Rate: cfg.fl.target_rate = v; break;
    case AblationAxis::Layer: cfg.attack.layer_tap = static_cast<std::size_t>(v); break;
    case AblationAxis::Epochs: cfg.fl.local.epochs = static_cast<std::size_t>(v); break;
  }
  return cfg;
}

// Sweeps one axis with everything else at the config's values. Each point
// runs under <output_dir>/<axis>_<value>; the combined table goes to
// <output_dir>/tables/ablation_<axis>.csv.
inline AblationResult run_ablation(const ExperimentConfig& cfg, const data::SubjectDataset& ds, AblationAxis axis,
                                   std::vector<double> values = {}, const RunOptions& opt = {}) {
  if (values.empty()) values = default_axis_values(axis, cfg);
  AblationResult res;
  res.axis = axis;
  namespace fs = std::filesystem;
  for (double v : values) {
    AblationPoint p;
    p.value = v;
    p.label = format_double(v);
    ExperimentConfig c = with_axis_value(cfg, axis, v);
    c.output_dir = (fs::path(cfg.output_dir) / (std::string(to_string(axis)) + "_" + p.label)).string();
    p.manifest = run_experiment(c, ds, opt);
    res.points.push_back(std::move(p));
  }
  if (opt.write_outputs) {
    fs::create_directories(fs::path(cfg.output_dir) / "tables");
    std::ofstream os(fs::path(cfg.output_dir) / "tables" / ("ablation_" + std::string(to_string(axis)) + ".csv"));
    os << "method,metric";
    for (const auto& p : res.points) os << ',' << to_string(axis) << '=' << p.label;
    os << '\n';
    std::vector<eval::RunSummary> sums;
    for (const auto& p : res.points) {
      auto recs = p.manifest.records();
      sums.push_back(recs.empty() ? eval::RunSummary{} : eval::summarize_runs(recs));
    }
    for (const auto& method : expand_methods(cfg.attack.methods))
      for (const char* metric : {"accuracy", "precision", "recall", "f1"}) {
        os << method << ',' << metric;
        for (const auto& s : sums) {
          os << ',';
          auto it = s.methods.find(method);
          if (it == s.methods.end()) continue;
          const auto& m = it->second;
          const std::string k = metric;
          os << format_double(k == "accuracy" ? m.accuracy : k == "precision" ? m.precision : k == "recall" ? m.recall : m.f1);
        }
        os << '\n';
      }
  }
  return res;
}

}  // namespace slsia::experiment
