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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "slsia/attack/classifier.hpp"
#include "slsia/attack/pretrain.hpp"
#include "slsia/attack/svm.hpp"
#include "slsia/common/error.hpp"
#include "slsia/data/io.hpp"
#include "slsia/data/split.hpp"
#include "slsia/data/synthetic.hpp"
#include "slsia/defense/dp.hpp"
#include "slsia/fl/assign.hpp"
#include "slsia/fl/config.hpp"
#include "slsia/nn/architectures.hpp"

namespace slsia::experiment {

inline constexpr int kSchemaVersion = 1;

enum class DatasetKind { Synthetic, Femnist, Bundle };

struct DatasetConfig {
  DatasetKind kind = DatasetKind::Synthetic;
  data::SyntheticParams synthetic;
  std::string path;  // FEMNIST shard(s) or dataset bundle directory
  bool digits_only = true;
  std::size_t min_points = 0;
};

struct AttackConfig {
  // Subset of {conv, svm, avg_loss, min_loss_time}.
  std::vector<std::string> methods{"conv", "svm", "avg_loss", "min_loss_time"};
  std::size_t layer_tap = 0;  // logical tap of the task model
  attack::ConvAttackConfig conv;
  attack::SvmConfig svm;
};

struct SubjectSelection {
  std::vector<std::string> explicit_ids;
  std::size_t count = 50;
  std::uint64_t seed = 0;
};

struct ExperimentConfig {
  int schema_version = kSchemaVersion;
  DatasetConfig dataset;
  std::string model = "mlp";
  nn::TapOptions taps;
  fl::FLConfig fl;
  data::SplitFractions split;
  std::size_t n_pre = 20;
  AttackConfig attack;
  std::optional<defense::DPConfig> dp;
  SubjectSelection subjects;
  std::string output_dir = "runs/default";
  std::uint64_t seed = 0;
  std::size_t workers = 0;
  bool save_params = false;
  bool save_embeddings = false;
};

inline const std::vector<std::string>& known_methods() {
  static const std::vector<std::string> m{"conv", "svm", "avg_loss", "min_loss_time"};
  return m;
}

inline const char* to_string(DatasetKind k) {
  switch (k) {
    case DatasetKind::Synthetic: return "synthetic";
    case DatasetKind::Femnist: return "femnist";
    case DatasetKind::Bundle: return "bundle";
  }
  return "?";
}

inline DatasetKind dataset_kind_from_string(const std::string& s) {
  if (s == "synthetic") return DatasetKind::Synthetic;
  if (s == "femnist") return DatasetKind::Femnist;
  if (s == "bundle") return DatasetKind::Bundle;
  throw ConfigError("unknown dataset kind '" + s + "'");
}

inline std::vector<std::string> expand_methods(const std::vector<std::string>& in) {
  std::vector<std::string> out;
  for (const auto& m : in) {
    if (m == "all") return known_methods();
    out.push_back(m);
  }
  return out;
}

// Task model for the configured dataset.
inline nn::Architecture make_architecture(const ExperimentConfig& c, std::size_t feature_size, std::size_t num_classes) {
  if (c.model == "mlp") return nn::make_mlp(feature_size, 200, num_classes, c.taps);
  if (c.model == "cnn") {
    const auto side = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(feature_size))));
    if (side * side != feature_size) throw ConfigError("cnn needs square single-channel inputs");
    return nn::make_cnn(side, num_classes, c.taps);
  }
  throw ConfigError("unknown model '" + c.model + "'");
}

inline fl::LocalTrainConfig local_config(const ExperimentConfig& c, bool with_dp) {
  fl::LocalTrainConfig l = c.fl.local;
  l.dp = with_dp ? c.dp : std::nullopt;
  return l;
}

// ---- JSON ----

inline nlohmann::json to_json(const ExperimentConfig& c) {
  using nlohmann::json;
  json j;
  j["schema_version"] = c.schema_version;
  j["dataset"] = {{"kind", to_string(c.dataset.kind)},
                  {"synthetic", data::to_json(c.dataset.synthetic)},
                  {"path", c.dataset.path},
                  {"digits_only", c.dataset.digits_only},
                  {"min_points", c.dataset.min_points}};
  j["model"] = c.model;
  j["taps"] = {{"linear_post_relu", c.taps.linear_post_relu}, {"conv_include_pool", c.taps.conv_include_pool}};
  j["fl"] = {{"n_clients", c.fl.n_clients},       {"m_target", c.fl.m_target},
             {"rounds", c.fl.rounds},             {"target_rate", c.fl.target_rate},
             {"shared_target_data", c.fl.shared_target_data},
             {"local_epochs", c.fl.local.epochs}, {"batch_size", c.fl.local.batch_size},
             {"lr", c.fl.local.lr},               {"momentum", c.fl.local.momentum}};
  j["split"] = {{"pretrain", c.split.pretrain}, {"eval", c.split.eval}, {"fl", c.split.fl}};
  j["pretrain"] = {{"n_pre", c.n_pre}};
  j["attack"] = {{"methods", c.attack.methods},
                 {"layer_tap", c.attack.layer_tap},
                 {"conv",
                  {{"lr", c.attack.conv.lr},
                   {"weight_decay", c.attack.conv.weight_decay},
                   {"batch_size", c.attack.conv.batch_size},
                   {"epochs", c.attack.conv.epochs},
                   {"val_fraction", c.attack.conv.val_fraction},
                   {"kernel", c.attack.conv.kernel}}},
                 {"svm", {{"C", c.attack.svm.C}, {"tol", c.attack.svm.tol}, {"gamma", c.attack.svm.gamma}}}};
  if (c.dp) {
    j["dp"] = {{"clip", c.dp->clip},
               {"sigma", c.dp->sigma},
               {"delta", c.dp->delta},
               {"level", defense::to_string(c.dp->level)},
               {"expected_batch", c.dp->expected_batch}};
  } else {
    j["dp"] = nullptr;
  }
  j["subjects"] = {{"explicit", c.subjects.explicit_ids}, {"count", c.subjects.count}, {"seed", c.subjects.seed}};
  j["output_dir"] = c.output_dir;
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  j["save_params"] = c.save_params;
  j["save_embeddings"] = c.save_embeddings;
  return j;
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  try {
    c.schema_version = j.value("schema_version", kSchemaVersion);
    if (c.schema_version != kSchemaVersion) {
      throw ConfigError("unsupported config schema_version " + std::to_string(c.schema_version));
    }
    if (j.contains("dataset")) {
      const auto& d = j["dataset"];
      c.dataset.kind = dataset_kind_from_string(d.value("kind", "synthetic"));
      if (d.contains("synthetic")) c.dataset.synthetic = data::synthetic_params_from_json(d["synthetic"]);
      c.dataset.path = d.value("path", c.dataset.path);
      c.dataset.digits_only = d.value("digits_only", c.dataset.digits_only);
      c.dataset.min_points = d.value("min_points", c.dataset.min_points);
    }
    c.model = j.value("model", c.model);
    if (j.contains("taps")) {
      c.taps.linear_post_relu = j["taps"].value("linear_post_relu", c.taps.linear_post_relu);
      c.taps.conv_include_pool = j["taps"].value("conv_include_pool", c.taps.conv_include_pool);
    }
    if (j.contains("fl")) {
      const auto& f = j["fl"];
      c.fl.n_clients = f.value("n_clients", c.fl.n_clients);
      c.fl.m_target = f.value("m_target", c.fl.m_target);
      c.fl.rounds = f.value("rounds", c.fl.rounds);
      c.fl.target_rate = f.value("target_rate", c.fl.target_rate);
      c.fl.shared_target_data = f.value("shared_target_data", c.fl.shared_target_data);
      c.fl.local.epochs = f.value("local_epochs", c.fl.local.epochs);
      c.fl.local.batch_size = f.value("batch_size", c.fl.local.batch_size);
      c.fl.local.lr = f.value("lr", c.fl.local.lr);
      c.fl.local.momentum = f.value("momentum", c.fl.local.momentum);
    }
    if (j.contains("split")) {
      c.split.pretrain = j["split"].value("pretrain", c.split.pretrain);
      c.split.eval = j["split"].value("eval", c.split.eval);
      c.split.fl = j["split"].value("fl", c.split.fl);
    }
    if (j.contains("pretrain")) c.n_pre = j["pretrain"].value("n_pre", c.n_pre);
    if (j.contains("attack")) {
      const auto& a = j["attack"];
      if (a.contains("methods")) {
        if (a["methods"].is_string()) c.attack.methods = {a["methods"].get<std::string>()};
        else c.attack.methods = a["methods"].get<std::vector<std::string>>();
      }
      c.attack.layer_tap = a.value("layer_tap", c.attack.layer_tap);
      if (a.contains("conv")) {
        const auto& v = a["conv"];
        c.attack.conv.lr = v.value("lr", c.attack.conv.lr);
        c.attack.conv.weight_decay = v.value("weight_decay", c.attack.conv.weight_decay);
        c.attack.conv.batch_size = v.value("batch_size", c.attack.conv.batch_size);
        c.attack.conv.epochs = v.value("epochs", c.attack.conv.epochs);
        c.attack.conv.val_fraction = v.value("val_fraction", c.attack.conv.val_fraction);
        c.attack.conv.kernel = v.value("kernel", c.attack.conv.kernel);
      }
      if (a.contains("svm")) {
        c.attack.svm.C = a["svm"].value("C", c.attack.svm.C);
        c.attack.svm.tol = a["svm"].value("tol", c.attack.svm.tol);
        c.attack.svm.gamma = a["svm"].value("gamma", c.attack.svm.gamma);
      }
    }
    if (j.contains("dp") && !j["dp"].is_null()) {
      defense::DPConfig d;
      const auto& v = j["dp"];
      d.clip = v.value("clip", d.clip);
      d.sigma = v.value("sigma", d.sigma);
      d.delta = v.value("delta", d.delta);
      d.level = defense::dp_level_from_string(v.value("level", std::string(defense::to_string(d.level))));
      d.expected_batch = v.value("expected_batch", d.expected_batch);
      c.dp = d;
    }
    if (j.contains("subjects")) {
      const auto& s = j["subjects"];
      if (s.contains("explicit")) c.subjects.explicit_ids = s["explicit"].get<std::vector<std::string>>();
      c.subjects.count = s.value("count", c.subjects.count);
      c.subjects.seed = s.value("seed", c.subjects.seed);
    }
    c.output_dir = j.value("output_dir", c.output_dir);
    c.seed = j.value("seed", c.seed);
    c.workers = j.value("workers", c.workers);
    c.save_params = j.value("save_params", c.save_params);
    c.save_embeddings = j.value("save_embeddings", c.save_embeddings);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config: ") + e.what());
  }
  return c;
}

// ---- validation ----

namespace detail {

inline std::size_t ceil_div(std::size_t a, std::size_t b) { return b == 0 ? 0 : (a + b - 1) / b; }

}  // namespace detail

// Fresh subjects a run consumes per target subject, assuming every subject
// holds `points_per_subject` points.
inline std::size_t subject_demand(const ExperimentConfig& c, std::size_t points_per_subject) {
  const auto sizes = data::apportion(points_per_subject, {c.split.pretrain, c.split.eval, c.split.fl});
  const std::size_t p = sizes[0], fl_share = sizes[2];
  std::size_t per_target = fl_share;
  if (!c.fl.shared_target_data && c.fl.m_target > 0) per_target = fl_share / c.fl.m_target;
  const std::size_t filler = fl::filler_for(per_target, c.fl.target_rate);
  const std::size_t client_size = per_target + filler;
  std::size_t n = 1;
  n += c.fl.m_target * detail::ceil_div(filler, points_per_subject);
  n += (c.fl.n_clients - std::min(c.fl.n_clients, c.fl.m_target)) *
       std::max<std::size_t>(2, detail::ceil_div(client_size, points_per_subject));
  n += (c.n_pre / 2) * detail::ceil_div(p, points_per_subject);
  n += (c.n_pre / 2) * std::max<std::size_t>(2, detail::ceil_div(2 * p, points_per_subject));
  return n;
}

// All violations, empty when the config is usable.
inline std::vector<std::string> validate_config(const ExperimentConfig& c) {
  std::vector<std::string> diag;
  if (c.schema_version != kSchemaVersion) diag.push_back("unsupported schema_version");
  if (c.n_pre == 0 || c.n_pre % 2 != 0) diag.push_back("n_pre must be a positive even number");
  if (!data::fractions_valid(c.split)) diag.push_back("split fractions must be non-negative and sum to 1");
  if (c.fl.n_clients == 0) diag.push_back("n_clients must be positive");
  if (c.fl.m_target > c.fl.n_clients) diag.push_back("m_target exceeds n_clients");
  if (!(c.fl.target_rate > 0.0 && c.fl.target_rate <= 1.0)) diag.push_back("target_rate must lie in (0, 1]");
  if (c.fl.rounds == 0) diag.push_back("rounds must be positive");
  if (c.fl.local.batch_size == 0) diag.push_back("batch_size must be positive");
  if (!(c.fl.local.lr > 0.0)) diag.push_back("lr must be positive");
  if (!(c.fl.local.momentum >= 0.0 && c.fl.local.momentum < 1.0)) diag.push_back("momentum must lie in [0, 1)");
  if (c.model != "mlp" && c.model != "cnn") diag.push_back("model must be mlp or cnn");
  const bool image = c.dataset.kind == DatasetKind::Femnist;
  if (c.model == "cnn" && !image) diag.push_back("cnn pairs with femnist data");
  if (c.model == "mlp" && image) diag.push_back("mlp pairs with synthetic data");
  if (c.dataset.kind != DatasetKind::Synthetic && c.dataset.path.empty()) diag.push_back("dataset path is required");
  const std::size_t ntaps = c.model == "cnn" ? 6 : 3;
  if (c.attack.layer_tap >= ntaps) diag.push_back("layer_tap " + std::to_string(c.attack.layer_tap) + " is not a valid tap");
  const auto methods = expand_methods(c.attack.methods);
  if (methods.empty()) diag.push_back("no attack methods selected");
  for (const auto& m : methods)
    if (std::find(known_methods().begin(), known_methods().end(), m) == known_methods().end())
      diag.push_back("unknown attack method '" + m + "'");
  if (c.attack.conv.batch_size == 0 || c.attack.conv.epochs == 0) diag.push_back("conv attack batch/epochs must be positive");
  if (!(c.attack.svm.C > 0)) diag.push_back("svm C must be positive");
  if (c.dp) {
    if (!(c.dp->clip > 0.0)) diag.push_back("dp clip must be positive");
    if (!(c.dp->sigma >= 0.0)) diag.push_back("dp sigma must be non-negative");
    if (!(c.dp->delta > 0.0 && c.dp->delta < 1.0)) diag.push_back("dp delta must lie in (0, 1)");
  }
  if (c.dataset.kind == DatasetKind::Synthetic && diag.empty()) {
    const auto& s = c.dataset.synthetic;
    if (s.dim == 0) diag.push_back("synthetic dim must be positive");
    if (!(s.min_sep > 0)) diag.push_back("synthetic min_sep must be positive");
    const std::size_t need = subject_demand(c, s.points_per_subject);
    if (need > s.n_subjects) {
      diag.push_back("each target subject needs " + std::to_string(need) + " disjoint subjects but the dataset has " +
                     std::to_string(s.n_subjects));
    }
    const std::size_t want = c.subjects.explicit_ids.empty() ? c.subjects.count : c.subjects.explicit_ids.size();
    if (want > s.n_subjects) diag.push_back("more target subjects requested than exist");
  }
  return diag;
}

}  // namespace slsia::experiment
