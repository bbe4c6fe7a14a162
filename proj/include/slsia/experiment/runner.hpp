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
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "slsia/attack/baselines.hpp"
#include "slsia/attack/classifier.hpp"
#include "slsia/attack/embeddings.hpp"
#include "slsia/attack/pretrain.hpp"
#include "slsia/attack/score.hpp"
#include "slsia/common/format.hpp"
#include "slsia/common/rng.hpp"
#include "slsia/data/io.hpp"
#include "slsia/data/leaf.hpp"
#include "slsia/data/split.hpp"
#include "slsia/data/synthetic.hpp"
#include "slsia/defense/accountant.hpp"
#include "slsia/eval/distance.hpp"
#include "slsia/eval/metrics.hpp"
#include "slsia/experiment/config.hpp"
#include "slsia/fl/artifacts.hpp"
#include "slsia/fl/assign.hpp"
#include "slsia/fl/fedavg.hpp"
#include "slsia/fl/ledger.hpp"

namespace slsia::experiment {

struct MethodResult {
  fl::SourceList predicted;
  std::vector<std::size_t> scores;  // vote counts; empty for the loss baselines
  eval::MetricsRecord metrics;
};

struct ClientPrivacy {
  defense::PrivacySpent sample_level;   // q = batch / |D_i|
  defense::PrivacySpent subject_level;  // q = E[distinct subjects per batch] / subjects in D_i
};

struct SubjectResult {
  std::string subject;
  bool ok = false;
  std::string error;
  fl::SourceList ground_truth;
  std::map<std::string, MethodResult> methods;
  double target_train_accuracy = 0.0;     // target clients, on their own data
  double nontarget_train_accuracy = 0.0;  // non-target clients, on their own data
  double target_eval_accuracy = 0.0;      // target clients, on D_st^e
  double attack_val_accuracy = 0.0;       // conv attack, held-out embeddings
  std::vector<ClientPrivacy> privacy;     // per client, DP runs only
  double avg_target_epsilon = 0.0;
  double avg_target_epsilon_subject = 0.0;
  eval::DistanceReport distances;
  std::optional<std::size_t> loss_decreases;  // multi-round runs only
  std::size_t subjects_consumed = 0;
  double seconds = 0.0;
};

// ---- JSON ----

inline nlohmann::json to_json(const eval::MetricsRecord& m) {
  return {{"accuracy", m.accuracy}, {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
}

inline nlohmann::json to_json(const defense::PrivacySpent& p) {
  nlohmann::json j = {{"delta", p.delta}, {"steps", p.steps}, {"q", p.q}, {"sigma", p.sigma}, {"order", p.order}};
  if (std::isinf(p.epsilon)) j["epsilon"] = "inf";
  else j["epsilon"] = p.epsilon;
  return j;
}

inline defense::PrivacySpent privacy_from_json(const nlohmann::json& j) {
  defense::PrivacySpent p;
  p.epsilon = j["epsilon"].is_string() ? std::numeric_limits<double>::infinity() : j["epsilon"].get<double>();
  p.delta = j.at("delta").get<double>();
  p.steps = j.at("steps").get<std::uint64_t>();
  p.q = j.at("q").get<double>();
  p.sigma = j.at("sigma").get<double>();
  p.order = j.at("order").get<int>();
  return p;
}

inline nlohmann::json nan_safe(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }
inline double nan_from(const nlohmann::json& j) { return j.is_null() ? std::nan("") : j.get<double>(); }

inline nlohmann::json to_json(const SubjectResult& r) {
  nlohmann::json j;
  j["subject"] = r.subject;
  j["ok"] = r.ok;
  if (!r.ok) {
    j["error"] = r.error;
    return j;
  }
  j["ground_truth"] = r.ground_truth;
  for (const auto& [name, m] : r.methods) {
    j["methods"][name] = {{"predicted", m.predicted}, {"metrics", to_json(m.metrics)}};
    if (!m.scores.empty()) j["methods"][name]["scores"] = m.scores;
  }
  j["target_train_accuracy"] = r.target_train_accuracy;
  j["nontarget_train_accuracy"] = r.nontarget_train_accuracy;
  j["target_eval_accuracy"] = r.target_eval_accuracy;
  j["attack_val_accuracy"] = r.attack_val_accuracy;
  if (!r.privacy.empty()) {
    auto& p = j["privacy"];
    p["avg_target_epsilon"] = nan_safe(r.avg_target_epsilon);
    p["avg_target_epsilon_subject_rate"] = nan_safe(r.avg_target_epsilon_subject);
    for (const auto& c : r.privacy)
      p["clients"].push_back({{"sample_level", to_json(c.sample_level)}, {"subject_level", to_json(c.subject_level)}});
  }
  j["distances"] = {{"random_pretrained", nan_safe(r.distances.random_pretrained)},
                    {"target_pretrained", nan_safe(r.distances.target_pretrained)},
                    {"random_local", nan_safe(r.distances.random_local)},
                    {"target_local", nan_safe(r.distances.target_local)}};
  if (r.loss_decreases) j["loss_decreases"] = *r.loss_decreases;
  j["subjects_consumed"] = r.subjects_consumed;
  j["seconds"] = r.seconds;
  return j;
}

inline SubjectResult subject_result_from_json(const nlohmann::json& j) {
  SubjectResult r;
  r.subject = j.at("subject").get<std::string>();
  r.ok = j.at("ok").get<bool>();
  if (!r.ok) {
    r.error = j.value("error", "");
    return r;
  }
  r.ground_truth = j.at("ground_truth").get<fl::SourceList>();
  for (const auto& [name, m] : j.at("methods").items()) {
    MethodResult mr;
    mr.predicted = m.at("predicted").get<fl::SourceList>();
    if (m.contains("scores")) mr.scores = m["scores"].get<std::vector<std::size_t>>();
    const auto& mt = m.at("metrics");
    mr.metrics = {mt.at("accuracy"), mt.at("precision"), mt.at("recall"), mt.at("f1"), name, r.subject};
    r.methods[name] = std::move(mr);
  }
  r.target_train_accuracy = j.at("target_train_accuracy");
  r.nontarget_train_accuracy = j.at("nontarget_train_accuracy");
  r.target_eval_accuracy = j.at("target_eval_accuracy");
  r.attack_val_accuracy = j.at("attack_val_accuracy");
  if (j.contains("privacy")) {
    const auto& p = j["privacy"];
    r.avg_target_epsilon = nan_from(p.at("avg_target_epsilon"));
    r.avg_target_epsilon_subject = nan_from(p.at("avg_target_epsilon_subject_rate"));
    for (const auto& c : p.at("clients"))
      r.privacy.push_back({privacy_from_json(c.at("sample_level")), privacy_from_json(c.at("subject_level"))});
  }
  const auto& d = j.at("distances");
  r.distances.random_pretrained = nan_from(d.at("random_pretrained"));
  r.distances.target_pretrained = nan_from(d.at("target_pretrained"));
  r.distances.random_local = nan_from(d.at("random_local"));
  r.distances.target_local = nan_from(d.at("target_local"));
  if (j.contains("loss_decreases")) r.loss_decreases = j["loss_decreases"].get<std::size_t>();
  r.subjects_consumed = j.value("subjects_consumed", std::size_t{0});
  r.seconds = j.value("seconds", 0.0);
  return r;
}

// ---- data ----

inline data::SubjectDataset load_dataset(const DatasetConfig& d, std::vector<std::string>* warnings = nullptr) {
  data::SubjectDataset ds;
  switch (d.kind) {
    case DatasetKind::Synthetic:
      ds = data::gen_synthetic(d.synthetic);
      break;
    case DatasetKind::Femnist: {
      data::LeafLoadReport rep;
      ds = data::load_leaf_femnist(d.path, {d.digits_only}, &rep);
      if (warnings) warnings->insert(warnings->end(), rep.warnings.begin(), rep.warnings.end());
      break;
    }
    case DatasetKind::Bundle:
      ds = data::load_dataset_bundle(d.path);
      break;
  }
  return d.min_points > 0 ? data::filter_min_points(ds, d.min_points) : ds;
}

// Explicit ids, or `count` subjects sampled without replacement.
inline std::vector<std::string> select_subjects(const SubjectSelection& s, const data::SubjectDataset& ds) {
  if (!s.explicit_ids.empty()) {
    for (const auto& id : s.explicit_ids)
      if (!ds.contains(id)) throw ConfigError("requested subject '" + id + "' is not in the dataset");
    return s.explicit_ids;
  }
  auto ids = ds.subject_ids();
  Rng rng = make_rng(s.seed, "subject-selection");
  std::shuffle(ids.begin(), ids.end(), rng);
  if (s.count > ids.size()) throw ConfigError("more subjects requested than the dataset holds");
  ids.resize(s.count);
  return ids;
}

// ---- one subject ----

struct SubjectArtifacts {
  std::vector<attack::EmbeddingExample> pretrain_embeddings;
  std::vector<std::vector<std::vector<double>>> local_embeddings;
  fl::ClientAssignment assignment;
  std::vector<fl::RoundResult> rounds;
};

inline double mean_of(const std::vector<double>& v) {
  return v.empty() ? std::nan("") : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline std::vector<ClientPrivacy> account_clients(const fl::ClientAssignment& a, const fl::RoundResult& first,
                                                  std::size_t rounds, std::size_t batch, const defense::DPConfig& dp) {
  std::vector<ClientPrivacy> out;
  for (std::size_t c = 0; c < a.clients.size(); ++c) {
    const auto& pts = a.clients[c].points;
    const std::uint64_t steps = first.locals[c].steps * rounds;
    const double q = std::min(1.0, static_cast<double>(batch) / static_cast<double>(pts.size()));
    std::map<std::string, std::size_t> per;
    for (const auto& p : pts) ++per[p.subject];
    std::vector<std::size_t> counts;
    for (const auto& [_, n] : per) counts.push_back(n);
    const double qs = std::min(1.0, defense::expected_distinct_subjects(counts, batch) / static_cast<double>(counts.size()));
    out.push_back({defense::account_epsilon(q, dp.sigma, steps, dp.delta),
                   defense::account_epsilon(qs, dp.sigma, steps, dp.delta)});
  }
  return out;
}

inline SubjectResult run_subject(const ExperimentConfig& cfg, const data::SubjectDataset& ds,
                                 const nn::Architecture& arch, const std::string& subject,
                                 SubjectArtifacts* keep = nullptr) {
  const auto t0 = std::chrono::steady_clock::now();
  SubjectResult r;
  r.subject = subject;
  try {
    const std::uint64_t sseed = derive_seed(cfg.seed, "subject:" + subject);
    const auto methods = expand_methods(cfg.attack.methods);
    auto has = [&](const char* m) { return std::find(methods.begin(), methods.end(), m) != methods.end(); };
    const auto& spec = arch.spec;
    const std::size_t tap = arch.tap_layer(cfg.attack.layer_tap);

    const auto split = data::split_target_subject(ds, subject, cfg.split, sseed);
    fl::SubjectLedger ledger(ds.subject_ids(), {subject}, derive_seed(sseed, "ledger"));

    fl::FLConfig flc = cfg.fl;
    flc.seed = derive_seed(sseed, "fl");
    flc.workers = cfg.workers;
    flc.local = local_config(cfg, true);
    auto assignment = fl::build_assignments(ds, split, flc, ledger);
    r.ground_truth = assignment.ground_truth;

    attack::PretrainPlan plan;
    plan.n_pre = cfg.n_pre;
    plan.train = local_config(cfg, false);
    plan.workers = cfg.workers;
    const std::uint64_t pseed = derive_seed(sseed, "pretrain");
    auto pre = attack::build_pretrain_datasets(ds, split, plan, ledger, pseed);
    r.subjects_consumed = ledger.used() + 1;

    const nn::ParamSet w0 = nn::init_params(spec, derive_seed(sseed, "w0"));
    const bool need_embed = has("conv") || has("svm");
    std::vector<attack::EmbeddingExample> H;
    if (need_embed) {
      auto models = attack::pretrain_models(spec, w0, pre, plan, pseed);
      std::vector<int> labels;
      for (const auto& d : pre) labels.push_back(d.label);
      H = attack::extract_embeddings(spec, models, labels, split.eval, tap);
    }

    auto rounds = fl::run_rounds(spec, w0, assignment, flc);
    const auto& first = rounds.front();
    std::vector<nn::ParamSet> snaps;
    for (const auto& l : first.locals) snaps.push_back(l.params);

    std::vector<std::vector<std::vector<double>>> local_emb;
    if (need_embed)
      for (const auto& s : snaps) local_emb.push_back(attack::embed_points(spec, s, tap, split.eval));

    auto record = [&](const std::string& name, fl::SourceList pred, std::vector<std::size_t> scores) {
      MethodResult m;
      m.metrics = eval::compute_metrics(r.ground_truth, pred, name, subject);
      m.predicted = std::move(pred);
      m.scores = std::move(scores);
      r.methods[name] = std::move(m);
    };
    if (has("conv")) {
      auto clf = attack::train_attack_conv(H, derive_seed(sseed, "attack-conv"), cfg.attack.conv);
      r.attack_val_accuracy = clf.conv()->val_accuracy();
      auto o = attack::score_embeddings(clf, local_emb);
      record("conv", o.predicted, o.scores);
    }
    if (has("svm")) {
      auto clf = attack::train_attack_svm(H, cfg.attack.svm);
      auto o = attack::score_embeddings(clf, local_emb);
      record("svm", o.predicted, o.scores);
    }
    const std::size_t m_known = static_cast<std::size_t>(std::count(r.ground_truth.begin(), r.ground_truth.end(), 1));
    if (has("avg_loss") || has("min_loss_time")) {
      auto table = attack::loss_table(spec, snaps, split.eval);
      if (has("avg_loss")) record("avg_loss", attack::avg_loss_from_table(table, m_known), {});
      if (has("min_loss_time")) record("min_loss_time", attack::min_loss_time_from_table(table, m_known), {});
    }

    std::vector<double> tr, ntr, ev;
    for (std::size_t c = 0; c < assignment.clients.size(); ++c) {
      const auto& cl = assignment.clients[c];
      (cl.is_target ? tr : ntr).push_back(fl::accuracy_on(spec, snaps[c], cl.points));
      if (cl.is_target) ev.push_back(fl::accuracy_on(spec, snaps[c], split.eval));
    }
    r.target_train_accuracy = mean_of(tr);
    r.nontarget_train_accuracy = mean_of(ntr);
    r.target_eval_accuracy = mean_of(ev);

    if (cfg.dp) {
      r.privacy = account_clients(assignment, first, cfg.fl.rounds, cfg.fl.local.batch_size, *cfg.dp);
      std::vector<double> e, es;
      for (std::size_t c = 0; c < r.privacy.size(); ++c)
        if (assignment.clients[c].is_target) {
          e.push_back(r.privacy[c].sample_level.epsilon);
          es.push_back(r.privacy[c].subject_level.epsilon);
        }
      r.avg_target_epsilon = mean_of(e);
      r.avg_target_epsilon_subject = mean_of(es);
    }

    r.distances = eval::distance_report(assignment, pre, ds.points(subject));
    if (rounds.size() >= 2) {
      std::vector<nn::ParamSet> globals{w0};
      for (const auto& rr : rounds) globals.push_back(rr.global);
      r.loss_decreases = attack::loss_across_rounds(spec, globals, ds.points(subject));
    }
    r.ok = true;
    if (keep) {
      keep->pretrain_embeddings = std::move(H);
      keep->local_embeddings = std::move(local_emb);
      keep->assignment = std::move(assignment);
      keep->rounds = std::move(rounds);
    }
  } catch (const std::exception& e) {
    r.ok = false;
    r.error = e.what();
    r.methods.clear();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

// ---- whole run ----

struct RunManifest {
  nlohmann::json config;
  std::vector<std::string> subjects;
  std::vector<SubjectResult> results;

  bool all_ok() const {
    return results.size() == subjects.size() &&
           std::all_of(results.begin(), results.end(), [](const auto& r) { return r.ok; });
  }

  std::vector<eval::MetricsRecord> records() const {
    std::vector<eval::MetricsRecord> out;
    for (const auto& r : results)
      if (r.ok)
        for (const auto& [_, m] : r.methods) out.push_back(m.metrics);
    return out;
  }
};

inline nlohmann::json to_json(const RunManifest& m) {
  nlohmann::json j;
  j["format"] = "slsia-run";
  j["schema_version"] = kSchemaVersion;
  j["config"] = m.config;
  j["subjects"] = m.subjects;
  j["results"] = nlohmann::json::array();
  for (const auto& r : m.results) j["results"].push_back(to_json(r));
  return j;
}

inline RunManifest manifest_from_json(const nlohmann::json& j) {
  RunManifest m;
  m.config = j.at("config");
  m.subjects = j.at("subjects").get<std::vector<std::string>>();
  for (const auto& r : j.at("results")) m.results.push_back(subject_result_from_json(r));
  return m;
}

inline RunManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open manifest '" + path.string() + "'");
  try {
    return manifest_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("manifest '" + path.string() + "': " + e.what());
  }
}

inline void write_reports(const std::filesystem::path& dir, const RunManifest& m);

struct RunOptions {
  bool resume = true;
  bool write_outputs = true;
  std::function<void(const SubjectResult&, std::size_t done, std::size_t total)> on_subject;
};

// Runs every selected subject. With resume, results already present in an
// existing manifest with the same config are kept and not recomputed.
inline RunManifest run_experiment(const ExperimentConfig& cfg, const data::SubjectDataset& ds, const RunOptions& opt = {}) {
  namespace fs = std::filesystem;
  auto diag = validate_config(cfg);
  if (!diag.empty()) {
    std::string msg = "invalid config:";
    for (const auto& d : diag) msg += "\n  " + d;
    throw ConfigError(msg);
  }
  const auto arch = make_architecture(cfg, ds.feature_size(), ds.num_classes());
  if (arch.spec.input_shape() != ds.feature_shape() &&
      !(ds.feature_shape().size() == 1 && arch.spec.input_shape() == nn::Shape{ds.feature_size()})) {
    throw ConfigError("model input " + nn::shape_string(arch.spec.input_shape()) + " does not match data " +
                      nn::shape_string(ds.feature_shape()));
  }
  RunManifest m;
  m.config = to_json(cfg);
  m.subjects = select_subjects(cfg.subjects, ds);
  const fs::path out = cfg.output_dir;
  const fs::path mpath = out / "manifest.json";

  std::map<std::string, SubjectResult> done;
  if (opt.resume && opt.write_outputs && fs::exists(mpath)) {
    auto old = read_manifest(mpath);
    // Location and thread count do not change results.
    auto key = [](nlohmann::json j) {
      j.erase("output_dir");
      j.erase("workers");
      return j;
    };
    if (key(old.config) == key(m.config))
      for (auto& r : old.results) done[r.subject] = std::move(r);
  }
  if (opt.write_outputs) fs::create_directories(out);
  for (std::size_t i = 0; i < m.subjects.size(); ++i) {
    const auto& s = m.subjects[i];
    if (auto it = done.find(s); it != done.end()) {
      m.results.push_back(it->second);
    } else {
      SubjectArtifacts art;
      const bool keep = cfg.save_params || cfg.save_embeddings;
      m.results.push_back(run_subject(cfg, ds, arch, s, keep ? &art : nullptr));
      if (opt.write_outputs && m.results.back().ok) {
        if (cfg.save_embeddings) {
          attack::write_embeddings_csv(out / "embeddings" / (s + "_pretrain.csv"), art.pretrain_embeddings);
          std::vector<attack::EmbeddingExample> local;
          for (std::size_t c = 0; c < art.local_embeddings.size(); ++c)
            for (std::size_t k = 0; k < art.local_embeddings[c].size(); ++k)
              local.push_back({art.local_embeddings[c][k], art.assignment.ground_truth[c], c, k});
          attack::write_embeddings_csv(out / "embeddings" / (s + "_local.csv"), local, "client");
        }
        if (cfg.save_params) fl::save_round_artifacts(out / "params" / s, arch.spec, art.assignment, art.rounds);
      }
    }
    if (opt.write_outputs) {
      std::ofstream(mpath) << to_json(m).dump(2) << '\n';
    }
    if (opt.on_subject) opt.on_subject(m.results.back(), i + 1, m.subjects.size());
  }
  if (opt.write_outputs) write_reports(out, m);
  return m;
}

inline RunManifest run_experiment(const ExperimentConfig& cfg, const RunOptions& opt = {}) {
  return run_experiment(cfg, load_dataset(cfg.dataset), opt);
}

// ---- reports ----

inline void write_reports(const std::filesystem::path& dir, const RunManifest& m) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "tables");
  {
    std::ofstream os(dir / "metrics.csv");
    os << "subject,method,accuracy,precision,recall,f1\n";
    for (const auto& r : m.results)
      for (const auto& [name, mr] : r.methods)
        os << r.subject << ',' << name << ',' << format_double(mr.metrics.accuracy) << ','
           << format_double(mr.metrics.precision) << ',' << format_double(mr.metrics.recall) << ','
           << format_double(mr.metrics.f1) << '\n';
  }
  const auto recs = m.records();
  if (!recs.empty()) {
    const auto s = eval::summarize_runs(recs);
    std::ofstream os(dir / "tables" / "summary.csv");
    os << "method,runs,accuracy,precision,recall,f1\n";
    for (const auto& [name, ms] : s.methods)
      os << name << ',' << ms.runs << ',' << format_double(ms.accuracy) << ',' << format_double(ms.precision) << ','
         << format_double(ms.recall) << ',' << format_double(ms.f1) << '\n';
    std::ofstream hs(dir / "tables" / "histogram.csv");
    hs << "method";
    for (std::size_t b = 0; b < eval::kBins; ++b) hs << ",bin" << b;
    hs << '\n';
    for (const auto& [name, ms] : s.methods) {
      hs << name;
      for (auto c : ms.histogram) hs << ',' << c;
      hs << '\n';
    }
  }
  {
    std::ofstream os(dir / "tables" / "distance.csv");
    os << "subject,random_pretrained,target_pretrained,random_local,target_local,conv_accuracy\n";
    for (const auto& r : m.results) {
      if (!r.ok) continue;
      os << r.subject << ',' << format_double(r.distances.random_pretrained) << ','
         << format_double(r.distances.target_pretrained) << ',' << format_double(r.distances.random_local) << ','
         << format_double(r.distances.target_local) << ',';
      if (auto it = r.methods.find("conv"); it != r.methods.end()) os << format_double(it->second.metrics.accuracy);
      os << '\n';
    }
  }
  {
    std::ofstream os(dir / "tables" / "training.csv");
    os << "subject,target_train_accuracy,nontarget_train_accuracy,target_eval_accuracy,avg_target_epsilon,"
          "avg_target_epsilon_subject_rate\n";
    for (const auto& r : m.results) {
      if (!r.ok) continue;
      os << r.subject << ',' << format_double(r.target_train_accuracy) << ','
         << format_double(r.nontarget_train_accuracy) << ',' << format_double(r.target_eval_accuracy) << ',';
      if (!r.privacy.empty()) os << format_double(r.avg_target_epsilon) << ',' << format_double(r.avg_target_epsilon_subject);
      else os << ',';
      os << '\n';
    }
  }
  {
    std::ofstream os(dir / "tables" / "failures.csv");
    os << "subject,error\n";
    for (const auto& r : m.results)
      if (!r.ok) {
        std::string e = r.error;
        std::replace(e.begin(), e.end(), '\n', ' ');
        std::replace(e.begin(), e.end(), ',', ';');
        os << r.subject << ',' << e << '\n';
      }
  }
}

}  // namespace slsia::experiment
