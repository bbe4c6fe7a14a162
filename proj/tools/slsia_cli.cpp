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
// slsia command-line driver.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "slsia/common/error.hpp"
#include "slsia/data/io.hpp"
#include "slsia/data/synthetic.hpp"
#include "slsia/experiment/ablation.hpp"
#include "slsia/experiment/config.hpp"
#include "slsia/experiment/runner.hpp"

using namespace slsia;
using namespace slsia::experiment;

namespace {

// Every field a flag can override; unset options leave the config alone.
struct Overrides {
  std::string config_path;
  std::optional<std::string> out, dataset, data_path, model, dp_level;
  std::optional<std::uint64_t> seed, data_seed, subject_seed;
  std::optional<std::size_t> workers, n_subjects, points, dim, min_points, clients, targets, rounds, epochs, batch,
      n_pre, tap, attack_epochs, subjects;
  std::optional<double> mean_range, rate, lr, momentum, dp_sigma, dp_clip, dp_delta;
  std::vector<std::string> methods, subject_ids;
  bool all_classes = false, partition_target = false, dp = false, no_dp = false, save_params = false,
       save_embeddings = false;
};

void add_data_flags(CLI::App* app, Overrides& o) {
  app->add_option("--n-subjects", o.n_subjects, "synthetic: number of subjects");
  app->add_option("--points-per-subject", o.points, "synthetic: points per subject");
  app->add_option("--dim", o.dim, "synthetic: feature dimension");
  app->add_option("--mean-range", o.mean_range, "synthetic: subject means drawn from [-r, r]^d");
  app->add_option("--data-seed", o.data_seed, "synthetic: generator seed");
}

void add_config_flags(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config_path, "experiment config (JSON)")->check(CLI::ExistingFile);
  app->add_option("-o,--out", o.out, "output directory");
  app->add_option("--seed", o.seed, "master seed");
  app->add_option("--workers", o.workers, "worker threads (0 = hardware)");
  app->add_option("--dataset", o.dataset, "synthetic, femnist or bundle")
      ->check(CLI::IsMember({"synthetic", "femnist", "bundle"}));
  app->add_option("--data-path", o.data_path, "LEAF json file/directory or dataset bundle");
  app->add_flag("--all-classes", o.all_classes, "femnist: keep letters as well as digits");
  app->add_option("--min-points", o.min_points, "drop subjects with fewer points");
  add_data_flags(app, o);
  app->add_option("--model", o.model, "mlp or cnn")->check(CLI::IsMember({"mlp", "cnn"}));
  app->add_option("--clients", o.clients, "FL clients n");
  app->add_option("--targets", o.targets, "clients holding target data m");
  app->add_option("--rounds", o.rounds, "FL rounds");
  app->add_option("--rate", o.rate, "fraction of target data on a target client");
  app->add_flag("--partition-target", o.partition_target, "split the FL share across target clients");
  app->add_option("--epochs", o.epochs, "local epochs");
  app->add_option("--batch", o.batch, "local batch size");
  app->add_option("--lr", o.lr, "local learning rate");
  app->add_option("--momentum", o.momentum, "local momentum");
  app->add_option("--n-pre", o.n_pre, "pre-trained models (even)");
  app->add_option("--method", o.methods, "conv, svm, avg_loss, min_loss_time or all");
  app->add_option("--tap", o.tap, "embedding layer index");
  app->add_option("--attack-epochs", o.attack_epochs, "conv attack epochs");
  app->add_flag("--dp", o.dp, "enable DP-SGD with default settings");
  app->add_flag("--no-dp", o.no_dp, "disable DP even if the config enables it");
  app->add_option("--dp-sigma", o.dp_sigma, "noise multiplier");
  app->add_option("--dp-clip", o.dp_clip, "clip bound");
  app->add_option("--dp-delta", o.dp_delta, "target delta");
  app->add_option("--dp-level", o.dp_level, "item or subject")->check(CLI::IsMember({"item", "subject"}));
  app->add_option("--subjects", o.subjects, "number of randomly chosen target subjects");
  app->add_option("--subject-ids", o.subject_ids, "explicit target subjects");
  app->add_option("--subject-seed", o.subject_seed, "seed for choosing target subjects");
  app->add_flag("--save-params", o.save_params, "write model snapshots");
  app->add_flag("--save-embeddings", o.save_embeddings, "write embedding CSVs");
}

template <typename T, typename U>
void set(const std::optional<T>& v, U& field) {
  if (v) field = static_cast<U>(*v);
}

void apply_synthetic(const Overrides& o, data::SyntheticParams& s) {
  set(o.n_subjects, s.n_subjects);
  set(o.points, s.points_per_subject);
  set(o.dim, s.dim);
  set(o.mean_range, s.mean_range);
  set(o.data_seed, s.seed);
}

ExperimentConfig build_config(const Overrides& o) {
  ExperimentConfig c;
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const std::exception& e) {
      throw ConfigError("cannot parse " + o.config_path + ": " + e.what());
    }
    c = config_from_json(j);
  }
  set(o.out, c.output_dir);
  if (o.seed) c.seed = *o.seed;
  set(o.workers, c.workers);
  if (o.dataset) c.dataset.kind = dataset_kind_from_string(*o.dataset);
  set(o.data_path, c.dataset.path);
  if (o.all_classes) c.dataset.digits_only = false;
  set(o.min_points, c.dataset.min_points);
  apply_synthetic(o, c.dataset.synthetic);
  if (o.model) c.model = *o.model;
  else if (o.dataset && c.dataset.kind == DatasetKind::Femnist) c.model = "cnn";
  set(o.clients, c.fl.n_clients);
  set(o.targets, c.fl.m_target);
  set(o.rounds, c.fl.rounds);
  set(o.rate, c.fl.target_rate);
  if (o.partition_target) c.fl.shared_target_data = false;
  set(o.epochs, c.fl.local.epochs);
  set(o.batch, c.fl.local.batch_size);
  set(o.lr, c.fl.local.lr);
  set(o.momentum, c.fl.local.momentum);
  set(o.n_pre, c.n_pre);
  if (!o.methods.empty()) c.attack.methods = o.methods;
  set(o.tap, c.attack.layer_tap);
  set(o.attack_epochs, c.attack.conv.epochs);
  const bool dp_flags = o.dp_sigma || o.dp_clip || o.dp_delta || o.dp_level;
  if ((o.dp || dp_flags) && !c.dp) c.dp = defense::DPConfig{};
  if (c.dp) {
    set(o.dp_sigma, c.dp->sigma);
    set(o.dp_clip, c.dp->clip);
    set(o.dp_delta, c.dp->delta);
    if (o.dp_level) c.dp->level = defense::dp_level_from_string(*o.dp_level);
    c.dp->expected_batch = c.fl.local.batch_size;
  }
  if (o.no_dp) c.dp.reset();
  if (o.subjects) {
    c.subjects.count = *o.subjects;
    c.subjects.explicit_ids.clear();
  }
  if (!o.subject_ids.empty()) c.subjects.explicit_ids = o.subject_ids;
  set(o.subject_seed, c.subjects.seed);
  if (o.save_params) c.save_params = true;
  if (o.save_embeddings) c.save_embeddings = true;
  return c;
}

std::string fixed(double v, int digits = 3) {
  char b[64];
  std::snprintf(b, sizeof b, "%.*f", digits, v);
  return b;
}

void progress(const SubjectResult& r, std::size_t done, std::size_t total) {
  std::cerr << '[' << done << '/' << total << "] " << r.subject;
  if (!r.ok) {
    std::cerr << " FAILED: " << r.error << '\n';
    return;
  }
  for (const auto& [name, m] : r.methods) std::cerr << ' ' << name << '=' << fixed(m.metrics.accuracy);
  std::cerr << " (" << fixed(r.seconds, 1) << "s)\n";
}

void print_summary(const RunManifest& m, std::ostream& os) {
  std::size_t ok = 0;
  double tr = 0, eps = 0;
  std::size_t ne = 0;
  for (const auto& r : m.results) {
    if (!r.ok) continue;
    ++ok;
    tr += r.target_train_accuracy;
    if (!r.privacy.empty()) {
      eps += r.avg_target_epsilon;
      ++ne;
    }
  }
  os << "subjects: " << ok << '/' << m.subjects.size() << " completed\n";
  const auto recs = m.records();
  if (recs.empty()) return;
  const auto s = eval::summarize_runs(recs);
  os << "method          accuracy precision recall   f1       runs  bin[0.9,1]\n";
  for (const auto& [name, ms] : s.methods) {
    char line[160];
    std::snprintf(line, sizeof line, "%-15s %-8.3f %-9.3f %-8.3f %-8.3f %-5zu %zu\n", name.c_str(), ms.accuracy,
                  ms.precision, ms.recall, ms.f1, ms.runs, ms.histogram[eval::kBins - 1]);
    os << line;
  }
  os << "mean target-client training accuracy: " << fixed(tr / static_cast<double>(ok)) << '\n';
  if (ne) os << "mean target-client epsilon: " << fixed(eps / static_cast<double>(ne), 2) << '\n';
}

int finish(const RunManifest& m) {
  print_summary(m, std::cout);
  return m.all_ok() ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Subject-level source inference experiments on simulated federated learning"};
  app.require_subcommand(1);

  Overrides o;
  std::string out_dir;
  auto* gen = app.add_subcommand("gen-data", "generate a synthetic dataset bundle");
  gen->add_option("-o,--out", out_dir, "bundle directory")->required();
  add_data_flags(gen, o);

  auto* run = app.add_subcommand("run", "attack a set of target subjects");
  add_config_flags(run, o);
  bool print_config = false, no_resume = false;
  run->add_flag("--print-config", print_config, "print the resolved config and exit");
  run->add_flag("--no-resume", no_resume, "ignore results in an existing manifest");

  auto* ablate = app.add_subcommand("ablate", "sweep one setting");
  add_config_flags(ablate, o);
  std::string axis;
  std::vector<double> values;
  ablate->add_option("--axis", axis, "rate, layer or epochs")->required()->check(CLI::IsMember({"rate", "layer", "epochs"}));
  ablate->add_option("--values", values, "axis values (default: the standard sweep)");
  ablate->add_flag("--no-resume", no_resume, "ignore results in existing manifests");

  std::string run_dir;
  auto* analyze = app.add_subcommand("analyze", "print a summary of a finished run");
  analyze->add_option("run_dir", run_dir, "run directory")->required()->check(CLI::ExistingDirectory);
  auto* report = app.add_subcommand("report", "rewrite CSV tables from a run manifest");
  report->add_option("run_dir", run_dir, "run directory")->required()->check(CLI::ExistingDirectory);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      data::SyntheticParams p;
      apply_synthetic(o, p);
      auto ds = data::gen_synthetic(p);
      data::save_dataset_bundle(out_dir, ds, {{"generator", data::to_json(p)}});
      std::cout << "wrote " << ds.num_subjects() << " subjects (" << ds.total_points() << " points) to " << out_dir << '\n';
      return 0;
    }
    if (run->parsed()) {
      auto cfg = build_config(o);
      if (print_config) {
        std::cout << to_json(cfg).dump(2) << '\n';
        return 0;
      }
      RunOptions opt;
      opt.resume = !no_resume;
      opt.on_subject = progress;
      std::vector<std::string> warnings;
      auto ds = load_dataset(cfg.dataset, &warnings);
      for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
      return finish(run_experiment(cfg, ds, opt));
    }
    if (ablate->parsed()) {
      auto cfg = build_config(o);
      RunOptions opt;
      opt.resume = !no_resume;
      opt.on_subject = progress;
      const auto ax = ablation_axis_from_string(axis);
      auto res = run_ablation(cfg, load_dataset(cfg.dataset), ax, values, opt);
      bool ok = true;
      for (const auto& p : res.points) {
        std::cout << "== " << to_string(ax) << '=' << p.label << '\n';
        print_summary(p.manifest, std::cout);
        ok = ok && p.manifest.all_ok();
      }
      return ok ? 0 : 3;
    }
    const auto m = read_manifest(std::filesystem::path(run_dir) / "manifest.json");
    if (analyze->parsed()) return finish(m);
    write_reports(run_dir, m);
    std::cout << "tables written under " << (std::filesystem::path(run_dir) / "tables").string() << '\n';
    return m.all_ok() ? 0 : 3;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
