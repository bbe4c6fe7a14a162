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
#include <cstdint>
#include <numeric>
#include <string>
#include <variant>
#include <vector>

#include "slsia/attack/embeddings.hpp"
#include "slsia/attack/svm.hpp"
#include "slsia/common/error.hpp"
#include "slsia/common/rng.hpp"
#include "slsia/nn/architectures.hpp"
#include "slsia/nn/network.hpp"
#include "slsia/nn/optim.hpp"

namespace slsia::attack {

struct ConvAttackConfig {
  double lr = 1e-4;
  double weight_decay = 0.1;
  std::size_t batch_size = 16;
  std::size_t epochs = 100;
  double val_fraction = 0.1;
  std::size_t kernel = 3;
};

// Smallest embedding width the conv attack network accepts; narrower
// embeddings are zero-padded on the right up to it.
inline std::size_t min_attack_width(std::size_t kernel = 3) {
  for (std::size_t d = kernel;; ++d) {
    try {
      nn::make_attack_conv(d, kernel);
      return d;
    } catch (const ConfigError&) {
    }
  }
}

class ConvAttack {
 public:
  ConvAttack() = default;
  ConvAttack(nn::NetworkSpec spec, nn::ParamSet params, std::size_t dim, double val_accuracy, std::size_t best_epoch)
      : spec_(std::move(spec)), params_(std::move(params)), dim_(dim), val_accuracy_(val_accuracy), best_epoch_(best_epoch) {}

  std::size_t dim() const noexcept { return dim_; }
  std::size_t padded_dim() const { return spec_.input_shape()[1]; }
  const nn::NetworkSpec& spec() const noexcept { return spec_; }
  const nn::ParamSet& params() const noexcept { return params_; }
  double val_accuracy() const noexcept { return val_accuracy_; }
  std::size_t best_epoch() const noexcept { return best_epoch_; }

  nn::Tensor to_input(const std::vector<const std::vector<double>*>& rows) const {
    const std::size_t w = padded_dim();
    nn::Tensor x({rows.size(), 1, w});
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r]->size() != dim_) throw InputError("attack input has wrong dimension");
      std::copy(rows[r]->begin(), rows[r]->end(), x.data() + r * w);
    }
    return x;
  }

  std::vector<int> predict(const std::vector<std::vector<double>>& X) const {
    std::vector<int> out;
    out.reserve(X.size());
    for (std::size_t from = 0; from < X.size(); from += 512) {
      std::vector<const std::vector<double>*> rows;
      for (std::size_t i = from; i < std::min(X.size(), from + 512); ++i) rows.push_back(&X[i]);
      auto p = nn::predict_labels(spec_, params_, to_input(rows));
      out.insert(out.end(), p.begin(), p.end());
    }
    return out;
  }

 private:
  nn::NetworkSpec spec_;
  nn::ParamSet params_;
  std::size_t dim_ = 0;
  double val_accuracy_ = 0.0;
  std::size_t best_epoch_ = 0;
};

enum class AttackKind { Conv, Svm };

inline const char* to_string(AttackKind k) { return k == AttackKind::Conv ? "conv" : "svm"; }

class AttackClassifier {
 public:
  AttackClassifier() = default;
  explicit AttackClassifier(ConvAttack c) : impl_(std::move(c)) {}
  explicit AttackClassifier(RbfSvm s) : impl_(std::move(s)) {}

  AttackKind kind() const { return std::holds_alternative<ConvAttack>(impl_) ? AttackKind::Conv : AttackKind::Svm; }
  std::size_t input_dim() const {
    return std::visit([](const auto& m) { return m.dim(); }, impl_);
  }
  const ConvAttack* conv() const { return std::get_if<ConvAttack>(&impl_); }
  const RbfSvm* svm() const { return std::get_if<RbfSvm>(&impl_); }

  std::vector<int> predict(const std::vector<std::vector<double>>& X) const {
    if (const auto* c = conv()) return c->predict(X);
    std::vector<int> out;
    out.reserve(X.size());
    for (const auto& x : X) out.push_back(svm()->predict(x));
    return out;
  }
  int predict_one(const std::vector<double>& x) const { return predict({x}).front(); }

 private:
  std::variant<ConvAttack, RbfSvm> impl_;
};

namespace detail {

inline void check_examples(const std::vector<EmbeddingExample>& ex) {
  if (ex.empty()) throw InputError("no embedding examples");
  bool pos = false, neg = false;
  const std::size_t d = ex.front().vector.size();
  for (const auto& e : ex) {
    if (e.vector.size() != d) throw InputError("embedding examples differ in dimension");
    (e.label == 1 ? pos : neg) = true;
  }
  if (!pos || !neg) throw InputError("attack training needs both in and out examples");
}

}  // namespace detail

// Adam-trained conv1d classifier. A seeded 90/10 split holds out validation
// examples; the epoch with the best validation accuracy (ties: lower
// validation loss) is kept.
inline AttackClassifier train_attack_conv(const std::vector<EmbeddingExample>& ex, std::uint64_t seed,
                                          const ConvAttackConfig& cfg = {}) {
  detail::check_examples(ex);
  const std::size_t d = ex.front().vector.size();
  const std::size_t width = std::max(d, min_attack_width(cfg.kernel));
  nn::NetworkSpec spec = nn::make_attack_conv(width, cfg.kernel);
  ConvAttack shell(spec, {}, d, 0, 0);

  std::vector<std::size_t> order(ex.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng split_rng = make_rng(seed, "attack-split");
  std::shuffle(order.begin(), order.end(), split_rng);
  const std::size_t nval = static_cast<std::size_t>(static_cast<double>(ex.size()) * cfg.val_fraction);
  std::vector<std::size_t> val(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(nval));
  std::vector<std::size_t> train(order.begin() + static_cast<std::ptrdiff_t>(nval), order.end());
  if (train.empty()) throw InputError("no attack training examples after the validation split");

  auto batch_of = [&](const std::vector<std::size_t>& idx, std::size_t from, std::size_t to, std::vector<int>& y) {
    std::vector<const std::vector<double>*> rows;
    y.clear();
    for (std::size_t k = from; k < to; ++k) {
      rows.push_back(&ex[idx[k]].vector);
      y.push_back(ex[idx[k]].label);
    }
    return shell.to_input(rows);
  };

  nn::ParamSet params = nn::init_params(spec, derive_seed(seed, "attack-init"));
  nn::OptimizerState opt(nn::Adam{cfg.lr, 0.9, 0.999, 1e-8, cfg.weight_decay}, spec.num_params());
  nn::ParamSet best = params;
  double best_acc = -1.0, best_loss = std::numeric_limits<double>::infinity();
  std::size_t best_epoch = 0;
  std::vector<int> y;
  nn::Tensor xval;
  std::vector<int> yval;
  if (!val.empty()) xval = batch_of(val, 0, val.size(), yval);

  for (std::size_t e = 0; e < cfg.epochs; ++e) {
    Rng rng = make_rng(seed, "attack-shuffle", e);
    std::shuffle(train.begin(), train.end(), rng);
    for (std::size_t from = 0; from < train.size(); from += cfg.batch_size) {
      const std::size_t to = std::min(train.size(), from + cfg.batch_size);
      nn::Tensor x = batch_of(train, from, to, y);
      auto lg = nn::loss_and_grad(spec, params, x, y, nn::Mode::Train);
      params.buffer_storage() = std::move(lg.running_stats);
      opt.step(params, lg.grad);
    }
    if (val.empty()) continue;
    auto pred = nn::predict_labels(spec, params, xval);
    std::size_t hit = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) hit += pred[i] == yval[i];
    const double acc = static_cast<double>(hit) / static_cast<double>(pred.size());
    double loss = 0;
    for (double l : nn::per_sample_losses(spec, params, xval, yval)) loss += l;
    if (acc > best_acc || (acc == best_acc && loss < best_loss)) {
      best_acc = acc;
      best_loss = loss;
      best = params;
      best_epoch = e;
    }
  }
  if (val.empty()) {
    best = params;
    best_epoch = cfg.epochs ? cfg.epochs - 1 : 0;
  }
  return AttackClassifier(ConvAttack(spec, std::move(best), d, best_acc, best_epoch));
}

inline AttackClassifier train_attack_svm(const std::vector<EmbeddingExample>& ex, const SvmConfig& cfg = {}) {
  detail::check_examples(ex);
  std::vector<std::vector<double>> X;
  std::vector<int> y;
  X.reserve(ex.size());
  for (const auto& e : ex) {
    X.push_back(e.vector);
    y.push_back(e.label);
  }
  return AttackClassifier(RbfSvm::train(X, y, cfg));
}

inline double training_accuracy(const AttackClassifier& clf, const std::vector<EmbeddingExample>& ex) {
  std::vector<std::vector<double>> X;
  for (const auto& e : ex) X.push_back(e.vector);
  auto p = clf.predict(X);
  std::size_t hit = 0;
  for (std::size_t i = 0; i < p.size(); ++i) hit += p[i] == ex[i].label;
  return ex.empty() ? 0.0 : static_cast<double>(hit) / static_cast<double>(ex.size());
}

}  // namespace slsia::attack
