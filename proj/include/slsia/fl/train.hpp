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
#include <span>
#include <vector>

#include "slsia/common/error.hpp"
#include "slsia/common/rng.hpp"
#include "slsia/data/dataset.hpp"
#include "slsia/defense/dp.hpp"
#include "slsia/fl/config.hpp"
#include "slsia/nn/network.hpp"
#include "slsia/nn/optim.hpp"

namespace slsia::fl {

struct LocalTrainResult {
  nn::ParamSet params;
  std::uint64_t steps = 0;
  // Mean per-sample training loss of each epoch, measured at step time.
  std::vector<double> epoch_loss;
};

namespace detail {

inline nn::Tensor gather(std::span<const data::DataPoint> pts, const std::vector<std::size_t>& idx, std::size_t from,
                         std::size_t to, const nn::Shape& shape, std::vector<int>& labels) {
  std::vector<std::span<const double>> rows;
  labels.clear();
  for (std::size_t k = from; k < to; ++k) {
    rows.emplace_back(pts[idx[k]].features);
    labels.push_back(pts[idx[k]].label);
  }
  return nn::stack_rows(rows, shape);
}

}  // namespace detail

// Mini-batch SGD with momentum, reshuffling every epoch; the last short batch
// is kept. With cfg.dp set, every step is a DP step over per-sample gradients.
inline LocalTrainResult local_train(const nn::NetworkSpec& spec, const nn::ParamSet& params0,
                                    std::span<const data::DataPoint> pts, const LocalTrainConfig& cfg,
                                    std::uint64_t seed) {
  cfg.validate();
  params0.check_matches(spec);
  if (pts.empty()) throw InputError("local training on an empty dataset");
  LocalTrainResult out;
  out.params = params0;
  nn::OptimizerState opt(nn::SgdMomentum{cfg.lr, cfg.momentum}, spec.num_params());
  const nn::Shape& shape = spec.input_shape();
  std::vector<std::size_t> idx(pts.size());
  std::vector<int> labels;
  std::vector<double> losses;
  for (std::size_t e = 0; e < cfg.epochs; ++e) {
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Rng rng = make_rng(seed, "shuffle", e);
    std::shuffle(idx.begin(), idx.end(), rng);
    double total = 0.0;
    for (std::size_t from = 0; from < idx.size(); from += cfg.batch_size) {
      const std::size_t to = std::min(idx.size(), from + cfg.batch_size);
      nn::Tensor x = detail::gather(pts, idx, from, to, shape, labels);
      if (cfg.dp) {
        auto recs = nn::per_sample_gradients(spec, out.params, x, labels, nn::Mode::Train, &losses);
        for (std::size_t k = from; k < to; ++k) recs[k - from].subject = pts[idx[k]].subject;
        Rng noise = make_rng(seed, "dp-noise", out.steps);
        opt.step(out.params, defense::dp_step(*cfg.dp, recs, noise));
        for (double l : losses) total += l;
      } else {
        auto lg = nn::loss_and_grad(spec, out.params, x, labels, nn::Mode::Train);
        if (spec.has_batchnorm()) out.params.buffer_storage() = std::move(lg.running_stats);
        opt.step(out.params, lg.grad);
        total += lg.loss * static_cast<double>(to - from);
      }
      ++out.steps;
    }
    out.epoch_loss.push_back(total / static_cast<double>(pts.size()));
  }
  return out;
}

inline std::size_t steps_per_epoch(std::size_t n, std::size_t batch) { return (n + batch - 1) / batch; }

// Eval-mode helpers that bound memory by chunking.
inline constexpr std::size_t kEvalChunk = 256;

template <typename Fn>
void for_each_chunk(std::span<const data::DataPoint> pts, const nn::Shape& shape, Fn&& fn) {
  std::vector<std::size_t> idx(pts.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::vector<int> labels;
  for (std::size_t from = 0; from < pts.size(); from += kEvalChunk) {
    const std::size_t to = std::min(pts.size(), from + kEvalChunk);
    nn::Tensor x = detail::gather(pts, idx, from, to, shape, labels);
    fn(from, x, labels);
  }
}

inline std::vector<double> losses_on(const nn::NetworkSpec& spec, const nn::ParamSet& p,
                                     std::span<const data::DataPoint> pts) {
  std::vector<double> out;
  out.reserve(pts.size());
  for_each_chunk(pts, spec.input_shape(), [&](std::size_t, const nn::Tensor& x, const std::vector<int>& y) {
    auto l = nn::per_sample_losses(spec, p, x, y);
    out.insert(out.end(), l.begin(), l.end());
  });
  return out;
}

inline double accuracy_on(const nn::NetworkSpec& spec, const nn::ParamSet& p, std::span<const data::DataPoint> pts) {
  if (pts.empty()) return 0.0;
  std::size_t hit = 0;
  for_each_chunk(pts, spec.input_shape(), [&](std::size_t, const nn::Tensor& x, const std::vector<int>& y) {
    auto pred = nn::predict_labels(spec, p, x);
    for (std::size_t i = 0; i < pred.size(); ++i) hit += pred[i] == y[i];
  });
  return static_cast<double>(hit) / static_cast<double>(pts.size());
}

}  // namespace slsia::fl
