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
#include <numeric>
#include <span>
#include <vector>

#include "slsia/common/error.hpp"
#include "slsia/fl/assign.hpp"
#include "slsia/fl/train.hpp"

namespace slsia::attack {

using fl::SourceList;

// losses[c][i]: loss of client c's model on eval point i.
using LossTable = std::vector<std::vector<double>>;

inline LossTable loss_table(const nn::NetworkSpec& spec, const std::vector<nn::ParamSet>& snapshots,
                            std::span<const data::DataPoint> eval) {
  LossTable t;
  for (const auto& s : snapshots) t.push_back(fl::losses_on(spec, s, eval));
  return t;
}

namespace detail {

inline void check_table(const LossTable& t, std::size_t m_known) {
  if (t.empty()) throw InputError("no client losses");
  if (m_known > t.size()) throw ConfigError("m_known exceeds the number of clients");
  for (const auto& r : t)
    if (r.size() != t.front().size() || r.empty()) throw InputError("loss table rows differ in length");
}

// Sets bits on the m best clients under `better`, ties to the lower index.
template <typename Better>
SourceList top_m(std::size_t n, std::size_t m, Better better) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), better);
  SourceList out(n, 0);
  for (std::size_t k = 0; k < m; ++k) out[idx[k]] = 1;
  return out;
}

}  // namespace detail

inline std::vector<double> mean_losses(const LossTable& t) {
  std::vector<double> m;
  for (const auto& r : t) m.push_back(std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(r.size()));
  return m;
}

inline SourceList avg_loss_from_table(const LossTable& t, std::size_t m_known) {
  detail::check_table(t, m_known);
  const auto mean = mean_losses(t);
  return detail::top_m(t.size(), m_known, [&](std::size_t a, std::size_t b) { return mean[a] < mean[b]; });
}

// Per eval point, one count to the client with the lowest loss (ties to the
// lower index).
inline std::vector<std::size_t> min_loss_counts(const LossTable& t) {
  std::vector<std::size_t> counts(t.size(), 0);
  for (std::size_t i = 0; i < t.front().size(); ++i) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < t.size(); ++c)
      if (t[c][i] < t[best][i]) best = c;
    ++counts[best];
  }
  return counts;
}

inline SourceList min_loss_time_from_table(const LossTable& t, std::size_t m_known) {
  detail::check_table(t, m_known);
  const auto counts = min_loss_counts(t);
  return detail::top_m(t.size(), m_known, [&](std::size_t a, std::size_t b) { return counts[a] > counts[b]; });
}

inline SourceList baseline_avg_loss(const nn::NetworkSpec& spec, const std::vector<nn::ParamSet>& snapshots,
                                    std::span<const data::DataPoint> eval, std::size_t m_known) {
  return avg_loss_from_table(loss_table(spec, snapshots, eval), m_known);
}

inline SourceList baseline_min_loss_time(const nn::NetworkSpec& spec, const std::vector<nn::ParamSet>& snapshots,
                                         std::span<const data::DataPoint> eval, std::size_t m_known) {
  return min_loss_time_from_table(loss_table(spec, snapshots, eval), m_known);
}

// Number of rounds whose summed loss is strictly below the previous round's.
inline std::size_t count_decreases(const std::vector<double>& summed) {
  if (summed.size() < 2) throw InputError("loss-across-rounds needs at least two rounds");
  std::size_t c = 0;
  for (std::size_t j = 1; j < summed.size(); ++j) c += summed[j] < summed[j - 1];
  return c;
}

inline std::size_t loss_across_rounds(const nn::NetworkSpec& spec, const std::vector<nn::ParamSet>& globals,
                                      std::span<const data::DataPoint> target_points) {
  if (globals.size() < 2) throw InputError("loss-across-rounds needs at least two rounds");
  std::vector<double> summed;
  for (const auto& g : globals) {
    auto l = fl::losses_on(spec, g, target_points);
    summed.push_back(std::accumulate(l.begin(), l.end(), 0.0));
  }
  return count_decreases(summed);
}

}  // namespace slsia::attack
