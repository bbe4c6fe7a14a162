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
#include <cstddef>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "slsia/common/error.hpp"
#include "slsia/common/rng.hpp"
#include "slsia/nn/params.hpp"

namespace slsia::defense {

using nn::GradientRecord;

enum class DPLevel { Item, Subject };

inline const char* to_string(DPLevel l) { return l == DPLevel::Item ? "item" : "subject"; }

inline DPLevel dp_level_from_string(const std::string& s) {
  if (s == "item") return DPLevel::Item;
  if (s == "subject") return DPLevel::Subject;
  throw ConfigError("unknown DP level '" + s + "' (expected item or subject)");
}

struct DPConfig {
  double clip = 1.0;
  double sigma = 0.5;
  double delta = 1e-5;
  DPLevel level = DPLevel::Subject;
  std::size_t expected_batch = 12;

  void validate() const {
    if (!(clip > 0.0)) throw ConfigError("DP clip bound must be positive");
    if (!(sigma >= 0.0)) throw ConfigError("DP noise multiplier must be non-negative");
    if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("DP delta must lie in (0, 1)");
    if (expected_batch == 0) throw ConfigError("DP expected batch size must be positive");
  }
};

// Scales g by min(1, C/||g||) in place.
inline void clip_in_place(std::vector<double>& g, double norm, double C) {
  if (norm > C) {
    const double s = C / norm;
    for (double& v : g) v *= s;
  }
}

inline std::vector<GradientRecord> clip_gradients(std::vector<GradientRecord> records, double C) {
  if (!(C > 0.0)) throw ConfigError("clip bound must be positive");
  for (auto& r : records) {
    clip_in_place(r.values, nn::l2_norm(r.values), C);
    r.refresh_norm();
  }
  return records;
}

namespace detail {

// (sum of clipped + sigma*C*z) / count, with z drawn coordinate by coordinate
// after the sum is formed. Both DP steps go through here so they agree exactly
// when every subject contributes a single sample.
inline GradientRecord noisy_mean(const std::vector<std::vector<double>>& clipped, double C, double sigma, Rng& rng) {
  const std::size_t P = clipped.front().size();
  std::vector<double> sum(P, 0.0);
  for (const auto& g : clipped)
    for (std::size_t i = 0; i < P; ++i) sum[i] += g[i];
  if (sigma > 0.0) {
    std::normal_distribution<double> z(0.0, sigma * C);
    for (double& v : sum) v += z(rng);
  }
  const double n = static_cast<double>(clipped.size());
  for (double& v : sum) v /= n;
  return GradientRecord(std::move(sum));
}

}  // namespace detail

// Item-level DP-SGD step: clip every per-sample gradient, sum, add noise of
// std sigma*C, divide by the batch size.
inline GradientRecord dp_step_item(const std::vector<GradientRecord>& records, double C, double sigma, Rng& rng) {
  if (records.empty()) throw InputError("DP step on an empty batch");
  if (!(C > 0.0)) throw ConfigError("clip bound must be positive");
  std::vector<std::vector<double>> clipped;
  clipped.reserve(records.size());
  for (const auto& r : records) {
    clipped.push_back(r.values);
    clip_in_place(clipped.back(), nn::l2_norm(r.values), C);
  }
  return detail::noisy_mean(clipped, C, sigma, rng);
}

// Subject-level step by hierarchical averaging: mean per subject, clip each
// subject mean, average over the distinct subjects, noise scaled by 1/S.
// Subjects are visited in order of first appearance.
inline GradientRecord dp_step_subject(const std::vector<GradientRecord>& records, double C, double sigma, Rng& rng) {
  if (records.empty()) throw InputError("DP step on an empty batch");
  if (!(C > 0.0)) throw ConfigError("clip bound must be positive");
  std::unordered_map<std::string, std::size_t> slot;
  std::vector<std::vector<double>> sums;
  std::vector<std::size_t> counts;
  for (std::size_t k = 0; k < records.size(); ++k) {
    const auto& r = records[k];
    if (!r.subject) throw InputError("gradient record " + std::to_string(k) + " carries no subject id");
    auto [it, fresh] = slot.emplace(*r.subject, sums.size());
    if (fresh) {
      sums.push_back(r.values);
      counts.push_back(1);
    } else {
      auto& s = sums[it->second];
      for (std::size_t i = 0; i < s.size(); ++i) s[i] += r.values[i];
      ++counts[it->second];
    }
  }
  for (std::size_t s = 0; s < sums.size(); ++s) {
    if (counts[s] > 1) {
      const double n = static_cast<double>(counts[s]);
      for (double& v : sums[s]) v /= n;
    }
    clip_in_place(sums[s], nn::l2_norm(sums[s]), C);
  }
  return detail::noisy_mean(sums, C, sigma, rng);
}

inline GradientRecord dp_step(const DPConfig& cfg, const std::vector<GradientRecord>& records, Rng& rng) {
  return cfg.level == DPLevel::Item ? dp_step_item(records, cfg.clip, cfg.sigma, rng)
                                    : dp_step_subject(records, cfg.clip, cfg.sigma, rng);
}

}  // namespace slsia::defense
