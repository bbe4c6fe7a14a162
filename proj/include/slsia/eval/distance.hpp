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

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "slsia/attack/pretrain.hpp"
#include "slsia/common/error.hpp"
#include "slsia/data/dataset.hpp"
#include "slsia/fl/assign.hpp"

namespace slsia::eval {

// Mean L2 distance over all cross pairs of flattened features.
inline double avg_input_feature_distance(std::span<const data::DataPoint> a, std::span<const data::DataPoint> b) {
  if (a.empty() || b.empty()) throw InputError("distance needs non-empty point sets");
  const std::size_t d = a.front().features.size();
  double total = 0.0;
  for (const auto& p : a) {
    if (p.features.size() != d) throw InputError("points differ in feature size");
    for (const auto& q : b) {
      if (q.features.size() != d) throw InputError("points differ in feature size");
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        const double t = p.features[k] - q.features[k];
        s += t * t;
      }
      total += std::sqrt(s);
    }
  }
  return total / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

struct DistanceReport {
  double random_pretrained = 0.0;
  double target_pretrained = 0.0;
  double random_local = 0.0;
  double target_local = 0.0;
  std::string composition =
      "per model: mean distance from the target subject to each random subject in its dataset; then mean over the group";
};

namespace detail {

// Points of `subject` that are present in `pts`.
inline data::PointList points_of(std::span<const data::DataPoint> pts, const data::SubjectId& subject) {
  data::PointList out;
  for (const auto& p : pts)
    if (p.subject == subject) out.push_back(p);
  return out;
}

inline double group_mean(const std::vector<double>& v) {
  if (v.empty()) return std::nan("");
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double model_distance(std::span<const data::DataPoint> target, std::span<const data::DataPoint> pts,
                             const std::vector<data::SubjectId>& random_subjects) {
  std::vector<double> per;
  for (const auto& s : random_subjects) {
    auto rp = points_of(pts, s);
    if (!rp.empty()) per.push_back(avg_input_feature_distance(target, rp));
  }
  return group_mean(per);
}

}  // namespace detail

// Distance from the target subject's points to the random subjects used by
// each of the four model groups. Empty groups report NaN.
inline DistanceReport distance_report(const fl::ClientAssignment& a,
                                      const std::vector<attack::PretrainDataset>& pre,
                                      std::span<const data::DataPoint> target_points) {
  std::vector<double> rp, tp, rl, tl;
  for (const auto& d : pre) (d.label ? tp : rp).push_back(detail::model_distance(target_points, d.points, d.random_subjects));
  for (const auto& c : a.clients)
    (c.is_target ? tl : rl).push_back(detail::model_distance(target_points, c.points, c.random_subjects));
  DistanceReport r;
  r.random_pretrained = detail::group_mean(rp);
  r.target_pretrained = detail::group_mean(tp);
  r.random_local = detail::group_mean(rl);
  r.target_local = detail::group_mean(tl);
  return r;
}

}  // namespace slsia::eval
