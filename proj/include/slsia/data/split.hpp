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
#include <numeric>
#include <string>
#include <vector>

#include "slsia/common/error.hpp"
#include "slsia/common/rng.hpp"
#include "slsia/data/dataset.hpp"

namespace slsia::data {

// Target-subject shares: pretrain (server-side support models), eval
// (embedding queries), fl (handed to target clients).
struct SplitFractions {
  double pretrain = 0.50;
  double eval = 0.25;
  double fl = 0.25;
};

struct SubjectSplit {
  SubjectId subject;
  PointList pretrain;
  PointList eval;
  PointList fl;

  std::size_t total() const { return pretrain.size() + eval.size() + fl.size(); }
};

inline bool fractions_valid(const SplitFractions& f) {
  return f.pretrain >= 0 && f.eval >= 0 && f.fl >= 0 && std::abs(f.pretrain + f.eval + f.fl - 1.0) <= 1e-9;
}

// Largest-remainder apportionment of n items; ties go to the earlier share.
inline std::vector<std::size_t> apportion(std::size_t n, const std::vector<double>& fractions) {
  std::vector<std::size_t> sizes(fractions.size());
  std::vector<std::pair<double, std::size_t>> rem;
  std::size_t used = 0;
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    const double exact = fractions[i] * static_cast<double>(n);
    sizes[i] = static_cast<std::size_t>(std::floor(exact + 1e-9));
    used += sizes[i];
    rem.emplace_back(exact - static_cast<double>(sizes[i]), i);
  }
  std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; used < n; ++k, ++used) ++sizes[rem[k % rem.size()].second];
  return sizes;
}

inline SubjectSplit split_target_subject(const SubjectDataset& ds, const SubjectId& subject, const SplitFractions& f,
                                         std::uint64_t seed) {
  if (!fractions_valid(f)) throw ConfigError("split fractions must be non-negative and sum to 1");
  const PointList& pts = ds.points(subject);
  const auto sizes = apportion(pts.size(), {f.pretrain, f.eval, f.fl});
  const double fr[3] = {f.pretrain, f.eval, f.fl};
  for (int i = 0; i < 3; ++i)
    if (fr[i] > 0 && sizes[i] == 0) {
      throw InputError("subject '" + subject + "' has " + std::to_string(pts.size()) + " points, too few to split");
    }
  std::vector<std::size_t> order(pts.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng = make_rng(seed, "split:" + subject);
  std::shuffle(order.begin(), order.end(), rng);
  SubjectSplit s;
  s.subject = subject;
  std::size_t k = 0;
  for (std::size_t i = 0; i < sizes[0]; ++i) s.pretrain.push_back(pts[order[k++]]);
  for (std::size_t i = 0; i < sizes[1]; ++i) s.eval.push_back(pts[order[k++]]);
  for (std::size_t i = 0; i < sizes[2]; ++i) s.fl.push_back(pts[order[k++]]);
  return s;
}

}  // namespace slsia::data
