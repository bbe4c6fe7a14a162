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
#include <numeric>
#include <string>
#include <vector>

#include "slsia/common/error.hpp"
#include "slsia/common/rng.hpp"
#include "slsia/data/dataset.hpp"
#include "slsia/data/split.hpp"
#include "slsia/fl/config.hpp"
#include "slsia/fl/ledger.hpp"

namespace slsia::fl {

using data::DataPoint;
using data::PointList;

using SourceList = std::vector<int>;

struct ClientData {
  PointList points;
  bool is_target = false;
  std::size_t target_points = 0;
  std::vector<SubjectId> random_subjects;
};

struct ClientAssignment {
  SubjectId target_subject;
  std::vector<ClientData> clients;
  SourceList ground_truth;

  std::vector<std::size_t> sizes() const {
    std::vector<std::size_t> s;
    for (const auto& c : clients) s.push_back(c.points.size());
    return s;
  }
};

// Splits `total` over bins of the given capacities as evenly as capacities
// allow, visiting bins in order. Throws if capacity is insufficient.
inline std::vector<std::size_t> water_fill(std::size_t total, const std::vector<std::size_t>& caps) {
  std::vector<std::size_t> alloc(caps.size(), 0);
  if (std::accumulate(caps.begin(), caps.end(), std::size_t{0}) < total) throw AssignmentError("not enough points to allocate");
  std::size_t rem = total;
  while (rem > 0) {
    std::size_t open = 0;
    for (std::size_t i = 0; i < caps.size(); ++i) open += alloc[i] < caps[i];
    const std::size_t per = std::max<std::size_t>(1, rem / open);
    for (std::size_t i = 0; i < caps.size() && rem > 0; ++i) {
      const std::size_t give = std::min({per, caps[i] - alloc[i], rem});
      alloc[i] += give;
      rem -= give;
    }
  }
  return alloc;
}

// `total` points from fresh subjects, spread evenly over at least
// `min_subjects` of them. Used subjects are appended to `used`.
inline PointList draw_random_points(const data::SubjectDataset& ds, SubjectLedger& ledger, std::size_t total,
                                    std::size_t min_subjects, std::uint64_t seed, const std::string& purpose,
                                    std::vector<SubjectId>& used) {
  PointList out;
  if (total == 0) return out;
  std::vector<SubjectId> subs;
  std::vector<std::size_t> caps;
  std::size_t cap = 0;
  while (subs.size() < min_subjects || cap < total) {
    SubjectId s = ledger.draw_with_points(ds, 1, purpose);
    caps.push_back(ds.points(s).size());
    cap += caps.back();
    subs.push_back(std::move(s));
  }
  const auto alloc = water_fill(total, caps);
  for (std::size_t i = 0; i < subs.size(); ++i) {
    const auto& pts = ds.points(subs[i]);
    std::vector<std::size_t> idx(pts.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Rng rng = make_rng(seed, "points:" + subs[i]);
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t k = 0; k < alloc[i]; ++k) out.push_back(pts[idx[k]]);
    used.push_back(subs[i]);
  }
  return out;
}

inline std::size_t filler_for(std::size_t target_points, double rate) {
  return static_cast<std::size_t>(std::llround(static_cast<double>(target_points) * (1.0 - rate) / rate));
}

// Target clients get the FL share of the target subject plus filler from fresh
// subjects so the target makes up `target_rate` of their data. Non-target
// clients get the same size from at least two fresh subjects.
inline ClientAssignment build_assignments(const data::SubjectDataset& ds, const data::SubjectSplit& split,
                                          const FLConfig& cfg, SubjectLedger& ledger) {
  cfg.validate();
  if (cfg.m_target > 0 && split.fl.empty()) throw AssignmentError("target subject has no FL share");
  ClientAssignment a;
  a.target_subject = split.subject;
  a.clients.resize(cfg.n_clients);
  a.ground_truth.assign(cfg.n_clients, 0);

  std::vector<std::size_t> order(cfg.n_clients);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng = make_rng(cfg.seed, "target-positions");
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t i = 0; i < cfg.m_target; ++i) a.ground_truth[order[i]] = 1;

  std::vector<PointList> shares;
  if (cfg.m_target > 0) {
    if (cfg.shared_target_data) {
      shares.assign(cfg.m_target, split.fl);
    } else {
      const auto sizes = data::apportion(split.fl.size(), std::vector<double>(cfg.m_target, 1.0 / cfg.m_target));
      std::size_t k = 0;
      for (auto s : sizes) {
        if (s == 0) throw AssignmentError("FL share too small to partition among target clients");
        shares.emplace_back(split.fl.begin() + static_cast<std::ptrdiff_t>(k), split.fl.begin() + static_cast<std::ptrdiff_t>(k + s));
        k += s;
      }
    }
  }
  const std::size_t ref_target = shares.empty() ? split.fl.size() : shares.front().size();
  const std::size_t client_size = ref_target + filler_for(ref_target, cfg.target_rate);

  std::size_t next_share = 0;
  for (std::size_t c = 0; c < cfg.n_clients; ++c) {
    auto& cl = a.clients[c];
    const std::string who = "client " + std::to_string(c);
    if (a.ground_truth[c]) {
      cl.is_target = true;
      cl.points = shares[next_share++];
      cl.target_points = cl.points.size();
      auto filler = draw_random_points(ds, ledger, filler_for(cl.target_points, cfg.target_rate), 1,
                                       derive_seed(cfg.seed, "filler", c), who + " filler", cl.random_subjects);
      cl.points.insert(cl.points.end(), filler.begin(), filler.end());
    } else {
      cl.points = draw_random_points(ds, ledger, client_size, 2, derive_seed(cfg.seed, "non-target", c), who,
                                     cl.random_subjects);
    }
  }
  return a;
}

}  // namespace slsia::fl
