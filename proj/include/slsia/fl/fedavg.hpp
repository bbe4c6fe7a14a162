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

#include <cstdint>
#include <utility>
#include <vector>

#include "slsia/common/error.hpp"
#include "slsia/common/parallel.hpp"
#include "slsia/fl/assign.hpp"
#include "slsia/fl/config.hpp"
#include "slsia/fl/train.hpp"
#include "slsia/nn/params.hpp"

namespace slsia::fl {

struct ClientUpdate {
  const nn::ParamSet* params = nullptr;
  std::size_t size = 0;
};

// Size-weighted mean of parameters and buffers, accumulated in list order.
inline nn::ParamSet fedavg(const std::vector<ClientUpdate>& updates) {
  if (updates.empty()) throw ConfigError("fedavg needs at least one update");
  const std::size_t P = updates.front().params->size();
  const std::size_t Q = updates.front().params->buffers().size();
  std::size_t total = 0;
  for (const auto& u : updates) {
    if (u.params->size() != P || u.params->buffers().size() != Q) throw ConfigError("fedavg updates differ in length");
    total += u.size;
  }
  if (total == 0) throw ConfigError("fedavg updates have zero total size");
  std::vector<double> w(P, 0.0), b(Q, 0.0);
  for (const auto& u : updates) {
    const double a = static_cast<double>(u.size) / static_cast<double>(total);
    auto src = u.params->flat();
    for (std::size_t i = 0; i < P; ++i) w[i] += a * src[i];
    auto bs = u.params->buffers();
    for (std::size_t i = 0; i < Q; ++i) b[i] += a * bs[i];
  }
  return nn::ParamSet(std::move(w), std::move(b));
}

inline nn::ParamSet fedavg(const std::vector<std::pair<nn::ParamSet, std::size_t>>& updates) {
  std::vector<ClientUpdate> u;
  for (const auto& [p, n] : updates) u.push_back({&p, n});
  return fedavg(u);
}

struct RoundResult {
  nn::ParamSet global;
  // Local snapshots before aggregation, one per client.
  std::vector<LocalTrainResult> locals;
};

inline std::uint64_t client_seed(std::uint64_t seed, std::size_t round, std::size_t client) {
  return derive_seed(derive_seed(seed, "round", round), "client", client);
}

// Every client trains from the same incoming global weights.
inline RoundResult run_round(const nn::NetworkSpec& spec, const nn::ParamSet& global, const ClientAssignment& a,
                             const FLConfig& cfg, std::size_t round = 0) {
  RoundResult r;
  r.locals.resize(a.clients.size());
  parallel_for(a.clients.size(), cfg.workers, [&](std::size_t c) {
    const std::uint64_t seed = client_seed(cfg.seed, round, cfg.shared_client_seed ? 0 : c);
    r.locals[c] = local_train(spec, global, a.clients[c].points, cfg.local, seed);
  });
  std::vector<ClientUpdate> ups;
  for (std::size_t c = 0; c < a.clients.size(); ++c) ups.push_back({&r.locals[c].params, a.clients[c].points.size()});
  r.global = fedavg(ups);
  return r;
}

// Runs cfg.rounds rounds and returns every round's result.
inline std::vector<RoundResult> run_rounds(const nn::NetworkSpec& spec, const nn::ParamSet& init,
                                           const ClientAssignment& a, const FLConfig& cfg) {
  std::vector<RoundResult> out;
  const nn::ParamSet* g = &init;
  for (std::size_t j = 0; j < cfg.rounds; ++j) {
    out.push_back(run_round(spec, *g, a, cfg, j));
    g = &out.back().global;
  }
  return out;
}

}  // namespace slsia::fl
