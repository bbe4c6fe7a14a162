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

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "slsia/fl/assign.hpp"
#include "slsia/fl/fedavg.hpp"
#include "slsia/nn/serialize.hpp"

namespace slsia::fl {

inline nlohmann::json assignment_json(const ClientAssignment& a) {
  nlohmann::json clients = nlohmann::json::array();
  for (std::size_t c = 0; c < a.clients.size(); ++c) {
    const auto& cl = a.clients[c];
    clients.push_back({{"index", c},
                       {"is_target", cl.is_target},
                       {"size", cl.points.size()},
                       {"target_points", cl.target_points},
                       {"random_subjects", cl.random_subjects}});
  }
  return {{"target_subject", a.target_subject}, {"ground_truth", a.ground_truth}, {"clients", clients}};
}

// Writes params/global_r<j>.bin, params/client<c>_r<j>.bin and manifest.json
// under `dir`. Returns the manifest.
inline nlohmann::json save_round_artifacts(const std::filesystem::path& dir, const nn::NetworkSpec& spec,
                                           const ClientAssignment& a, const std::vector<RoundResult>& rounds) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "params");
  nlohmann::json m;
  m["assignment"] = assignment_json(a);
  nlohmann::json rs = nlohmann::json::array();
  for (std::size_t j = 0; j < rounds.size(); ++j) {
    nlohmann::json r;
    const std::string g = "params/global_r" + std::to_string(j) + ".bin";
    nn::save_params(dir / g, spec, rounds[j].global);
    r["global"] = g;
    r["clients"] = nlohmann::json::array();
    for (std::size_t c = 0; c < rounds[j].locals.size(); ++c) {
      const std::string f = "params/client" + std::to_string(c) + "_r" + std::to_string(j) + ".bin";
      nn::save_params(dir / f, spec, rounds[j].locals[c].params);
      r["clients"].push_back({{"params", f}, {"steps", rounds[j].locals[c].steps}});
    }
    rs.push_back(std::move(r));
  }
  m["rounds"] = std::move(rs);
  std::ofstream(dir / "manifest.json") << m.dump(2) << '\n';
  return m;
}

}  // namespace slsia::fl
