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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "slsia/common/error.hpp"
#include "slsia/defense/dp.hpp"

namespace slsia::fl {

// Recipe shared by FL clients and the server's support models.
struct LocalTrainConfig {
  std::size_t epochs = 5;
  std::size_t batch_size = 12;
  double lr = 0.01;
  double momentum = 0.9;
  std::optional<defense::DPConfig> dp;

  void validate() const {
    if (batch_size == 0) throw ConfigError("batch size must be positive");
    if (!(lr > 0.0)) throw ConfigError("learning rate must be positive");
    if (!(momentum >= 0.0 && momentum < 1.0)) throw ConfigError("momentum must lie in [0, 1)");
    if (dp) dp->validate();
  }
};

struct FLConfig {
  std::size_t n_clients = 10;
  std::size_t m_target = 5;
  std::size_t rounds = 1;
  double target_rate = 0.5;
  // true: every target client holds the whole FL share of the target subject;
  // false: the share is partitioned among target clients.
  bool shared_target_data = true;
  LocalTrainConfig local;
  std::uint64_t seed = 0;
  // All clients draw from one stream instead of one per client index.
  bool shared_client_seed = false;
  // 0 = hardware concurrency. Results do not depend on it.
  std::size_t workers = 0;

  void validate() const {
    if (n_clients == 0) throw ConfigError("n_clients must be positive");
    if (m_target > n_clients) throw ConfigError("m_target exceeds n_clients");
    if (!(target_rate > 0.0 && target_rate <= 1.0)) throw ConfigError("target_rate must lie in (0, 1]");
    if (rounds == 0) throw ConfigError("rounds must be positive");
    local.validate();
  }
};

}  // namespace slsia::fl
