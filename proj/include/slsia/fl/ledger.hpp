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
#include <set>
#include <string>
#include <vector>

#include "slsia/common/error.hpp"
#include "slsia/common/rng.hpp"
#include "slsia/data/dataset.hpp"

namespace slsia::fl {

using data::SubjectId;

// Hands out subjects that have not been used anywhere else in a run. The pool
// order is a seeded shuffle, so draws are reproducible.
class SubjectLedger {
 public:
  SubjectLedger(std::vector<SubjectId> pool, const std::set<SubjectId>& excluded, std::uint64_t seed) {
    std::sort(pool.begin(), pool.end());
    for (auto& s : pool)
      if (!excluded.count(s)) pool_.push_back(std::move(s));
    Rng rng = make_rng(seed, "subject-ledger");
    std::shuffle(pool_.begin(), pool_.end(), rng);
  }

  std::size_t remaining() const noexcept { return pool_.size() - next_; }
  std::size_t used() const noexcept { return next_; }

  SubjectId draw(const std::string& purpose) { return draw(1, purpose).front(); }

  std::vector<SubjectId> draw(std::size_t n, const std::string& purpose) {
    if (n > remaining()) {
      throw AssignmentError(purpose + " needs " + std::to_string(n) + " fresh subjects but only " +
                            std::to_string(remaining()) + " remain (" + std::to_string(next_) + " already used)");
    }
    std::vector<SubjectId> out(pool_.begin() + static_cast<std::ptrdiff_t>(next_),
                               pool_.begin() + static_cast<std::ptrdiff_t>(next_ + n));
    next_ += n;
    return out;
  }

  // Draws subjects until each holds at least `min_points` points; subjects
  // that are too small are consumed and skipped.
  SubjectId draw_with_points(const data::SubjectDataset& ds, std::size_t min_points, const std::string& purpose) {
    while (remaining() > 0) {
      SubjectId s = pool_[next_++];
      if (ds.points(s).size() >= min_points) return s;
    }
    throw AssignmentError(purpose + " needs a fresh subject with at least " + std::to_string(min_points) +
                          " points but the pool is exhausted");
  }

 private:
  std::vector<SubjectId> pool_;
  std::size_t next_ = 0;
};

}  // namespace slsia::fl
