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

#include <span>
#include <vector>

#include "slsia/attack/classifier.hpp"
#include "slsia/attack/embeddings.hpp"
#include "slsia/fl/assign.hpp"

namespace slsia::attack {

using fl::SourceList;

struct AttackOutcome {
  std::vector<std::size_t> scores;  // "in" votes per client
  SourceList predicted;
  std::size_t eval_size = 0;
};

// A client is flagged when at least half of its votes say "in".
inline bool flagged(std::size_t votes, std::size_t eval_size) { return 2 * votes >= eval_size; }

inline AttackOutcome outcome_from_votes(const std::vector<std::vector<int>>& votes) {
  AttackOutcome o;
  o.eval_size = votes.empty() ? 0 : votes.front().size();
  for (const auto& v : votes) {
    std::size_t t = 0;
    for (int b : v) t += b == 1;
    o.scores.push_back(t);
    o.predicted.push_back(flagged(t, v.size()) ? 1 : 0);
  }
  return o;
}

// Votes of the classifier on each client's embeddings of D_st^e.
inline AttackOutcome score_embeddings(const AttackClassifier& clf,
                                      const std::vector<std::vector<std::vector<double>>>& client_embeddings) {
  std::vector<std::vector<int>> votes;
  for (const auto& rows : client_embeddings) votes.push_back(clf.predict(rows));
  return outcome_from_votes(votes);
}

inline AttackOutcome score_and_predict(const AttackClassifier& clf, const nn::NetworkSpec& spec,
                                       const std::vector<nn::ParamSet>& snapshots,
                                       std::span<const data::DataPoint> eval, std::size_t tap) {
  std::vector<std::vector<std::vector<double>>> emb;
  for (const auto& s : snapshots) emb.push_back(embed_points(spec, s, tap, eval));
  return score_embeddings(clf, emb);
}

}  // namespace slsia::attack
