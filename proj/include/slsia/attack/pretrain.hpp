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
#include <string>
#include <vector>

#include "slsia/common/error.hpp"
#include "slsia/common/parallel.hpp"
#include "slsia/data/split.hpp"
#include "slsia/fl/assign.hpp"
#include "slsia/fl/config.hpp"
#include "slsia/fl/ledger.hpp"
#include "slsia/fl/train.hpp"

namespace slsia::attack {

using data::PointList;
using data::SubjectId;

struct PretrainPlan {
  std::size_t n_pre = 20;
  fl::LocalTrainConfig train;  // no DP: the server trains its own models
  std::size_t workers = 0;

  void validate() const {
    if (n_pre == 0 || n_pre % 2 != 0) throw ConfigError("n_pre must be a positive even number");
    train.validate();
  }
};

struct PretrainDataset {
  PointList points;
  int label = 0;  // 1 if trained with target-subject data
  std::vector<SubjectId> random_subjects;
};

// n_pre/2 datasets of D_st^p plus as many points from one fresh subject, then
// n_pre/2 datasets of the same total size from two fresh subjects.
inline std::vector<PretrainDataset> build_pretrain_datasets(const data::SubjectDataset& ds,
                                                            const data::SubjectSplit& split, const PretrainPlan& plan,
                                                            fl::SubjectLedger& ledger, std::uint64_t seed) {
  plan.validate();
  if (split.pretrain.empty()) throw AssignmentError("target subject has no pre-training share");
  const std::size_t half = split.pretrain.size();
  std::vector<PretrainDataset> out(plan.n_pre);
  for (std::size_t i = 0; i < plan.n_pre; ++i) {
    auto& d = out[i];
    const std::string who = "pre-train dataset " + std::to_string(i);
    if (i < plan.n_pre / 2) {
      d.label = 1;
      d.points = split.pretrain;
      auto r = fl::draw_random_points(ds, ledger, half, 1, derive_seed(seed, "pretrain-target", i), who, d.random_subjects);
      d.points.insert(d.points.end(), r.begin(), r.end());
    } else {
      d.label = 0;
      d.points = fl::draw_random_points(ds, ledger, 2 * half, 2, derive_seed(seed, "pretrain-random", i), who,
                                        d.random_subjects);
    }
  }
  return out;
}

// All models start from W0 and follow the FL clients' local recipe.
inline std::vector<nn::ParamSet> pretrain_models(const nn::NetworkSpec& spec, const nn::ParamSet& w0,
                                                 const std::vector<PretrainDataset>& datasets, const PretrainPlan& plan,
                                                 std::uint64_t seed) {
  std::vector<nn::ParamSet> out(datasets.size());
  parallel_for(datasets.size(), plan.workers, [&](std::size_t i) {
    out[i] = fl::local_train(spec, w0, datasets[i].points, plan.train, derive_seed(seed, "pretrain-model", i)).params;
  });
  return out;
}

}  // namespace slsia::attack
