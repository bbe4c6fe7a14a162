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
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "slsia/common/error.hpp"
#include "slsia/nn/params.hpp"
#include "slsia/nn/tensor.hpp"

namespace slsia::data {

using nn::SubjectId;

struct DataPoint {
  std::vector<double> features;
  int label = 0;
  SubjectId subject;

  friend bool operator==(const DataPoint&, const DataPoint&) = default;
};

using PointList = std::vector<DataPoint>;

// Points grouped by the subject that produced them. Ordered map so iteration
// is deterministic.
class SubjectDataset {
 public:
  SubjectDataset() = default;
  SubjectDataset(nn::Shape feature_shape, std::size_t num_classes)
      : feature_shape_(std::move(feature_shape)), num_classes_(num_classes) {}

  const nn::Shape& feature_shape() const noexcept { return feature_shape_; }
  std::size_t feature_size() const { return nn::shape_size(feature_shape_); }
  std::size_t num_classes() const noexcept { return num_classes_; }
  std::size_t num_subjects() const noexcept { return subjects_.size(); }
  const std::map<SubjectId, PointList>& subjects() const noexcept { return subjects_; }

  bool contains(const SubjectId& id) const { return subjects_.count(id) != 0; }
  const PointList& points(const SubjectId& id) const {
    auto it = subjects_.find(id);
    if (it == subjects_.end()) throw InputError("unknown subject '" + id + "'");
    return it->second;
  }

  std::vector<SubjectId> subject_ids() const {
    std::vector<SubjectId> ids;
    ids.reserve(subjects_.size());
    for (const auto& [id, _] : subjects_) ids.push_back(id);
    return ids;
  }

  std::size_t total_points() const {
    std::size_t n = 0;
    for (const auto& [_, pts] : subjects_) n += pts.size();
    return n;
  }

  void add(DataPoint p) {
    if (p.features.size() != feature_size()) {
      throw InputError("point of subject '" + p.subject + "' has " + std::to_string(p.features.size()) +
                       " features, expected " + std::to_string(feature_size()));
    }
    if (p.label < 0 || static_cast<std::size_t>(p.label) >= num_classes_) {
      throw InputError("label " + std::to_string(p.label) + " out of range");
    }
    auto key = p.subject;
    subjects_[key].push_back(std::move(p));
  }

  void set_subject(const SubjectId& id, PointList pts) {
    for (auto& p : pts) p.subject = id;
    subjects_[id] = std::move(pts);
  }

  void erase(const SubjectId& id) { subjects_.erase(id); }

 private:
  nn::Shape feature_shape_;
  std::size_t num_classes_ = 0;
  std::map<SubjectId, PointList> subjects_;
};

// [n, feature_shape...] batch and matching label vector.
inline nn::Tensor to_batch(std::span<const DataPoint> pts, const nn::Shape& feature_shape) {
  std::vector<std::span<const double>> rows;
  rows.reserve(pts.size());
  for (const auto& p : pts) rows.emplace_back(p.features);
  return nn::stack_rows(rows, feature_shape);
}

inline std::vector<int> labels_of(std::span<const DataPoint> pts) {
  std::vector<int> y;
  y.reserve(pts.size());
  for (const auto& p : pts) y.push_back(p.label);
  return y;
}

// Retains subjects having at least `min_points` points.
inline SubjectDataset filter_min_points(const SubjectDataset& ds, std::size_t min_points) {
  SubjectDataset out(ds.feature_shape(), ds.num_classes());
  for (const auto& [id, pts] : ds.subjects())
    if (pts.size() >= min_points) out.set_subject(id, pts);
  return out;
}

}  // namespace slsia::data
