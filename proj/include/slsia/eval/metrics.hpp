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

#include <array>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "slsia/common/error.hpp"
#include "slsia/fl/assign.hpp"

namespace slsia::eval {

using fl::SourceList;

struct MetricsRecord {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::string method;
  std::string subject;
};

struct Confusion {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
};

inline Confusion confusion(const SourceList& truth, const SourceList& predicted) {
  if (truth.size() != predicted.size()) {
    throw InputError("source lists differ in length (" + std::to_string(truth.size()) + " vs " +
                     std::to_string(predicted.size()) + ")");
  }
  Confusion c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool t = truth[i] != 0, p = predicted[i] != 0;
    if (t && p) ++c.tp;
    else if (!t && p) ++c.fp;
    else if (!t && !p) ++c.tn;
    else ++c.fn;
  }
  return c;
}

// Zero denominators give 0, never NaN.
inline MetricsRecord compute_metrics(const SourceList& truth, const SourceList& predicted, std::string method = {},
                                     std::string subject = {}) {
  const Confusion c = confusion(truth, predicted);
  MetricsRecord m;
  m.method = std::move(method);
  m.subject = std::move(subject);
  const auto n = static_cast<double>(truth.size());
  m.accuracy = n > 0 ? static_cast<double>(c.tp + c.tn) / n : 0.0;
  m.precision = c.tp + c.fp > 0 ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp) : 0.0;
  m.recall = c.tp + c.fn > 0 ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn) : 0.0;
  m.f1 = m.precision + m.recall > 0 ? 2 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  return m;
}

inline constexpr std::size_t kBins = 10;

// [0,0.1), ..., [0.8,0.9), [0.9,1.0]
inline std::size_t accuracy_bin(double acc) {
  const auto b = static_cast<std::size_t>(std::floor(acc * 10.0 + 1e-9));
  return std::min(b, kBins - 1);
}

struct MethodSummary {
  std::size_t runs = 0;
  double accuracy = 0.0, precision = 0.0, recall = 0.0, f1 = 0.0;
  std::array<std::size_t, kBins> histogram{};
};

struct RunSummary {
  std::map<std::string, MethodSummary> methods;
};

inline RunSummary summarize_runs(const std::vector<MetricsRecord>& records) {
  if (records.empty()) throw InputError("no metric records to summarize");
  RunSummary s;
  for (const auto& r : records) {
    auto& m = s.methods[r.method];
    ++m.runs;
    m.accuracy += r.accuracy;
    m.precision += r.precision;
    m.recall += r.recall;
    m.f1 += r.f1;
    ++m.histogram[accuracy_bin(r.accuracy)];
  }
  for (auto& [_, m] : s.methods) {
    const auto n = static_cast<double>(m.runs);
    m.accuracy /= n;
    m.precision /= n;
    m.recall /= n;
    m.f1 /= n;
  }
  return s;
}

}  // namespace slsia::eval
