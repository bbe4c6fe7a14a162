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
#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "slsia/data/synthetic.hpp"
#include "slsia/eval/distance.hpp"
#include "slsia/eval/metrics.hpp"

using namespace slsia;
using namespace slsia::eval;

namespace {

data::PointList random_points(std::size_t n, std::size_t d, const std::string& subject, std::uint64_t seed,
                              double shift = 0.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  data::PointList out;
  for (std::size_t i = 0; i < n; ++i) {
    data::DataPoint p;
    p.subject = subject;
    for (std::size_t k = 0; k < d; ++k) p.features.push_back(z(rng) + shift);
    out.push_back(std::move(p));
  }
  return out;
}

data::PointList relabel(data::PointList pts, const std::string& s) {
  for (auto& p : pts) p.subject = s;
  return pts;
}

}  // namespace

TEST(Metrics, HandExample) {
  auto m = compute_metrics({1, 1, 1, 1, 1, 0, 0, 0, 0, 0}, {1, 1, 1, 0, 0, 1, 0, 0, 0, 0});
  EXPECT_DOUBLE_EQ(m.accuracy, 0.7);
  EXPECT_DOUBLE_EQ(m.precision, 0.75);
  EXPECT_DOUBLE_EQ(m.recall, 0.6);
  EXPECT_NEAR(m.f1, 2 * 0.75 * 0.6 / 1.35, 1e-15);
}

TEST(Metrics, PerfectAndComplement) {
  SourceList t{1, 0, 1, 1, 0};
  auto m = compute_metrics(t, t);
  EXPECT_EQ(m.accuracy, 1.0);
  EXPECT_EQ(m.precision, 1.0);
  EXPECT_EQ(m.recall, 1.0);
  EXPECT_EQ(m.f1, 1.0);
  SourceList c;
  for (int b : t) c.push_back(1 - b);
  auto w = compute_metrics(t, c);
  EXPECT_EQ(w.accuracy, 0.0);
  EXPECT_EQ(w.recall, 0.0);
  EXPECT_EQ(w.f1, 0.0);
}

TEST(Metrics, ZeroDenominatorsGiveZero) {
  auto m = compute_metrics({0, 0, 0}, {0, 0, 0});
  EXPECT_EQ(m.accuracy, 1.0);
  EXPECT_EQ(m.precision, 0.0);
  EXPECT_EQ(m.recall, 0.0);
  EXPECT_EQ(m.f1, 0.0);
}

TEST(Metrics, LengthMismatch) { EXPECT_THROW(compute_metrics({1, 0}, {1}), InputError); }

TEST(Metrics, BruteForceAllPredictionsForTenClients) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 16; ++t) {
    SourceList truth(10);
    for (auto& b : truth) b = static_cast<int>(rng() % 2);
    for (unsigned mask = 0; mask < 1024; ++mask) {
      SourceList pred(10);
      double tp = 0, fp = 0, tn = 0, fn = 0;
      for (int i = 0; i < 10; ++i) {
        pred[i] = (mask >> i) & 1;
        if (pred[i] && truth[i]) ++tp;
        else if (pred[i]) ++fp;
        else if (truth[i]) ++fn;
        else ++tn;
      }
      auto m = compute_metrics(truth, pred);
      const double p = tp + fp > 0 ? tp / (tp + fp) : 0, r = tp + fn > 0 ? tp / (tp + fn) : 0;
      ASSERT_EQ(m.accuracy, (tp + tn) / 10);
      ASSERT_NEAR(m.precision, p, 1e-15);
      ASSERT_NEAR(m.recall, r, 1e-15);
      ASSERT_NEAR(m.f1, p + r > 0 ? 2 * p * r / (p + r) : 0, 1e-15);
      for (double v : {m.accuracy, m.precision, m.recall, m.f1}) ASSERT_TRUE(v >= 0 && v <= 1);
    }
  }
}

TEST(Summary, SingleRecord) {
  MetricsRecord r{0.8, 0.7, 0.6, 0.5, "conv", "s"};
  auto s = summarize_runs({r});
  const auto& m = s.methods.at("conv");
  EXPECT_EQ(m.runs, 1u);
  EXPECT_EQ(m.accuracy, 0.8);
  EXPECT_EQ(m.precision, 0.7);
  EXPECT_EQ(m.recall, 0.6);
  EXPECT_EQ(m.f1, 0.5);
}

TEST(Summary, TwoRecordsMeanAndBins) {
  auto s = summarize_runs({{0.8, 1, 1, 1, "conv", "a"}, {0.6, 1, 1, 1, "conv", "b"}});
  const auto& m = s.methods.at("conv");
  EXPECT_NEAR(m.accuracy, 0.7, 1e-15);
  EXPECT_EQ(m.histogram[6], 1u);
  EXPECT_EQ(m.histogram[8], 1u);
  std::size_t total = 0;
  for (auto c : m.histogram) total += c;
  EXPECT_EQ(total, 2u);
}

TEST(Summary, FourMethodsFourMetrics) {
  std::vector<MetricsRecord> recs;
  for (const char* meth : {"conv", "svm", "avg-loss", "min-loss-time"})
    for (int s = 0; s < 3; ++s) recs.push_back({0.1 * s, 0.2, 0.3, 0.4, meth, std::to_string(s)});
  auto s = summarize_runs(recs);
  EXPECT_EQ(s.methods.size(), 4u);
  for (const auto& [_, m] : s.methods) EXPECT_EQ(m.runs, 3u);
  EXPECT_THROW(summarize_runs({}), InputError);
}

TEST(Summary, BinEdges) {
  EXPECT_EQ(accuracy_bin(0.0), 0u);
  EXPECT_EQ(accuracy_bin(0.9), 9u);
  EXPECT_EQ(accuracy_bin(1.0), 9u);
  EXPECT_EQ(accuracy_bin(0.7), 7u);
  EXPECT_EQ(accuracy_bin(0.69), 6u);
}

TEST(Distance, SinglePair) {
  data::PointList a{{{0.0, 0.0}, 0, "a"}}, b{{{3.0, 4.0}, 0, "b"}};
  EXPECT_DOUBLE_EQ(avg_input_feature_distance(a, b), 5.0);
}

TEST(Distance, BruteForceSymmetryTranslation) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    auto a = random_points(5, 7, "a", s), b = random_points(5, 7, "b", s + 100, 1.5);
    double want = 0;
    for (const auto& p : a)
      for (const auto& q : b) {
        double t = 0;
        for (std::size_t k = 0; k < 7; ++k) t += (p.features[k] - q.features[k]) * (p.features[k] - q.features[k]);
        want += std::sqrt(t);
      }
    want /= 25;
    const double got = avg_input_feature_distance(a, b);
    ASSERT_EQ(got, want);
    ASSERT_NEAR(avg_input_feature_distance(b, a), got, 1e-12);
    ASSERT_GE(got, 0.0);
    for (auto* set : {&a, &b})
      for (auto& p : *set)
        for (auto& v : p.features) v += 3.25;
    ASSERT_NEAR(avg_input_feature_distance(a, b), got, 1e-12);
  }
}

TEST(Distance, ZeroOnlyForIdenticalPairs) {
  auto a = random_points(1, 4, "a", 1);
  EXPECT_EQ(avg_input_feature_distance(a, a), 0.0);
  auto b = random_points(3, 4, "b", 2);
  EXPECT_GT(avg_input_feature_distance(b, b), 0.0);  // distinct points in the same set
}

TEST(Distance, ShapeMismatch) {
  data::PointList a{{{0.0, 0.0}, 0, "a"}}, b{{{3.0}, 0, "b"}};
  EXPECT_THROW(avg_input_feature_distance(a, b), InputError);
  EXPECT_THROW(avg_input_feature_distance(a, data::PointList{}), InputError);
}

TEST(DistanceReport, IdenticalSubjectsGiveEqualColumns) {
  auto base = random_points(6, 3, "t", 5);
  fl::ClientAssignment a;
  a.target_subject = "t";
  for (int c = 0; c < 4; ++c) {
    fl::ClientData cd;
    cd.is_target = c < 2;
    const std::string r = "r" + std::to_string(c);
    cd.points = relabel(base, r);
    cd.random_subjects = {r};
    if (cd.is_target) cd.points.insert(cd.points.end(), base.begin(), base.end());
    a.clients.push_back(cd);
  }
  std::vector<attack::PretrainDataset> pre(2);
  for (int i = 0; i < 2; ++i) {
    pre[i].label = 1 - i;
    pre[i].points = relabel(base, "p" + std::to_string(i));
    pre[i].random_subjects = {"p" + std::to_string(i)};
  }
  auto r = distance_report(a, pre, base);
  EXPECT_NEAR(r.random_pretrained, r.target_pretrained, 1e-12);
  EXPECT_NEAR(r.random_local, r.target_local, 1e-12);
  EXPECT_NEAR(r.random_local, r.random_pretrained, 1e-12);
}

TEST(DistanceReport, ManualComposition) {
  auto t = random_points(4, 3, "t", 1);
  auto r1 = random_points(4, 3, "r1", 2, 1.0), r2 = random_points(3, 3, "r2", 3, -2.0);
  auto r3 = random_points(5, 3, "r3", 4, 0.5);
  fl::ClientAssignment a;
  fl::ClientData target, other;
  target.is_target = true;
  target.points = t;
  target.points.insert(target.points.end(), r1.begin(), r1.end());
  target.random_subjects = {"r1"};
  other.points = r2;
  other.points.insert(other.points.end(), r3.begin(), r3.end());
  other.random_subjects = {"r2", "r3"};
  a.clients = {target, other};
  std::vector<attack::PretrainDataset> pre(2);
  pre[0].label = 1;
  pre[0].points = r3;
  pre[0].random_subjects = {"r3"};
  pre[1].label = 0;
  pre[1].points = r1;
  pre[1].points.insert(pre[1].points.end(), r2.begin(), r2.end());
  pre[1].random_subjects = {"r1", "r2"};
  auto rep = distance_report(a, pre, t);
  const double d1 = avg_input_feature_distance(t, r1), d2 = avg_input_feature_distance(t, r2),
               d3 = avg_input_feature_distance(t, r3);
  EXPECT_NEAR(rep.target_local, d1, 1e-12);
  EXPECT_NEAR(rep.random_local, (d2 + d3) / 2, 1e-12);
  EXPECT_NEAR(rep.target_pretrained, d3, 1e-12);
  EXPECT_NEAR(rep.random_pretrained, (d1 + d2) / 2, 1e-12);
}

TEST(DistanceReport, EmptyGroupIsNaN) {
  fl::ClientAssignment a;
  auto t = random_points(2, 2, "t", 1);
  auto rep = distance_report(a, {}, t);
  EXPECT_TRUE(std::isnan(rep.random_local));
  EXPECT_TRUE(std::isnan(rep.target_pretrained));
}
