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

#include <Eigen/Dense>
#include <filesystem>
#include <fstream>
#include <set>

#include "slsia/data/dataset.hpp"
#include "slsia/data/io.hpp"
#include "slsia/data/leaf.hpp"
#include "slsia/data/split.hpp"
#include "slsia/data/synthetic.hpp"

using namespace slsia;
using namespace slsia::data;
namespace fs = std::filesystem;

namespace {

const SubjectDataset& default_synthetic() {
  static const SubjectDataset ds = gen_synthetic(SyntheticParams{});
  return ds;
}

fs::path temp_dir(const std::string& name) {
  auto p = fs::temp_directory_path() / ("slsia_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST(XorLabel, Examples) {
  EXPECT_EQ(xor_label(std::vector<double>{-1, -2, -0.5}), 0);
  EXPECT_EQ(xor_label(std::vector<double>{-1, 0.3, -0.5}), 1);
  EXPECT_EQ(xor_label(std::vector<double>{0.5, -0.2, 0.1}), 0);
  EXPECT_EQ(xor_label(std::vector<double>{0.0}), 1);  // boundary counts as non-negative
}

TEST(Synthetic, DefaultShape) {
  const auto& ds = default_synthetic();
  EXPECT_EQ(ds.num_subjects(), 200u);
  EXPECT_EQ(ds.feature_shape(), nn::Shape{60});
  EXPECT_EQ(ds.num_classes(), 2u);
  for (const auto& [id, pts] : ds.subjects()) {
    ASSERT_EQ(pts.size(), 400u);
    for (const auto& p : pts) {
      ASSERT_EQ(p.subject, id);
      ASSERT_EQ(p.features.size(), 60u);
    }
  }
}

TEST(Synthetic, LabelsAreXor) {
  for (const auto& [id, pts] : default_synthetic().subjects())
    for (const auto& p : pts) ASSERT_EQ(p.label, xor_label(p.features));
}

TEST(Synthetic, BothClassesPerSubject) {
  for (const auto& [id, pts] : default_synthetic().subjects()) {
    std::size_t ones = 0;
    for (const auto& p : pts) ones += p.label;
    EXPECT_GT(ones, 0u) << id;
    EXPECT_LT(ones, pts.size()) << id;
  }
}

TEST(Synthetic, MeanSeparation) {
  SyntheticParams p;
  const auto models = make_subject_models(p);
  for (std::size_t i = 0; i < models.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) {
      double d2 = 0;
      for (std::size_t k = 0; k < p.dim; ++k) d2 += std::pow(models[i].mean[k] - models[j].mean[k], 2);
      ASSERT_GT(std::sqrt(d2), 0.35);
    }
}

TEST(Synthetic, SeparationHoldsWhenTight) {
  // Small box so rejection actually fires.
  SyntheticParams p;
  p.n_subjects = 40;
  p.dim = 2;
  p.mean_range = 1.0;
  p.min_sep = 0.2;
  p.points_per_subject = 1;
  const auto models = make_subject_models(p);
  for (std::size_t i = 0; i < models.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      ASSERT_GT(std::hypot(models[i].mean[0] - models[j].mean[0], models[i].mean[1] - models[j].mean[1]), 0.2);
}

TEST(Synthetic, CovariancesSymmetricPsd) {
  SyntheticParams p;
  p.n_subjects = 20;
  for (const auto& m : make_subject_models(p)) {
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> c(m.covariance.data(), 60, 60);
    ASSERT_EQ((c - c.transpose()).norm(), 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-9);
  }
}

TEST(Synthetic, SeedDeterministic) {
  SyntheticParams p;
  p.n_subjects = 10;
  p.points_per_subject = 20;
  auto a = gen_synthetic(p);
  auto b = gen_synthetic(p);
  EXPECT_EQ(a.subjects(), b.subjects());
  p.seed = 1;
  EXPECT_NE(gen_synthetic(p).subjects(), a.subjects());
}

TEST(Synthetic, RetryBudgetExhausted) {
  SyntheticParams p;
  p.n_subjects = 5;
  p.dim = 1;
  p.mean_range = 0.1;
  p.min_sep = 5.0;
  p.retry_budget = 100;
  EXPECT_THROW(gen_synthetic(p), GenerationError);
}

TEST(Synthetic, BadParams) {
  SyntheticParams p;
  p.min_sep = 0;
  EXPECT_THROW(gen_synthetic(p), ConfigError);
  p = {};
  p.dim = 0;
  EXPECT_THROW(gen_synthetic(p), ConfigError);
}

TEST(Split, DefaultSizes) {
  const auto& ds = default_synthetic();
  auto s = split_target_subject(ds, "syn-007", {}, 42);
  EXPECT_EQ(s.pretrain.size(), 200u);
  EXPECT_EQ(s.eval.size(), 100u);
  EXPECT_EQ(s.fl.size(), 100u);
}

TEST(Split, DisjointCoveringDeterministic) {
  const auto& ds = default_synthetic();
  auto s = split_target_subject(ds, "syn-010", {0.3, 0.3, 0.4}, 5);
  std::multiset<std::vector<double>> all;
  for (const auto* part : {&s.pretrain, &s.eval, &s.fl})
    for (const auto& p : *part) all.insert(p.features);
  std::multiset<std::vector<double>> want;
  for (const auto& p : ds.points("syn-010")) want.insert(p.features);
  EXPECT_EQ(all, want);
  EXPECT_EQ(std::set<std::vector<double>>(all.begin(), all.end()).size(), 400u);
  auto again = split_target_subject(ds, "syn-010", {0.3, 0.3, 0.4}, 5);
  EXPECT_EQ(again.pretrain, s.pretrain);
  EXPECT_EQ(again.eval, s.eval);
  EXPECT_EQ(again.fl, s.fl);
}

TEST(Split, LargestRemainder) {
  EXPECT_EQ(apportion(10, {0.5, 0.25, 0.25}), (std::vector<std::size_t>{5, 3, 2}));
  EXPECT_EQ(apportion(7, {1.0 / 3, 1.0 / 3, 1.0 / 3}), (std::vector<std::size_t>{3, 2, 2}));
  EXPECT_EQ(apportion(400, {0.5, 0.25, 0.25}), (std::vector<std::size_t>{200, 100, 100}));
}

TEST(Split, Errors) {
  SubjectDataset ds({1}, 2);
  ds.add({{0.1}, 0, "a"});
  ds.add({{0.2}, 1, "a"});
  EXPECT_THROW(split_target_subject(ds, "a", {}, 0), InputError);
  EXPECT_THROW(split_target_subject(ds, "zzz", {}, 0), InputError);
  EXPECT_THROW(split_target_subject(ds, "a", {0.5, 0.25, 0.3}, 0), ConfigError);
}

TEST(Filter, MinPoints) {
  const auto& ds = default_synthetic();
  EXPECT_EQ(filter_min_points(ds, 0).subjects(), ds.subjects());
  EXPECT_EQ(filter_min_points(ds, 400).subjects(), ds.subjects());
  EXPECT_EQ(filter_min_points(ds, 401).num_subjects(), 0u);
}

TEST(Dataset, RejectsBadPoints) {
  SubjectDataset ds({2}, 2);
  EXPECT_THROW(ds.add({{1.0}, 0, "a"}), InputError);
  EXPECT_THROW(ds.add({{1.0, 2.0}, 2, "a"}), InputError);
  EXPECT_THROW(ds.points("nobody"), InputError);
}

namespace {

std::string pixel_array(double v) {
  std::string s = "[";
  for (int i = 0; i < 784; ++i) s += (i ? "," : "") + std::to_string(v);
  return s + "]";
}

}  // namespace

TEST(Leaf, LoadsDigitsAndSkipsEmptyUsers) {
  auto dir = temp_dir("leaf");
  {
    std::ofstream f(dir / "shard_a.json");
    f << R"({"users":["w1","w2","w3"],"num_samples":[3,1,0],"user_data":{)"
      << R"("w1":{"x":[)" << pixel_array(0.25) << "," << pixel_array(0.5) << "," << pixel_array(1.0) << R"(],"y":[3,40,9]},)"
      << R"("w2":{"x":[)" << pixel_array(0.0) << R"(],"y":[12]},)"
      << R"("w3":{"x":[],"y":[]}}})";
  }
  {
    std::ofstream f(dir / "shard_b.json");
    f << R"({"users":["w4"],"num_samples":[2],"user_data":{"w4":{"x":[)" << pixel_array(0.75) << ","
      << pixel_array(0.1) << R"(],"y":[0,1]}}})";
  }
  LeafLoadReport rep;
  auto ds = load_leaf_femnist(dir, {}, &rep);
  EXPECT_EQ(ds.num_subjects(), 2u);
  EXPECT_EQ(ds.points("w1").size(), 2u);
  EXPECT_EQ(ds.points("w4").size(), 2u);
  EXPECT_EQ(ds.total_points(), 4u);
  EXPECT_EQ(ds.feature_shape(), (nn::Shape{1, 28, 28}));
  EXPECT_EQ(rep.users_skipped, 2u);
  EXPECT_EQ(rep.warnings.size(), 2u);
  for (const auto& [id, pts] : ds.subjects())
    for (const auto& p : pts) {
      EXPECT_LE(p.label, 9);
      for (double v : p.features) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
      }
    }
  auto all = load_leaf_femnist(dir, {.digits_only = false});
  EXPECT_EQ(all.total_points(), 6u);
  EXPECT_EQ(all.num_classes(), 62u);
}

TEST(Leaf, MalformedJsonNamesShard) {
  auto dir = temp_dir("leaf_bad");
  std::ofstream(dir / "broken.json") << "{\"users\": [\"u\"], ";
  try {
    load_leaf_femnist(dir);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("broken.json"), std::string::npos);
  }
}

TEST(Leaf, BadSampleNamesUser) {
  auto dir = temp_dir("leaf_user");
  std::ofstream(dir / "s.json") << R"({"users":["writer_7"],"user_data":{"writer_7":{"x":[[0.1,0.2]],"y":[1]}}})";
  try {
    load_leaf_femnist(dir);
    FAIL();
  } catch (const ParseError& e) {
    const std::string w = e.what();
    EXPECT_NE(w.find("writer_7"), std::string::npos);
    EXPECT_NE(w.find("s.json"), std::string::npos);
  }
}

TEST(Bundle, RoundTrip) {
  SyntheticParams p;
  p.n_subjects = 6;
  p.points_per_subject = 15;
  p.dim = 7;
  p.seed = 3;
  auto ds = gen_synthetic(p);
  auto dir = temp_dir("bundle");
  save_dataset_bundle(dir, ds, {{"generator", "synthetic"}, {"params", to_json(p)}});
  nlohmann::json m;
  auto back = load_dataset_bundle(dir, &m);
  EXPECT_EQ(back.subjects(), ds.subjects());
  EXPECT_EQ(back.feature_shape(), ds.feature_shape());
  EXPECT_EQ(synthetic_params_from_json(m["params"]).seed, 3u);
  EXPECT_EQ(synthetic_params_from_json(m["params"]).dim, 7u);
}
