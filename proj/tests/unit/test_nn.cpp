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
#include <numeric>
#include <sstream>

#include "slsia/nn/architectures.hpp"
#include "slsia/nn/network.hpp"
#include "slsia/nn/optim.hpp"
#include "slsia/nn/params.hpp"
#include "slsia/nn/serialize.hpp"
#include "test_util.hpp"

using namespace slsia;
using namespace slsia::nn;
using slsia::testing::max_fd_rel_error;
using slsia::testing::random_labels;
using slsia::testing::random_tensor;

namespace {

constexpr double kFdTol = 1e-4;

}  // namespace

TEST(Tensor, SizeMismatchRejected) {
  EXPECT_THROW(Tensor({2, 3}, std::vector<double>(5)), ConfigError);
  Tensor t({2, 3}, 1.5);
  EXPECT_EQ(t.size(), 6u);
}

TEST(Forward, LinearIdentity) {
  auto spec = NetworkSpec::build({2}, {Linear{2, 2}}, 2);
  ParamSet p = ParamSet::zeros(spec);
  auto w = p.block(spec.param_blocks()[0]);
  w[0] = 1;
  w[3] = 1;
  auto fr = forward(spec, p, Tensor({1, 2}, {1.0, 2.0}), Mode::Eval);
  EXPECT_EQ(fr.activations[0].values()[0], 1.0);
  EXPECT_EQ(fr.activations[0].values()[1], 2.0);
}

TEST(Forward, Relu) {
  auto spec = NetworkSpec::build({2}, {ReLU{}}, 2);
  ParamSet p = ParamSet::zeros(spec);
  auto fr = forward(spec, p, Tensor({1, 2}, {-1.0, 2.0}), Mode::Eval);
  EXPECT_EQ(fr.activations[0].values()[0], 0.0);
  EXPECT_EQ(fr.activations[0].values()[1], 2.0);
}

TEST(Forward, MlpRowsSumToOne) {
  auto arch = make_mlp();
  auto p = init_params(arch.spec, 3);
  auto x = random_tensor({7, 60}, 11, -5, 5);
  auto fr = forward(arch.spec, p, x, Mode::Eval);
  for (std::size_t r = 0; r < 7; ++r) {
    auto row = fr.probabilities.row(r);
    EXPECT_NEAR(std::accumulate(row.begin(), row.end(), 0.0), 1.0, 1e-12);
    for (double v : row) EXPECT_GE(v, 0.0);
  }
}

TEST(Forward, ShapeAndFiniteness) {
  auto arch = make_mlp();
  auto p = init_params(arch.spec, 1);
  EXPECT_THROW(forward(arch.spec, p, Tensor({2, 59}), Mode::Eval), ConfigError);
  Tensor bad({1, 60});
  bad.values()[3] = std::nan("");
  EXPECT_THROW(forward(arch.spec, p, bad, Mode::Eval), InputError);
}

TEST(NetworkSpec, RejectsIncompatibleLayers) {
  EXPECT_THROW(NetworkSpec::build({4}, {Linear{3, 2}}, 2), ConfigError);
  EXPECT_THROW(NetworkSpec::build({4}, {Linear{4, 3}}, 2), ConfigError);
  EXPECT_THROW(NetworkSpec::build({4}, {Softmax{}, Linear{4, 2}}, 2), ConfigError);
}

TEST(NetworkSpec, CnnShapes) {
  auto arch = make_cnn();
  EXPECT_EQ(arch.spec.layer_output_shape(6), Shape{1024});
  EXPECT_EQ(arch.tap_width(1), 1024u);
  EXPECT_EQ(arch.spec.layer_output_shape(0), (Shape{32, 24, 24}));
  EXPECT_EQ(arch.spec.layer_output_shape(3), (Shape{64, 8, 8}));
}

TEST(Loss, EqualLogitsGiveLogK) {
  auto spec = NetworkSpec::build({3}, {Linear{3, 4}}, 4);
  ParamSet p = ParamSet::zeros(spec);
  std::vector<int> y{2, 0};
  auto r = loss_and_grad(spec, p, random_tensor({2, 3}, 5), y);
  EXPECT_NEAR(r.loss, std::log(4.0), 1e-14);
}

TEST(Loss, LabelOutOfRange) {
  auto spec = NetworkSpec::build({3}, {Linear{3, 4}}, 4);
  ParamSet p = ParamSet::zeros(spec);
  std::vector<int> y{4};
  EXPECT_THROW(loss_and_grad(spec, p, random_tensor({1, 3}, 5), y), InputError);
  std::vector<int> neg{-1};
  EXPECT_THROW(loss_and_grad(spec, p, random_tensor({1, 3}, 5), neg), InputError);
}

TEST(Loss, LogitGradientClosedForm) {
  // With a single linear layer and zero bias, d/d bias = mean(softmax - onehot).
  auto spec = NetworkSpec::build({3}, {Linear{3, 3}, Softmax{}}, 3);
  auto p = init_params(spec, 9);
  auto x = random_tensor({4, 3}, 8);
  std::vector<int> y{0, 2, 1, 1};
  auto r = loss_and_grad(spec, p, x, y);
  auto fr = forward(spec, p, x, Mode::Eval);
  const auto& bias = spec.param_blocks()[1];
  for (std::size_t k = 0; k < 3; ++k) {
    double want = 0;
    for (std::size_t b = 0; b < 4; ++b) want += (fr.probabilities.row(b)[k] - (y[b] == static_cast<int>(k))) / 4.0;
    EXPECT_NEAR(r.grad.values[bias.offset + k], want, 1e-15);
  }
}

// Finite differences, one network per layer kind.
TEST(GradCheck, LinearReluSoftmax) {
  auto spec = NetworkSpec::build({5}, {Linear{5, 7}, ReLU{}, Linear{7, 3}, Softmax{}}, 3);
  auto p = init_params(spec, 1);
  EXPECT_LE(max_fd_rel_error(spec, p, random_tensor({4, 5}, 2), random_labels(4, 3, 3), Mode::Train), kFdTol);
}

TEST(GradCheck, Conv2DMaxPoolFlatten) {
  auto spec = NetworkSpec::build({2, 7, 7}, {Conv2D{2, 3, 3}, ReLU{}, MaxPool2D{2}, Flatten{}, Linear{12, 3}}, 3);
  auto p = init_params(spec, 4);
  EXPECT_LE(max_fd_rel_error(spec, p, random_tensor({3, 2, 7, 7}, 5), random_labels(3, 3, 6), Mode::Train), kFdTol);
}

TEST(GradCheck, Conv1DMaxPool1D) {
  auto spec = NetworkSpec::build({2, 14}, {Conv1D{2, 3, 3}, MaxPool1D{3}, ReLU{}, Flatten{}, Linear{12, 2}, Softmax{}}, 2);
  auto p = init_params(spec, 7);
  EXPECT_LE(max_fd_rel_error(spec, p, random_tensor({3, 2, 14}, 8), random_labels(3, 2, 9), Mode::Train), kFdTol);
}

TEST(GradCheck, BatchNormTrainMode) {
  auto spec = NetworkSpec::build({1, 20}, {Conv1D{1, 3, 3}, BatchNorm1D{3}, Flatten{}, Linear{54, 2}}, 2);
  auto p = init_params(spec, 10);
  auto g = p.block(spec.param_blocks()[2]);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = 0.5 + 0.3 * static_cast<double>(i);
  EXPECT_LE(max_fd_rel_error(spec, p, random_tensor({5, 1, 20}, 11), random_labels(5, 2, 12), Mode::Train), kFdTol);
}

TEST(GradCheck, BatchNormEvalMode) {
  auto spec = NetworkSpec::build({1, 20}, {Conv1D{1, 3, 3}, BatchNorm1D{3}, Flatten{}, Linear{54, 2}}, 2);
  auto p = init_params(spec, 13);
  auto rm = p.buffer(spec.buffer_blocks()[0]);
  auto rv = p.buffer(spec.buffer_blocks()[1]);
  for (std::size_t i = 0; i < 3; ++i) {
    rm[i] = 0.1 * static_cast<double>(i);
    rv[i] = 0.5 + static_cast<double>(i);
  }
  EXPECT_LE(max_fd_rel_error(spec, p, random_tensor({4, 1, 20}, 14), random_labels(4, 2, 15), Mode::Eval), kFdTol);
}

TEST(GradCheck, AttackNetwork) {
  auto spec = make_attack_conv(30);
  auto p = init_params(spec, 16);
  EXPECT_LE(max_fd_rel_error(spec, p, random_tensor({6, 1, 30}, 17), random_labels(6, 2, 18), Mode::Train), kFdTol);
}

TEST(GradCheck, SmallCnnEveryKind) {
  auto spec = NetworkSpec::build({1, 14, 14},
                                 {Conv2D{1, 2, 3}, ReLU{}, MaxPool2D{2}, Conv2D{2, 3, 3}, ReLU{}, MaxPool2D{2},
                                  Flatten{}, Linear{12, 5}, ReLU{}, Linear{5, 4}, Softmax{}},
                                 4);
  auto p = init_params(spec, 19);
  EXPECT_LE(max_fd_rel_error(spec, p, random_tensor({2, 1, 14, 14}, 20), random_labels(2, 4, 21), Mode::Train), kFdTol);
}

TEST(PerSample, MeanEqualsBatchGradient) {
  auto spec = NetworkSpec::build({1, 9, 9}, {Conv2D{1, 2, 3}, ReLU{}, MaxPool2D{2}, Flatten{}, Linear{18, 3}, Softmax{}}, 3);
  auto p = init_params(spec, 22);
  auto x = random_tensor({6, 1, 9, 9}, 23);
  auto y = random_labels(6, 3, 24);
  auto batch = loss_and_grad(spec, p, x, y).grad.values;
  auto recs = per_sample_gradients(spec, p, x, y);
  ASSERT_EQ(recs.size(), 6u);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    double m = 0;
    for (const auto& r : recs) m += r.values[i];
    EXPECT_NEAR(m / 6.0, batch[i], 1e-10);
  }
}

TEST(PerSample, MatchesOneAtATimeOracle) {
  auto arch = make_mlp(6, 5, 2);
  auto p = init_params(arch.spec, 25);
  auto x = random_tensor({5, 6}, 26);
  auto y = random_labels(5, 2, 27);
  auto recs = per_sample_gradients(arch.spec, p, x, y);
  for (std::size_t b = 0; b < 5; ++b) {
    Tensor xb({1, 6}, std::vector<double>(x.row(b).begin(), x.row(b).end()));
    std::vector<int> yb{y[b]};
    auto single = loss_and_grad(arch.spec, p, xb, yb).grad;
    for (std::size_t i = 0; i < single.values.size(); ++i) EXPECT_NEAR(recs[b].values[i], single.values[i], 1e-14);
    EXPECT_NEAR(recs[b].norm, l2_norm(recs[b].values), 1e-12 * std::max(1.0, recs[b].norm));
  }
}

TEST(PerSample, IdenticalSamplesIdenticalRecords) {
  auto arch = make_mlp(4, 3, 2);
  auto p = init_params(arch.spec, 28);
  Tensor x({3, 4}, std::vector<double>{0.1, 0.2, -0.3, 0.4, 0.1, 0.2, -0.3, 0.4, 0.1, 0.2, -0.3, 0.4});
  std::vector<int> y{1, 1, 1};
  auto recs = per_sample_gradients(arch.spec, p, x, y);
  EXPECT_EQ(recs[0].values, recs[1].values);
  EXPECT_EQ(recs[1].values, recs[2].values);
}

TEST(PerSample, TrainModeBatchNormRejected) {
  auto spec = make_attack_conv(20);
  auto p = init_params(spec, 1);
  std::vector<int> y{0, 1};
  EXPECT_THROW(per_sample_gradients(spec, p, random_tensor({2, 1, 20}, 2), y), ConfigError);
  EXPECT_NO_THROW(per_sample_gradients(spec, p, random_tensor({2, 1, 20}, 2), y, Mode::Eval));
}

TEST(Optimizer, SgdNoMomentum) {
  auto spec = NetworkSpec::build({1}, {Linear{1, 1}}, 1);
  ParamSet p(std::vector<double>{1.0, 0.0}, {});
  OptimizerState st(SgdMomentum{0.01, 0.0}, 2);
  st.step(p, GradientRecord({1.0, 0.0}));
  EXPECT_DOUBLE_EQ(p.flat()[0], 0.99);
  EXPECT_EQ(st.steps(), 1u);
}

TEST(Optimizer, ZeroGradientNoChange) {
  ParamSet p(std::vector<double>{1.0, -2.0}, {});
  ParamSet before = p;
  OptimizerState sgd(SgdMomentum{}, 2);
  sgd.step(p, GradientRecord({0.0, 0.0}));
  EXPECT_EQ(p, before);
}

TEST(Optimizer, HeavyBall) {
  ParamSet p(std::vector<double>{0.0}, {});
  OptimizerState st(SgdMomentum{0.1, 0.9}, 1);
  st.step(p, GradientRecord({1.0}));
  st.step(p, GradientRecord({1.0}));
  // v1 = 1, v2 = 1.9
  EXPECT_NEAR(p.flat()[0], -0.1 - 0.19, 1e-15);
}

TEST(Optimizer, AdamMatchesScalarReference) {
  // f(w) = 0.5 * a * w^2, gradient a*w, with L2 weight decay.
  const double a = 3.0, lr = 0.05, b1 = 0.9, b2 = 0.999, eps = 1e-8, wd = 0.1;
  ParamSet p(std::vector<double>{2.0}, {});
  OptimizerState st(Adam{lr, b1, b2, eps, wd}, 1);
  double w = 2.0, m = 0, v = 0;
  for (int t = 1; t <= 2; ++t) {
    st.step(p, GradientRecord({a * p.flat()[0]}));
    const double g = a * w + wd * w;
    m = b1 * m + (1 - b1) * g;
    v = b2 * v + (1 - b2) * g * g;
    const double mh = m / (1 - std::pow(b1, t)), vh = v / (1 - std::pow(b2, t));
    w -= lr * mh / (std::sqrt(vh) + eps);
    EXPECT_NEAR(p.flat()[0], w, 1e-14);
  }
}

TEST(Optimizer, LengthMismatch) {
  ParamSet p(std::vector<double>{0.0, 1.0}, {});
  OptimizerState st(SgdMomentum{}, 2);
  EXPECT_THROW(st.step(p, GradientRecord({1.0})), ConfigError);
}

TEST(Embed, TerminalTapEqualsProbabilities) {
  auto arch = make_mlp();
  auto p = init_params(arch.spec, 30);
  auto x = random_tensor({3, 60}, 31);
  auto e = embed(arch.spec, p, arch.tap_layer(2), x);
  auto fr = forward(arch.spec, p, x, Mode::Eval);
  EXPECT_EQ(e.storage(), fr.probabilities.storage());
}

TEST(Embed, MlpLayerZeroWidthAndDeterminism) {
  auto arch = make_mlp();
  auto p = init_params(arch.spec, 32);
  auto x = random_tensor({2, 60}, 33);
  auto e1 = embed(arch.spec, p, arch.tap_layer(0), x);
  auto e2 = embed(arch.spec, p, arch.tap_layer(0), x);
  EXPECT_EQ(e1.shape(), (Shape{2, 200}));
  EXPECT_EQ(e1, e2);
  EXPECT_THROW(embed(arch.spec, p, 4, x), ConfigError);
  EXPECT_THROW(arch.tap_layer(3), ConfigError);
}

TEST(Embed, PreReluTapHasNegatives) {
  auto arch = make_mlp();
  auto arch_post = make_mlp(60, 200, 2, {.linear_post_relu = true});
  auto p = init_params(arch.spec, 34);
  auto x = random_tensor({4, 60}, 35);
  auto pre = embed(arch.spec, p, arch.tap_layer(0), x);
  auto post = embed(arch_post.spec, p, arch_post.tap_layer(0), x);
  bool neg = false;
  for (std::size_t i = 0; i < pre.size(); ++i) {
    neg |= pre[i] < 0;
    EXPECT_EQ(post[i], std::max(0.0, pre[i]));
  }
  EXPECT_TRUE(neg);
}

TEST(Embed, BatchNormUsesRunningStats) {
  auto spec = make_attack_conv(20);
  auto p = init_params(spec, 36);
  auto x = random_tensor({3, 1, 20}, 37);
  Tensor one({1, 1, 20}, std::vector<double>(x.row(0).begin(), x.row(0).end()));
  auto all = embed(spec, p, 2, x);
  auto single = embed(spec, p, 2, one);
  for (std::size_t i = 0; i < single.size(); ++i) EXPECT_EQ(single[i], all[i]);
}

TEST(Params, FlatStructuredRoundTrip) {
  auto spec = make_attack_conv(40);
  auto p = init_params(spec, 38);
  auto s = structured(spec, p);
  auto back = from_structured(spec, s, std::vector<double>(p.buffers().begin(), p.buffers().end()));
  EXPECT_EQ(back, p);
  EXPECT_EQ(init_params(spec, 38), p);
  EXPECT_NE(init_params(spec, 39), p);
}

TEST(Params, InitBounds) {
  auto arch = make_mlp();
  auto p = init_params(arch.spec, 40);
  auto w = p.block(arch.spec.param_blocks()[0]);
  const double bound = 1.0 / std::sqrt(60.0);
  for (double v : w) EXPECT_LE(std::abs(v), bound);
}

TEST(Serialize, TextAndBinaryRoundTrip) {
  auto spec = make_attack_conv(25);
  auto p = init_params(spec, 41);
  auto bufs = p.buffers();
  for (std::size_t i = 0; i < bufs.size(); ++i) bufs[i] = 0.1 * static_cast<double>(i) + 1.0 / 3.0;
  std::stringstream text;
  write_params_text(text, spec, p);
  EXPECT_EQ(read_params_text(text, spec), p);
  std::stringstream bin;
  write_params_binary(bin, spec, p);
  EXPECT_EQ(read_params_binary(bin, spec), p);
  std::stringstream wrong;
  write_params_binary(wrong, spec, p);
  EXPECT_THROW(read_params_binary(wrong, make_attack_conv(26)), ParseError);
}

TEST(Training, DeterministicAndDescends) {
  auto arch = make_mlp(4, 8, 2);
  auto p = init_params(arch.spec, 42);
  auto x = random_tensor({16, 4}, 43);
  std::vector<int> y(16);
  for (std::size_t i = 0; i < 16; ++i) y[i] = x.row(i)[0] > 0;
  auto run = [&] {
    ParamSet q = p;
    OptimizerState st(SgdMomentum{0.1, 0.9}, q.size());
    for (int i = 0; i < 50; ++i) st.step(q, loss_and_grad(arch.spec, q, x, y).grad);
    return q;
  };
  auto a = run();
  EXPECT_EQ(a, run());
  EXPECT_LT(loss_and_grad(arch.spec, a, x, y).loss, loss_and_grad(arch.spec, p, x, y).loss);
}

TEST(Training, BatchNormRunningStatsUpdate) {
  auto spec = make_attack_conv(20);
  auto p = init_params(spec, 44);
  std::vector<int> y{0, 1, 0, 1};
  auto r = loss_and_grad(spec, p, random_tensor({4, 1, 20}, 45, 2.0, 3.0), y);
  ASSERT_EQ(r.running_stats.size(), spec.num_buffers());
  // running mean moves 10% toward a positive batch mean
  bool moved = false;
  for (std::size_t i = 0; i < 4; ++i) moved |= r.running_stats[i] != 0.0;
  EXPECT_TRUE(moved);
}
