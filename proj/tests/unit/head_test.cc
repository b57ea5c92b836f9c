// Copyright 2026 The TTML Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <vector>

#include "common/error.h"
#include "common/rng.h"
#include "engine/engine.h"
#include "features/features.h"
#include "gtest/gtest.h"
#include "head/head.h"
#include "model/graph.h"
#include "support/grad_check.h"
#include "support/test_util.h"

namespace ttml {
namespace {

using testing::RandomTensor;

ErrorCode CodeOf(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInternal;
}

std::vector<std::string> Names(int k) {
  std::vector<std::string> n;
  for (int i = 0; i < k; ++i) n.push_back("class" + std::to_string(i));
  return n;
}

Tensor OneHot(const std::vector<int64_t>& labels, int64_t k) {
  std::vector<float> v(labels.size() * static_cast<size_t>(k), 0.0f);
  for (size_t i = 0; i < labels.size(); ++i) v[i * static_cast<size_t>(k) + static_cast<size_t>(labels[i])] = 1.0f;
  return Tensor::FromData({static_cast<int64_t>(labels.size()), k}, v);
}

// Two Gaussian blobs at +mu and -mu in feature space, shaped (N,1,1,F).
FeatureCache GaussianCache(int per_class, int64_t f, uint64_t seed, const std::vector<double>& mu) {
  Rng rng(seed);
  std::vector<float> x;
  std::vector<int64_t> labels;
  for (int i = 0; i < 2 * per_class; ++i) {
    const int64_t c = i % 2;
    for (int64_t j = 0; j < f; ++j) {
      x.push_back(static_cast<float>((c == 0 ? 1 : -1) * mu[static_cast<size_t>(j)] + rng.Normal()));
    }
    labels.push_back(c);
  }
  FeatureCache cache;
  cache.features = Tensor::FromData({2 * per_class, 1, 1, f}, x);
  cache.labels = OneHot(labels, 2);
  cache.class_names = {"neg", "pos"};
  cache.clip_ids.assign(labels.size(), -1);
  return cache;
}

std::vector<double> RandomMean(int64_t f, uint64_t seed, double scale) {
  Rng rng(seed);
  std::vector<double> mu(static_cast<size_t>(f));
  for (double& m : mu) m = scale * rng.Normal();
  return mu;
}

TEST(HeadForwardTest, EvalModeIgnoresDropout) {
  Rng init(1), rng(2);
  HeadModel head = MakeHead({2, 2, 6}, Names(3), Activation::kSoftmax, 0.5, &init);
  HeadModel no_drop = head;
  no_drop.dropout_rate = 0.0;
  const Tensor x = RandomTensor({4, 2, 2, 6}, rng);
  EXPECT_EQ(HeadForward(head, x, false, &rng).probs, HeadForward(no_drop, x, false, nullptr).probs);
  EXPECT_TRUE(HeadForward(head, x, false, &rng).mask.v.empty());
}

TEST(HeadForwardTest, ZeroWeightsGiveUniformSoftmax) {
  HeadModel head = MakeHead({1, 1, 8}, Names(5), Activation::kSoftmax, 0.0, nullptr);
  Rng rng(3);
  const Tensor x = RandomTensor({3, 1, 1, 8}, rng);
  for (double c : {1.0, 0.01, 250.0}) {
    std::vector<float> scaled(x.data().begin(), x.data().end());
    for (float& v : scaled) v = static_cast<float>(v * c);
    const Matrix p = HeadForward(head, Tensor::FromData(x.shape(), scaled), false, nullptr).probs;
    for (double v : p.v) EXPECT_DOUBLE_EQ(v, 0.2);
  }
}

TEST(HeadForwardTest, SeededMasksRepeat) {
  Rng init(4);
  HeadModel head = MakeHead({1, 1, 16}, Names(2), Activation::kSoftmax, 0.5, &init);
  Rng data(5);
  const Tensor x = RandomTensor({6, 1, 1, 16}, data);
  Rng a(77), b(77);
  const HeadOutput oa = HeadForward(head, x, true, &a);
  const HeadOutput ob = HeadForward(head, x, true, &b);
  EXPECT_EQ(oa.mask, ob.mask);
  EXPECT_EQ(oa.probs, ob.probs);
  EXPECT_EQ(oa.mask.rows, 6);
}

TEST(HeadForwardTest, ShapeMismatch) {
  HeadModel head = MakeHead({7, 7, 1280}, Names(2), Activation::kSoftmax, 0.5, nullptr);
  EXPECT_EQ(CodeOf([&] { HeadForward(head, Tensor::Zeros({1, 3, 2, 1024}), false, nullptr); }),
            ErrorCode::kShapeMismatch);
}

TEST(HeadForwardTest, DropoutExpectationMatchesEval) {
  Rng rng(6);
  const std::vector<double> x = {0.3, -1.2, 2.5, 0.7};
  const int64_t draws = 40000;
  const Matrix mask = DropoutMask(draws, 4, 0.5, rng);
  for (int64_t j = 0; j < 4; ++j) {
    double sum = 0;
    for (int64_t i = 0; i < draws; ++i) sum += mask.at(i, j) * x[static_cast<size_t>(j)];
    EXPECT_NEAR(sum / draws / x[static_cast<size_t>(j)], 1.0, 0.02);
  }
}

TEST(HeadLossTest, PerfectPredictions) {
  HeadModel head = MakeHead({1, 1, 3}, Names(2), Activation::kSoftmax, 0.0, nullptr);
  head.bias = {40.0, -40.0};
  const LossGrad lg = HeadLossGrad(head, Tensor::Zeros({4, 1, 1, 3}), OneHot({0, 0, 0, 0}, 2), false, nullptr);
  EXPECT_NEAR(lg.loss, 0.0, 1e-12);
  for (double g : lg.grad_bias) EXPECT_NEAR(g, 0.0, 1e-12);
  head.activation = Activation::kSigmoid;
  const LossGrad sg = HeadLossGrad(head, Tensor::Zeros({4, 1, 1, 3}), OneHot({0, 0, 0, 0}, 2), false, nullptr);
  EXPECT_NEAR(sg.loss, 0.0, 1e-12);
}

TEST(HeadLossTest, UniformTwoClassIsLn2) {
  HeadModel head = MakeHead({1, 1, 3}, Names(2), Activation::kSoftmax, 0.0, nullptr);
  Rng rng(7);
  const LossGrad lg = HeadLossGrad(head, RandomTensor({5, 1, 1, 3}, rng), OneHot({0, 1, 1, 0, 1}, 2), false, nullptr);
  EXPECT_NEAR(lg.loss, std::log(2.0), 1e-12);
}

TEST(HeadLossTest, SmallHeadGradientCheck) {
  // F=6, K=3, N=4 by hand, central differences at h=1e-4.
  Rng init(8), data(9);
  HeadModel head = MakeHead({1, 1, 6}, Names(3), Activation::kSoftmax, 0.0, &init);
  const Tensor x = RandomTensor({4, 1, 1, 6}, data);
  const Tensor y = OneHot({2, 0, 1, 2}, 3);
  const LossGrad lg = HeadLossGrad(head, x, y, false, nullptr);
  const double h = 1e-4;
  for (size_t i = 0; i < head.weights.v.size(); ++i) {
    HeadModel up = head, down = head;
    up.weights.v[i] += h;
    down.weights.v[i] -= h;
    const double num = (HeadLossGrad(up, x, y, false, nullptr).loss -
                        HeadLossGrad(down, x, y, false, nullptr).loss) / (2 * h);
    EXPECT_NEAR(lg.grad_weights.v[i], num, 1e-4 * std::max(1e-3, std::fabs(num)));
  }
}

TEST(HeadLossTest, RandomConfigurationsGradientCheck) {
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    const testing::GradCheckResult r = testing::GradientCheck(seed);
    EXPECT_LT(r.rel_error, 1e-4) << r.description;
  }
}

TEST(TrainTest, SeparableGaussiansReachHighAccuracy) {
  const std::vector<double> mu = RandomMean(1280, 10, 0.3);
  const FeatureCache train = GaussianCache(40, 1280, 11, mu);
  const FeatureCache val = GaussianCache(10, 1280, 12, mu);
  TrainConfig cfg;
  cfg.epochs = 50;
  const TrainResult r = TrainHead(train, val, {Activation::kSoftmax, 0.5}, cfg);
  ASSERT_EQ(r.history.epochs.size(), 50u);
  EXPECT_GE(r.history.epochs.back().val_acc, 0.95);
  EXPECT_LT(r.history.epochs.back().train_loss, r.history.epochs.front().train_loss);
}

TEST(TrainTest, SigmoidHeadLearnsToo) {
  const std::vector<double> mu = RandomMean(64, 13, 0.5);
  TrainConfig cfg;
  cfg.epochs = 40;
  cfg.learning_rate = 0.01;
  const TrainResult r = TrainHead(GaussianCache(30, 64, 14, mu), GaussianCache(10, 64, 15, mu),
                                  {Activation::kSigmoid, 0.0}, cfg);
  EXPECT_GE(r.history.epochs.back().val_acc, 0.95);
}

TEST(TrainTest, ZeroLearningRateKeepsInitialWeights) {
  const std::vector<double> mu = RandomMean(16, 16, 1.0);
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.learning_rate = 0.0;
  const TrainResult r = TrainHead(GaussianCache(8, 16, 17, mu), GaussianCache(4, 16, 18, mu),
                                  {Activation::kSoftmax, 0.5}, cfg);
  Rng init(DeriveSeed(cfg.seed, {0}));
  const HeadModel fresh = MakeHead({1, 1, 16}, {"neg", "pos"}, Activation::kSoftmax, 0.5, &init);
  EXPECT_EQ(r.head, fresh);
  for (const EpochStats& s : r.history.epochs) {
    EXPECT_EQ(s.train_loss, r.history.epochs[0].train_loss);
    EXPECT_EQ(s.val_acc, r.history.epochs[0].val_acc);
  }
}

TEST(TrainTest, SameSeedIsBitIdentical) {
  const std::vector<double> mu = RandomMean(32, 19, 0.3);
  const FeatureCache train = GaussianCache(20, 32, 20, mu), val = GaussianCache(5, 32, 21, mu);
  TrainConfig cfg;
  cfg.epochs = 8;
  cfg.batch_size = 7;
  const TrainResult a = TrainHead(train, val, {Activation::kSoftmax, 0.5}, cfg);
  const TrainResult b = TrainHead(train, val, {Activation::kSoftmax, 0.5}, cfg);
  EXPECT_EQ(a.history, b.history);
  EXPECT_EQ(a.head, b.head);
  cfg.seed = 43;
  EXPECT_NE(TrainHead(train, val, {Activation::kSoftmax, 0.5}, cfg).history, a.history);
}

TEST(TrainTest, EpochsCycleThroughRounds) {
  const std::vector<double> mu = RandomMean(16, 40, 1.0);
  const std::vector<FeatureCache> rounds = {GaussianCache(8, 16, 41, mu), GaussianCache(8, 16, 42, mu)};
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.learning_rate = 0.0;
  const TrainResult r = TrainHead(rounds, GaussianCache(4, 16, 43, mu), {Activation::kSoftmax, 0.0}, cfg);
  const auto& e = r.history.epochs;
  EXPECT_EQ(e[0].train_loss, e[2].train_loss);
  EXPECT_EQ(e[1].train_loss, e[3].train_loss);
  EXPECT_NE(e[0].train_loss, e[1].train_loss);
  EXPECT_EQ(e[0].val_loss, e[1].val_loss);
}

TEST(TrainTest, FullBatchSgdLossIsMonotonic) {
  const std::vector<double> mu = RandomMean(24, 22, 0.5);
  const FeatureCache train = GaussianCache(25, 24, 23, mu);
  TrainConfig cfg;
  cfg.epochs = 60;
  cfg.optimizer = Optimizer::kSgd;
  cfg.learning_rate = 0.05;
  cfg.batch_size = static_cast<int>(train.rows());
  for (Activation act : {Activation::kSoftmax, Activation::kSigmoid}) {
    const TrainResult r = TrainHead(train, GaussianCache(5, 24, 24, mu), {act, 0.0}, cfg);
    for (size_t e = 1; e < r.history.epochs.size(); ++e) {
      EXPECT_LE(r.history.epochs[e].train_loss, r.history.epochs[e - 1].train_loss + 1e-6) << e;
    }
  }
}

TEST(TrainTest, Errors) {
  const std::vector<double> mu = RandomMean(4, 25, 1.0);
  const FeatureCache train = GaussianCache(5, 4, 26, mu);
  FeatureCache val = GaussianCache(2, 4, 27, mu);
  const HeadSpec spec{Activation::kSoftmax, 0.0};
  FeatureCache renamed = val;
  renamed.class_names = {"neg", "other"};
  EXPECT_EQ(CodeOf([&] { TrainHead(train, renamed, spec, {}); }), ErrorCode::kClassMismatch);

  FeatureCache one_class = train;
  one_class.labels = OneHot(std::vector<int64_t>(10, 0), 2);
  EXPECT_EQ(CodeOf([&] { TrainHead(one_class, val, spec, {}); }), ErrorCode::kDegenerateDataset);

  FeatureCache empty = val;
  empty.features = Tensor();
  empty.labels = Tensor();
  EXPECT_EQ(CodeOf([&] { TrainHead(train, empty, spec, {}); }), ErrorCode::kEmptyDataset);

  TrainConfig bad;
  bad.epochs = 0;
  EXPECT_EQ(CodeOf([&] { TrainHead(train, val, spec, bad); }), ErrorCode::kConfigError);
}

TEST(TrainConfigTest, JsonRoundTrip) {
  TrainConfig c;
  c.learning_rate = 0.02;
  c.epochs = 12;
  c.optimizer = Optimizer::kSgd;
  c.seed = 99;
  const nlohmann::json j = c;
  EXPECT_EQ(j.get<TrainConfig>(), c);
  EXPECT_EQ(CodeOf([] { nlohmann::json{{"optimizer", "rmsprop"}}.get<TrainConfig>(); }),
            ErrorCode::kConfigError);
}

TEST(ExportHeadTest, MatchesEvalForward) {
  Rng init(30), data(31);
  HeadModel head = MakeHead({7, 7, 1280}, Names(5), Activation::kSoftmax, 0.5, &init);
  for (double& b : head.bias) b = data.Uniform(-1, 1);
  const ModelGraph g = ExportHead(head);
  EXPECT_EQ(Validate(g), (Shape{kAnyBatch, 5}));
  EXPECT_EQ(g.nodes.size(), 4u);
  EXPECT_EQ(g.nodes[1].op, OpKind::kDropoutMarker);
  EXPECT_EQ(ClassLabels(g), Names(5));
  const Tensor x = RandomTensor({3, 7, 7, 1280}, data, 0, 2);
  const Tensor out = RunGraph(g, x);
  const Matrix ref = HeadForward(head, x, false, nullptr).probs;
  for (size_t i = 0; i < ref.v.size(); ++i) EXPECT_NEAR(out.data()[i], ref.v[i], 1e-6);
}

TEST(ExportHeadTest, SigmoidAudioHead) {
  Rng init(32), data(33);
  HeadModel head = MakeHead({3, 2, 1024}, Names(5), Activation::kSigmoid, 0.0, &init);
  const ModelGraph g = ExportHead(head);
  EXPECT_EQ(Validate(g), (Shape{kAnyBatch, 5}));
  const Tensor x = RandomTensor({2, 3, 2, 1024}, data, 0, 3);
  const Tensor out = RunGraph(g, x);
  const Matrix ref = HeadForward(head, x, false, nullptr).probs;
  for (size_t i = 0; i < ref.v.size(); ++i) EXPECT_NEAR(out.data()[i], ref.v[i], 1e-6);
}

}  // namespace
}  // namespace ttml
