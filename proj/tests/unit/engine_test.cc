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

#include <chrono>

#include "common/error.h"
#include "engine/engine.h"
#include "gtest/gtest.h"
#include "model/fixtures.h"
#include "model/graph.h"
#include "quant/quantizer.h"
#include "support/test_util.h"

namespace ttml {
namespace {

using testing::MaxAbsDiff;
using testing::RandomTensor;

TEST(EngineTest, IdentityGraphPassesInputThrough) {
  Rng rng(1);
  Tensor x = RandomTensor({3, 5, 2}, rng);
  EXPECT_EQ(RunGraph(MakeIdentityGraph({kAnyBatch, 5, 2}), x), x);
}

TEST(EngineTest, MobileNetV2FixtureProducesFeatureMaps) {
  Rng rng(2);
  const auto start = std::chrono::steady_clock::now();
  Tensor y = RunGraph(MakeMobileNetV2Backbone(1), RandomTensor({2, 224, 224, 3}, rng, 0.0, 1.0));
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_EQ(y.shape(), (Shape{2, 7, 7, 1280}));
  RecordProperty("seconds", std::to_string(secs));
  y.CheckFinite("mobilenet features");
}

TEST(EngineTest, RejectsWrongInputShape) {
  try {
    RunGraph(MakeIdentityGraph({kAnyBatch, 5}), Tensor::Zeros({1, 6}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kShapeMismatch);
  }
}

TEST(EngineTest, BatchEqualsStackedSingles) {
  ModelGraph g = MakeYamnetFixture(3, true);
  ExecutionPlan plan(g);
  Rng rng(4);
  Tensor x = RandomTensor({3, 96, 64, 1}, rng, -7.0, 2.0);
  Tensor batched = plan.Run(x);
  std::vector<Tensor> singles;
  for (int64_t i = 0; i < 3; ++i) singles.push_back(plan.Run(x.Slice(i, i + 1)));
  EXPECT_LE(MaxAbsDiff(batched, Stack(singles)), 1e-5);
  EXPECT_EQ(plan.Run(x, 3), batched);
}

TEST(EngineTest, TruncateThenComposeWithTailReproducesGraph) {
  ModelGraph g = MakeYamnetFixture(5, true);
  Rng rng(6);
  Tensor x = RandomTensor({2, 96, 64, 1}, rng, -7.0, 2.0);
  const Tensor want = RunGraph(g, x);
  for (int64_t k : {1, 2, 3, 4, 7, 12}) {
    ModelGraph rebuilt = Compose(Truncate(g, k), Tail(g, k));
    EXPECT_LE(MaxAbsDiff(RunGraph(rebuilt, x), want), 1e-5) << "k=" << k;
  }
}

TEST(EngineTest, QuantizedRunEqualsDequantizedFloatGraph) {
  ModelGraph g = MakeDenseClassifierFixture(7);
  ModelGraph q = QuantizeModel(g);
  ModelGraph deq = q;
  for (auto& [id, t] : deq.weights) t = DequantizeBlob(t);
  Rng rng(8);
  Tensor x = RandomTensor({4, 16, 16, 8}, rng);
  EXPECT_EQ(RunGraph(q, x), RunGraph(deq, x));
}

TEST(EngineTest, QuantizedTopOneAgreesWithFloat) {
  ModelGraph g = MakeDenseClassifierFixture(9);
  ExecutionPlan fp(g);
  ExecutionPlan qp(QuantizeModel(g));
  Rng rng(10);
  Tensor x = RandomTensor({100, 16, 16, 8}, rng);
  Tensor a = fp.Run(x), b = qp.Run(x);
  int agree = 0;
  for (int64_t i = 0; i < 100; ++i) {
    agree += ArgMax(a.Slice(i, i + 1).data()) == ArgMax(b.Slice(i, i + 1).data());
  }
  EXPECT_GE(agree, 98);
}

ModelGraph LogitHead(std::vector<float> bias, Activation act) {
  ModelGraph g;
  g.name = "logits";
  g.input_shape = {kAnyBatch, 2};
  GraphNode d;
  d.id = "d";
  d.op = OpKind::kDense;
  d.inputs = {"input"};
  d.weight_refs = {"w", "b"};
  GraphNode a;
  a.id = "a";
  a.op = OpKind::kActivation;
  a.params.activation = act;
  a.inputs = {"d"};
  g.nodes = {d, a};
  const auto k = static_cast<int64_t>(bias.size());
  g.weights["w"] = Tensor::Zeros({2, k});
  g.weights["b"] = Tensor::FromData({k}, std::move(bias));
  return g;
}

TEST(PredictTest, SoftmaxProbabilitiesSumToOne) {
  ModelGraph g = LogitHead({0.1f, -2.0f, 0.7f, 3.0f, 0.0f}, Activation::kSoftmax);
  SetClassLabels(g, {"a", "b", "c", "d", "e"});
  Prediction p = PredictProbs(g, Tensor::Filled({1, 2}, 1.0f));
  double sum = 0.0;
  for (float v : p.probs) sum += v;
  EXPECT_NEAR(sum, 1.0, 1e-6);
  EXPECT_EQ(p.label, "d");
}

TEST(PredictTest, SigmoidHeadArgmaxesScores) {
  ModelGraph g = LogitHead({-1.0f, 0.5f, 2.0f}, Activation::kSigmoid);
  SetClassLabels(g, {"x", "y", "z"});
  Prediction p = PredictProbs(g, Tensor::Zeros({1, 2}));
  EXPECT_EQ(p.index, 2u);
  EXPECT_EQ(p.label, "z");
}

TEST(PredictTest, MissingOrMismatchedLabels) {
  ModelGraph g = LogitHead({0.0f, 1.0f}, Activation::kSoftmax);
  auto code = [&] {
    try {
      PredictProbs(g, Tensor::Zeros({1, 2}));
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kInternal;
  };
  EXPECT_EQ(code(), ErrorCode::kMissingLabels);
  SetClassLabels(g, {"only"});
  EXPECT_EQ(code(), ErrorCode::kMissingLabels);
}

TEST(PredictTest, TiesGoToLowestIndex) {
  const std::vector<float> v = {0.2f, 0.4f, 0.4f};
  EXPECT_EQ(ArgMax(v), 1u);
}

}  // namespace
}  // namespace ttml
