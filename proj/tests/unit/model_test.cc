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

#include <filesystem>

#include "common/error.h"
#include "common/files.h"
#include "engine/engine.h"
#include "gtest/gtest.h"
#include "model/fixtures.h"
#include "model/graph.h"
#include "model/model_io.h"
#include "support/test_util.h"

namespace ttml {
namespace {

using testing::RandomTensor;
using testing::TempDir;

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInternal;
}

GraphNode Node(std::string id, OpKind op, std::vector<std::string> inputs,
               std::vector<std::string> weights = {}) {
  GraphNode n;
  n.id = std::move(id);
  n.op = op;
  n.inputs = std::move(inputs);
  n.weight_refs = std::move(weights);
  return n;
}

// input (?,4,4,2) -> conv -> relu -> gap -> dense(3) -> softmax
ModelGraph SmallChain(uint64_t seed) {
  Rng rng(seed);
  ModelGraph g;
  g.name = "chain";
  g.input_shape = {kAnyBatch, 4, 4, 2};
  g.nodes.push_back(Node("c", OpKind::kConv2d, {"input"}, {"c/k", "c/b"}));
  g.nodes.push_back(Node("r", OpKind::kActivation, {"c"}));
  g.nodes.push_back(Node("p", OpKind::kGlobalAveragePool, {"r"}));
  g.nodes.push_back(Node("d", OpKind::kDense, {"p"}, {"d/k", "d/b"}));
  g.nodes.push_back(Node("s", OpKind::kActivation, {"d"}));
  g.nodes.back().params.activation = Activation::kSoftmax;
  g.weights["c/k"] = RandomTensor({3, 3, 2, 5}, rng);
  g.weights["c/b"] = RandomTensor({5}, rng);
  g.weights["d/k"] = RandomTensor({5, 3}, rng);
  g.weights["d/b"] = RandomTensor({3}, rng);
  g.metadata["k"] = "v";
  return g;
}

TEST(ModelFormatTest, RoundTripIsIdentity) {
  TempDir dir("model_rt");
  ModelGraph g = SmallChain(1);
  g.weights["c/k"] = Tensor::Quantized({3, 3, 2, 5}, std::vector<int8_t>(90, -7), 0.125f);
  SetClassLabels(g, {"a", "b", "c"});
  SaveModel(g, dir / "m.ttml");
  ModelGraph back = LoadModel(dir / "m.ttml");
  EXPECT_EQ(back, g);
  EXPECT_TRUE(back.weights.at("c/k").is_quantized());
  EXPECT_EQ(back.weights.at("c/k").scale(), 0.125f);
  EXPECT_EQ(ClassLabels(back), (std::vector<std::string>{"a", "b", "c"}));
}

TEST(ModelFormatTest, WrongMagicIsFormatError) {
  std::vector<uint8_t> bytes = SerializeModel(SmallChain(1));
  bytes[0] = 'X';
  EXPECT_EQ(CodeOf([&] { DeserializeModel(bytes); }), ErrorCode::kFormatError);
}

TEST(ModelFormatTest, TruncatedBlobIsFormatError) {
  std::vector<uint8_t> bytes = SerializeModel(SmallChain(1));
  bytes.resize(bytes.size() - 3);
  EXPECT_EQ(CodeOf([&] { DeserializeModel(bytes); }), ErrorCode::kFormatError);
  bytes.resize(20);
  EXPECT_EQ(CodeOf([&] { DeserializeModel(bytes); }), ErrorCode::kFormatError);
}

TEST(ModelFormatTest, UnknownVersionIsFormatError) {
  std::vector<uint8_t> bytes = SerializeModel(SmallChain(1));
  bytes[4] = 9;
  EXPECT_EQ(CodeOf([&] { DeserializeModel(bytes); }), ErrorCode::kFormatError);
}

TEST(ModelFormatTest, MobileNetV2FixtureLoadsAndInfersFeatureShape) {
  TempDir dir("mnv2");
  SaveModel(MakeMobileNetV2Backbone(3), dir / "b.ttml");
  ModelGraph g = LoadModel(dir / "b.ttml");
  EXPECT_EQ(InferShapes(g, 1).output, (Shape{1, 7, 7, 1280}));
  EXPECT_EQ(Validate(g), (Shape{kAnyBatch, 7, 7, 1280}));
}

TEST(ModelFormatTest, WeightlessGraphHasNoBlobSection) {
  TempDir dir("weightless");
  ModelGraph g;
  g.name = "w";
  g.input_shape = {kAnyBatch, 2, 2, 1};
  g.nodes.push_back(Node("a", OpKind::kActivation, {"input"}));
  g.nodes.push_back(Node("b", OpKind::kGlobalAveragePool, {"a"}));
  g.nodes.push_back(Node("c", OpKind::kDropoutMarker, {"b"}));
  const uint64_t n = SaveModel(g, dir / "w.ttml");
  const std::string manifest = InspectModelFile(dir / "w.ttml");
  EXPECT_EQ(n, 12 + manifest.size());
}

TEST(ModelFormatTest, FileSizeIsDominatedByFloatBlobs) {
  TempDir dir("million");
  ModelGraph g;
  g.name = "big";
  g.input_shape = {kAnyBatch, 1000};
  g.nodes.push_back(Node("d", OpKind::kDense, {"input"}, {"w"}));
  g.weights["w"] = Tensor::Filled({1000, 1000}, 0.25f);
  const uint64_t n = SaveModel(g, dir / "big.ttml");
  const std::string manifest = InspectModelFile(dir / "big.ttml");
  EXPECT_EQ(n, 12 + manifest.size() + 4'000'000);
  EXPECT_EQ(std::filesystem::file_size(dir / "big.ttml"), n);
}

TEST(ModelFormatTest, SavingIsDeterministic) {
  TempDir dir("det");
  ModelGraph g = SmallChain(7);
  SaveModel(g, dir / "a.ttml");
  SaveModel(g, dir / "b.ttml");
  EXPECT_EQ(ReadFileBytes(dir / "a.ttml"), ReadFileBytes(dir / "b.ttml"));
}

TEST(ModelFormatTest, OrphanBlobsAreNotWritten) {
  ModelGraph g = SmallChain(1);
  g.weights["orphan"] = Tensor::Zeros({10});
  ModelGraph back = DeserializeModel(SerializeModel(g));
  EXPECT_FALSE(back.weights.count("orphan"));
}

TEST(ValidateTest, DenseOnRankFourIsRejected) {
  ModelGraph g;
  g.name = "bad";
  g.input_shape = {kAnyBatch, 2, 2, 3};
  g.nodes.push_back(Node("d", OpKind::kDense, {"input"}, {"w"}));
  g.weights["w"] = Tensor::Zeros({3, 2});
  try {
    Validate(g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kValidationError);
    EXPECT_NE(std::string(e.what()).find("'d'"), std::string::npos);
  }
}

TEST(ValidateTest, EmptyGraphAndMissingBlob) {
  ModelGraph g;
  g.input_shape = {kAnyBatch, 3};
  EXPECT_EQ(CodeOf([&] { Validate(g); }), ErrorCode::kValidationError);
  g.nodes.push_back(Node("d", OpKind::kDense, {"input"}, {"nope"}));
  EXPECT_EQ(CodeOf([&] { Validate(g); }), ErrorCode::kValidationError);
}

TEST(ValidateTest, ForwardReferenceIsRejected) {
  ModelGraph g;
  g.input_shape = {kAnyBatch, 3};
  g.nodes.push_back(Node("a", OpKind::kActivation, {"b"}));
  g.nodes.push_back(Node("b", OpKind::kActivation, {"input"}));
  EXPECT_EQ(CodeOf([&] { Validate(g); }), ErrorCode::kValidationError);
}

TEST(TruncateTest, DropOneFromChain) {
  ModelGraph g = SmallChain(2);
  ModelGraph t = Truncate(g, 1);
  EXPECT_EQ(t.nodes.size(), g.nodes.size() - 1);
  EXPECT_EQ(Validate(t), (Shape{kAnyBatch, 3}));
  ModelGraph t3 = Truncate(g, 3);
  EXPECT_EQ(Validate(t3), (Shape{kAnyBatch, 4, 4, 5}));
  EXPECT_FALSE(t3.weights.count("d/k"));
  EXPECT_TRUE(t3.weights.count("c/k"));
}

TEST(TruncateTest, YamnetDropThreeGivesPatchFeatures) {
  ModelGraph g = MakeYamnetFixture(1, /*include_top=*/true);
  EXPECT_EQ(Validate(g), (Shape{kAnyBatch, 521}));
  ModelGraph t = Truncate(g, 3);
  EXPECT_EQ(Validate(t), (Shape{kAnyBatch, 3, 2, 1024}));
  const ModelGraph headless = MakeYamnetFixture(1, false);
  EXPECT_EQ(t.nodes, headless.nodes);
  EXPECT_EQ(t.weights, headless.weights);
}

TEST(TruncateTest, BoundaryDropCounts) {
  ModelGraph g = SmallChain(2);
  const auto n = static_cast<int64_t>(g.nodes.size());
  EXPECT_EQ(CodeOf([&] { Truncate(g, n); }), ErrorCode::kInvalidTruncation);
  EXPECT_EQ(CodeOf([&] { Truncate(g, 0); }), ErrorCode::kInvalidTruncation);
}

TEST(TruncateTest, CutInsideResidualBlockIsRejected) {
  // input -> a -> b ; input -> shortcut ; add(b, shortcut)
  ModelGraph g;
  g.name = "res";
  g.input_shape = {kAnyBatch, 4};
  g.nodes.push_back(Node("a", OpKind::kActivation, {"input"}));
  g.nodes.push_back(Node("b", OpKind::kActivation, {"a"}));
  g.nodes.push_back(Node("shortcut", OpKind::kDropoutMarker, {"input"}));
  g.nodes.push_back(Node("sum", OpKind::kAdd, {"b", "shortcut"}));
  Validate(g);
  EXPECT_EQ(CodeOf([&] { Truncate(g, 1); }), ErrorCode::kInvalidTruncation);
  EXPECT_EQ(Validate(Truncate(g, 2)), (Shape{kAnyBatch, 4}));
}

TEST(TruncateTest, ComposesAdditively) {
  ModelGraph g = MakeYamnetFixture(4, true);
  for (int64_t a = 1; a <= 3; ++a) {
    for (int64_t b = 1; b <= 3; ++b) {
      EXPECT_EQ(Truncate(g, a + b), Truncate(Truncate(g, a), b)) << a << "+" << b;
    }
  }
}

TEST(ComposeTest, IdentityBackboneLeavesHeadUnchanged) {
  ModelGraph head = SmallChain(5);
  ModelGraph composed = Compose(MakeIdentityGraph(head.input_shape), head);
  Rng rng(6);
  Tensor x = RandomTensor({3, 4, 4, 2}, rng);
  EXPECT_EQ(RunGraph(composed, x), RunGraph(head, x));
  EXPECT_EQ(composed.metadata.at("k"), "v");
}

TEST(ComposeTest, MobileNetV2BackboneTakesFigureOneHead) {
  ModelGraph head;
  head.name = "head";
  head.input_shape = {kAnyBatch, 7, 7, 1280};
  head.nodes.push_back(Node("gap", OpKind::kGlobalAveragePool, {"input"}));
  head.nodes.push_back(Node("drop", OpKind::kDropoutMarker, {"gap"}));
  head.nodes.back().params.dropout_rate = 0.5f;
  head.nodes.push_back(Node("dense", OpKind::kDense, {"drop"}, {"w", "b"}));
  head.nodes.push_back(Node("softmax", OpKind::kActivation, {"dense"}));
  head.nodes.back().params.activation = Activation::kSoftmax;
  head.weights["w"] = Tensor::Zeros({1280, 5});
  head.weights["b"] = Tensor::Zeros({5});
  ModelGraph full = Compose(MakeMobileNetV2Backbone(1), head);
  EXPECT_EQ(Validate(full), (Shape{kAnyBatch, 5}));
}

TEST(ComposeTest, MismatchedFeatureShapeThrows) {
  ModelGraph head = MakeIdentityGraph({kAnyBatch, 7, 7, 1280});
  EXPECT_EQ(CodeOf([&] { Compose(MakeYamnetFixture(1, false), head); }), ErrorCode::kShapeMismatch);
}

TEST(ComposeTest, CollidingIdsAreRenamed) {
  ModelGraph a = Truncate(SmallChain(1), 2);   // ends (?,5)
  ModelGraph b;
  b.name = "b";
  b.input_shape = {kAnyBatch, 5};
  b.nodes.push_back(Node("c", OpKind::kDense, {"input"}, {"c/k"}));
  b.weights["c/k"] = Tensor::Filled({5, 2}, 1.0f);
  ModelGraph ab = Compose(a, b);
  EXPECT_EQ(ab.nodes.size(), a.nodes.size() + 1);
  EXPECT_EQ(ab.weights.size(), a.weights.size() + 1);
  EXPECT_EQ(Validate(ab), (Shape{kAnyBatch, 2}));
}

TEST(ComposeTest, AssociativeWithIdentity) {
  ModelGraph g = SmallChain(8);
  ModelGraph id4 = MakeIdentityGraph(g.input_shape);
  ModelGraph id3 = MakeIdentityGraph({kAnyBatch, 3});
  Rng rng(9);
  Tensor x = RandomTensor({2, 4, 4, 2}, rng);
  const Tensor left = RunGraph(Compose(Compose(id4, g), id3), x);
  const Tensor right = RunGraph(Compose(id4, Compose(g, id3)), x);
  EXPECT_EQ(left, right);
  EXPECT_EQ(left, RunGraph(g, x));
}

}  // namespace
}  // namespace ttml
