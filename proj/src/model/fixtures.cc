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

#include "model/fixtures.h"

#include <cmath>
#include <string>

#include "common/error.h"
#include "common/rng.h"

namespace ttml {
namespace {

class Builder {
 public:
  Builder(std::string name, Shape input, uint64_t seed) : rng_(seed) {
    graph_.name = std::move(name);
    graph_.input_shape = std::move(input);
    channels_ = graph_.input_shape.back();
  }

  int64_t channels() const { return channels_; }
  const std::string& last() const { return last_; }

  void Conv(int64_t k, int64_t out, int64_t stride, bool linear = false) {
    const std::string id = NextId("conv");
    const double std_dev = std::sqrt((linear ? 1.0 : 2.0) / static_cast<double>(k * k * channels_));
    AddParametric(id, OpKind::kConv2d, Random({k, k, channels_, out}, std_dev), out, stride);
    channels_ = out;
  }

  void Depthwise(int64_t k, int64_t stride) {
    const std::string id = NextId("dw");
    const double std_dev = std::sqrt(2.0 / static_cast<double>(k * k));
    AddParametric(id, OpKind::kDepthwiseConv2d, Random({k, k, channels_, 1}, std_dev), channels_,
                  stride);
  }

  void Dense(int64_t out) {
    const std::string id = NextId("dense");
    const double std_dev = std::sqrt(1.0 / static_cast<double>(channels_));
    AddParametric(id, OpKind::kDense, Random({channels_, out}, std_dev), out, 1);
    channels_ = out;
  }

  void Act(Activation a) {
    GraphNode n = Simple(NextId(std::string(ActivationName(a))), OpKind::kActivation);
    n.params.activation = a;
    Push(std::move(n));
  }

  void Pool() { Push(Simple(NextId("gap"), OpKind::kGlobalAveragePool)); }

  void Flatten(int64_t features) {
    Push(Simple(NextId("flatten"), OpKind::kFlatten));
    channels_ = features;
  }

  void AddFrom(const std::string& skip) {
    GraphNode n = Simple(NextId("add"), OpKind::kAdd);
    n.inputs.push_back(skip);
    Push(std::move(n));
  }

  ModelGraph Finish() {
    Validate(graph_);
    return std::move(graph_);
  }

 private:
  std::string NextId(const std::string& kind) { return kind + "_" + std::to_string(counter_++); }

  Tensor Random(Shape shape, double std_dev) {
    std::vector<float> v(static_cast<size_t>(NumElements(shape)));
    for (float& x : v) x = static_cast<float>(rng_.Normal() * std_dev);
    return Tensor::FromData(std::move(shape), std::move(v));
  }

  GraphNode Simple(std::string id, OpKind op) {
    GraphNode n;
    n.id = std::move(id);
    n.op = op;
    n.inputs = {last_};
    return n;
  }

  void AddParametric(const std::string& id, OpKind op, Tensor kernel, int64_t width, int64_t stride) {
    GraphNode n = Simple(id, op);
    n.params.stride = stride;
    n.weight_refs = {id + "/kernel", id + "/bias"};
    graph_.weights.emplace(id + "/kernel", std::move(kernel));
    graph_.weights.emplace(id + "/bias", Tensor::Zeros({width}));
    Push(std::move(n));
  }

  void Push(GraphNode n) {
    last_ = n.id;
    graph_.nodes.push_back(std::move(n));
  }

  ModelGraph graph_;
  Rng rng_;
  int64_t channels_ = 0;
  int counter_ = 0;
  std::string last_{kInputId};
};

}  // namespace

ModelGraph MakeMobileNetV2Backbone(uint64_t seed) {
  Builder b("mobilenet_v2_backbone", {kAnyBatch, 224, 224, 3}, seed);
  b.Conv(3, 32, 2);
  b.Act(Activation::kRelu6);
  struct Stage { int64_t expand, out, repeats, stride; };
  constexpr Stage kStages[] = {{1, 16, 1, 1},  {6, 24, 2, 2},  {6, 32, 3, 2}, {6, 64, 4, 2},
                               {6, 96, 3, 1},  {6, 160, 3, 2}, {6, 320, 1, 1}};
  for (const Stage& s : kStages) {
    for (int64_t r = 0; r < s.repeats; ++r) {
      const int64_t stride = r == 0 ? s.stride : 1;
      const std::string block_in = b.last();
      const int64_t in_c = b.channels();
      if (s.expand != 1) {
        b.Conv(1, in_c * s.expand, 1);
        b.Act(Activation::kRelu6);
      }
      b.Depthwise(3, stride);
      b.Act(Activation::kRelu6);
      b.Conv(1, s.out, 1, /*linear=*/true);
      if (stride == 1 && in_c == s.out) b.AddFrom(block_in);
    }
  }
  b.Conv(1, 1280, 1);
  b.Act(Activation::kRelu6);
  return b.Finish();
}

ModelGraph MakeYamnetFixture(uint64_t seed, bool include_top) {
  Builder b(include_top ? "yamnet" : "yamnet_backbone", {kAnyBatch, 96, 64, 1}, seed);
  b.Conv(3, 32, 2);
  b.Act(Activation::kRelu);
  struct Layer { int64_t stride, out; };
  constexpr Layer kLayers[] = {{1, 64},  {2, 128}, {1, 128}, {2, 256}, {1, 256},
                               {2, 512}, {1, 512}, {1, 512}, {1, 512}, {1, 512},
                               {1, 512}, {2, 1024}, {1, 1024}};
  for (const Layer& l : kLayers) {
    b.Depthwise(3, l.stride);
    b.Act(Activation::kRelu);
    b.Conv(1, l.out, 1);
    b.Act(Activation::kRelu);
  }
  if (include_top) {
    b.Pool();
    b.Dense(521);
    b.Act(Activation::kSigmoid);
  }
  return b.Finish();
}

ModelGraph MakeDenseClassifierFixture(uint64_t seed) {
  Builder b("dense_classifier", {kAnyBatch, 16, 16, 8}, seed);
  b.Conv(3, 64, 1);
  b.Act(Activation::kRelu);
  b.Flatten(16 * 16 * 64);
  b.Dense(64);
  b.Act(Activation::kRelu);
  b.Dense(10);
  b.Act(Activation::kSoftmax);
  return b.Finish();
}

ModelGraph MakeTinyBackbone(uint64_t seed, bool audio) {
  Builder b(audio ? "tiny_audio_backbone" : "tiny_image_backbone",
            audio ? Shape{kAnyBatch, 96, 64, 1} : Shape{kAnyBatch, 224, 224, 3}, seed);
  b.Conv(3, 16, audio ? 2 : 4);
  b.Act(Activation::kRelu);
  for (int64_t width : {32, 64}) {
    b.Depthwise(3, 2);
    b.Act(Activation::kRelu);
    b.Conv(1, width, 1);
    b.Act(Activation::kRelu);
  }
  return b.Finish();
}

ModelGraph MakeFixture(std::string_view kind, uint64_t seed) {
  if (kind == "tiny_image") return MakeTinyBackbone(seed, false);
  if (kind == "tiny_audio") return MakeTinyBackbone(seed, true);
  if (kind == "mobilenet_v2") return MakeMobileNetV2Backbone(seed);
  if (kind == "yamnet") return MakeYamnetFixture(seed, false);
  if (kind == "yamnet_top") return MakeYamnetFixture(seed, true);
  if (kind == "dense_classifier") return MakeDenseClassifierFixture(seed);
  Fail(ErrorCode::kConfigError, "unknown fixture kind '" + std::string(kind) + "'");
}

}  // namespace ttml
