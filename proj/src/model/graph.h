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

#ifndef TTML_MODEL_GRAPH_H_
#define TTML_MODEL_GRAPH_H_

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "tensor/kernels.h"
#include "tensor/tensor.h"

namespace ttml {

enum class OpKind {
  kConv2d,
  kDepthwiseConv2d,
  kDense,
  kGlobalAveragePool,
  kActivation,
  kAdd,
  kDropoutMarker,
  kFlatten,
};

std::string_view OpName(OpKind op);
OpKind ParseOp(std::string_view name);

// Only the fields relevant to a node's op are meaningful (and serialized).
struct NodeParams {
  int64_t stride = 1;
  Padding padding = Padding::kSame;
  Activation activation = Activation::kRelu;
  float dropout_rate = 0.0f;

  bool operator==(const NodeParams&) const = default;
};

struct GraphNode {
  std::string id;
  OpKind op = OpKind::kDropoutMarker;
  NodeParams params;
  std::vector<std::string> inputs;
  // conv/depthwise/dense: {kernel, bias}; bias may be omitted.
  std::vector<std::string> weight_refs;

  bool operator==(const GraphNode&) const = default;
};

// Reserved node id naming the graph input.
inline constexpr std::string_view kInputId = "input";

// Well-known metadata keys.
namespace meta {
inline constexpr std::string_view kClassLabels = "class_labels";  // JSON array
inline constexpr std::string_view kPreprocessing = "preprocessing_id";
inline constexpr std::string_view kTask = "task";
inline constexpr std::string_view kQuantization = "quantization";
inline constexpr std::string_view kRunConfig = "run_config";
}  // namespace meta

// Single-input single-output operator DAG stored in topological order. The
// last node is the output. input_shape carries kAnyBatch in position 0.
struct ModelGraph {
  std::string name;
  std::vector<GraphNode> nodes;
  std::map<std::string, Tensor> weights;
  Shape input_shape;
  std::map<std::string, std::string> metadata;

  bool operator==(const ModelGraph&) const = default;
};

// Per-node inferred shapes for a concrete batch size.
struct ShapeReport {
  std::vector<Shape> node_shapes;
  Shape output;
};

ShapeReport InferShapes(const ModelGraph& graph, int64_t batch);

// Full structural check plus shape inference. Returns the output shape with
// the batch dimension wildcarded. Throws kValidationError naming the node.
Shape Validate(const ModelGraph& graph);

// Graph minus its final `drop_last` nodes, unreferenced blobs removed.
ModelGraph Truncate(const ModelGraph& graph, int64_t drop_last);

// The final `keep_last` nodes rebuilt as a standalone graph whose input is
// the output of the node preceding them.
ModelGraph Tail(const ModelGraph& graph, int64_t keep_last);

// Feeds backbone output into head. Head metadata wins on key collisions.
ModelGraph Compose(const ModelGraph& backbone, const ModelGraph& head);

// One inert node; useful as the unit for Compose.
ModelGraph MakeIdentityGraph(Shape input_shape);

std::vector<std::string> ClassLabels(const ModelGraph& graph);
void SetClassLabels(ModelGraph& graph, const std::vector<std::string>& labels);

// Drops blobs not referenced by any node.
void PruneWeights(ModelGraph& graph);

}  // namespace ttml

#endif  // TTML_MODEL_GRAPH_H_
