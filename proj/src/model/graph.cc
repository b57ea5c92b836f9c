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

#include "model/graph.h"

#include <algorithm>
#include <set>
#include <unordered_map>

#include "common/error.h"
#include "json.hpp"

namespace ttml {

std::string_view OpName(OpKind op) {
  switch (op) {
    case OpKind::kConv2d: return "conv2d";
    case OpKind::kDepthwiseConv2d: return "depthwise_conv2d";
    case OpKind::kDense: return "dense";
    case OpKind::kGlobalAveragePool: return "global_average_pool";
    case OpKind::kActivation: return "activation";
    case OpKind::kAdd: return "add";
    case OpKind::kDropoutMarker: return "dropout_marker";
    case OpKind::kFlatten: return "flatten";
  }
  return "?";
}

OpKind ParseOp(std::string_view name) {
  for (OpKind op : {OpKind::kConv2d, OpKind::kDepthwiseConv2d, OpKind::kDense,
                    OpKind::kGlobalAveragePool, OpKind::kActivation, OpKind::kAdd,
                    OpKind::kDropoutMarker, OpKind::kFlatten}) {
    if (OpName(op) == name) return op;
  }
  Fail(ErrorCode::kFormatError, "unknown op '" + std::string(name) + "'");
}

namespace {

[[noreturn]] void Invalid(const GraphNode& node, const std::string& what) {
  Fail(ErrorCode::kValidationError, "node '" + node.id + "' (" + std::string(OpName(node.op)) +
                                        "): " + what);
}

const Tensor& Blob(const ModelGraph& g, const GraphNode& node, size_t i) {
  auto it = g.weights.find(node.weight_refs[i]);
  if (it == g.weights.end()) Invalid(node, "missing weight blob '" + node.weight_refs[i] + "'");
  return it->second;
}

void ExpectCounts(const GraphNode& node, size_t inputs, size_t min_w, size_t max_w) {
  if (node.inputs.size() != inputs) {
    Invalid(node, "expects " + std::to_string(inputs) + " input(s), has " +
                      std::to_string(node.inputs.size()));
  }
  if (node.weight_refs.size() < min_w || node.weight_refs.size() > max_w) {
    Invalid(node, "unexpected number of weight refs: " + std::to_string(node.weight_refs.size()));
  }
}

void CheckBias(const ModelGraph& g, const GraphNode& node, int64_t width) {
  if (node.weight_refs.size() < 2) return;
  const Tensor& b = Blob(g, node, 1);
  if (b.rank() != 1 || b.dim(0) != width) {
    Invalid(node, "bias " + ShapeToString(b.shape()) + " does not match width " +
                      std::to_string(width));
  }
}

Shape InferNode(const ModelGraph& g, const GraphNode& node, const std::vector<Shape>& ins) {
  switch (node.op) {
    case OpKind::kConv2d:
    case OpKind::kDepthwiseConv2d: {
      ExpectCounts(node, 1, 1, 2);
      const Shape& in = ins[0];
      if (in.size() != 4) Invalid(node, "expects NHWC input, got " + ShapeToString(in));
      if (node.params.stride < 1) Invalid(node, "stride must be >= 1");
      const Tensor& k = Blob(g, node, 0);
      if (k.rank() != 4) Invalid(node, "kernel must be rank 4");
      int64_t out_c;
      if (node.op == OpKind::kConv2d) {
        if (k.dim(2) != in[3]) {
          Invalid(node, "kernel " + ShapeToString(k.shape()) + " vs input channels " +
                            std::to_string(in[3]));
        }
        out_c = k.dim(3);
      } else {
        if (k.dim(2) != in[3] || k.dim(3) != 1) {
          Invalid(node, "depthwise kernel " + ShapeToString(k.shape()) + " vs input channels " +
                            std::to_string(in[3]));
        }
        out_c = in[3];
      }
      CheckBias(g, node, out_c);
      if (node.params.padding == Padding::kValid && (in[1] < k.dim(0) || in[2] < k.dim(1))) {
        Invalid(node, "valid padding with kernel larger than input " + ShapeToString(in));
      }
      return {in[0], ConvOutputSize(in[1], k.dim(0), node.params.stride, node.params.padding),
              ConvOutputSize(in[2], k.dim(1), node.params.stride, node.params.padding), out_c};
    }
    case OpKind::kDense: {
      ExpectCounts(node, 1, 1, 2);
      const Shape& in = ins[0];
      if (in.size() != 2) {
        Invalid(node, "expects (N, F) input, got " + ShapeToString(in) +
                          "; insert flatten or global_average_pool");
      }
      const Tensor& w = Blob(g, node, 0);
      if (w.rank() != 2 || w.dim(0) != in[1]) {
        Invalid(node, "weights " + ShapeToString(w.shape()) + " vs input " + ShapeToString(in));
      }
      CheckBias(g, node, w.dim(1));
      return {in[0], w.dim(1)};
    }
    case OpKind::kGlobalAveragePool: {
      ExpectCounts(node, 1, 0, 0);
      if (ins[0].size() != 4) Invalid(node, "expects rank-4 input, got " + ShapeToString(ins[0]));
      return {ins[0][0], ins[0][3]};
    }
    case OpKind::kActivation:
      ExpectCounts(node, 1, 0, 0);
      return ins[0];
    case OpKind::kAdd:
      ExpectCounts(node, 2, 0, 0);
      if (ins[0] != ins[1]) {
        Invalid(node, "operand shapes " + ShapeToString(ins[0]) + " and " + ShapeToString(ins[1]));
      }
      return ins[0];
    case OpKind::kDropoutMarker:
      ExpectCounts(node, 1, 0, 0);
      if (!(node.params.dropout_rate >= 0.0f && node.params.dropout_rate < 1.0f)) {
        Invalid(node, "dropout rate must lie in [0, 1)");
      }
      return ins[0];
    case OpKind::kFlatten: {
      ExpectCounts(node, 1, 0, 0);
      if (ins[0].size() < 2) Invalid(node, "expects rank >= 2");
      int64_t f = 1;
      for (size_t i = 1; i < ins[0].size(); ++i) f *= ins[0][i];
      return {ins[0][0], f};
    }
  }
  Invalid(node, "unsupported op");
}

}  // namespace

ShapeReport InferShapes(const ModelGraph& graph, int64_t batch) {
  if (graph.nodes.empty()) Fail(ErrorCode::kValidationError, "graph '" + graph.name + "' has no nodes");
  if (graph.input_shape.size() < 2 || graph.input_shape[0] != kAnyBatch) {
    Fail(ErrorCode::kValidationError,
         "input shape must be (?, ...), got " + ShapeToString(graph.input_shape));
  }
  for (size_t i = 1; i < graph.input_shape.size(); ++i) {
    if (graph.input_shape[i] <= 0) {
      Fail(ErrorCode::kValidationError, "input shape " + ShapeToString(graph.input_shape) +
                                            " has a non-positive dimension");
    }
  }
  Shape in = graph.input_shape;
  in[0] = batch;

  std::unordered_map<std::string, size_t> index;
  std::set<std::string> consumed;
  ShapeReport report;
  report.node_shapes.reserve(graph.nodes.size());
  for (size_t i = 0; i < graph.nodes.size(); ++i) {
    const GraphNode& node = graph.nodes[i];
    if (node.id.empty() || node.id == kInputId) Invalid(node, "reserved or empty node id");
    if (index.count(node.id)) Invalid(node, "duplicate node id");
    std::vector<Shape> ins;
    for (const std::string& ref : node.inputs) {
      if (ref == kInputId) {
        ins.push_back(in);
      } else {
        auto it = index.find(ref);
        if (it == index.end()) Invalid(node, "input '" + ref + "' does not precede this node");
        ins.push_back(report.node_shapes[it->second]);
      }
      consumed.insert(ref);
    }
    report.node_shapes.push_back(InferNode(graph, node, ins));
    index.emplace(node.id, i);
  }
  if (!consumed.count(std::string(kInputId))) {
    Fail(ErrorCode::kValidationError, "no node consumes the graph input");
  }
  for (size_t i = 0; i + 1 < graph.nodes.size(); ++i) {
    if (!consumed.count(graph.nodes[i].id)) {
      Invalid(graph.nodes[i], "result is never consumed; graph would have multiple outputs");
    }
  }
  report.output = report.node_shapes.back();
  return report;
}

Shape Validate(const ModelGraph& graph) {
  Shape out = InferShapes(graph, 1).output;
  out[0] = kAnyBatch;
  return out;
}

void PruneWeights(ModelGraph& graph) {
  std::set<std::string> used;
  for (const GraphNode& n : graph.nodes) used.insert(n.weight_refs.begin(), n.weight_refs.end());
  std::erase_if(graph.weights, [&](const auto& kv) { return !used.count(kv.first); });
}

ModelGraph Truncate(const ModelGraph& graph, int64_t drop_last) {
  const int64_t total = static_cast<int64_t>(graph.nodes.size());
  if (drop_last < 1 || drop_last >= total) {
    Fail(ErrorCode::kInvalidTruncation, "cannot drop " + std::to_string(drop_last) + " of " +
                                            std::to_string(total) + " nodes");
  }
  ModelGraph out = graph;
  out.nodes.resize(static_cast<size_t>(total - drop_last));
  std::set<std::string> consumed;
  for (const GraphNode& n : out.nodes) consumed.insert(n.inputs.begin(), n.inputs.end());
  for (size_t i = 0; i + 1 < out.nodes.size(); ++i) {
    if (!consumed.count(out.nodes[i].id)) {
      Fail(ErrorCode::kInvalidTruncation, "cut after '" + out.nodes.back().id +
                                              "' leaves '" + out.nodes[i].id + "' dangling");
    }
  }
  PruneWeights(out);
  out.metadata.erase(std::string(meta::kClassLabels));
  Validate(out);
  return out;
}

ModelGraph Tail(const ModelGraph& graph, int64_t keep_last) {
  const int64_t total = static_cast<int64_t>(graph.nodes.size());
  if (keep_last < 1 || keep_last > total) {
    Fail(ErrorCode::kInvalidTruncation, "cannot keep " + std::to_string(keep_last) + " of " +
                                            std::to_string(total) + " nodes");
  }
  if (keep_last == total) return graph;
  const size_t cut = static_cast<size_t>(total - keep_last);
  const ShapeReport shapes = InferShapes(graph, 1);
  const std::string& boundary = graph.nodes[cut - 1].id;
  std::set<std::string> suffix_ids;
  ModelGraph out;
  out.name = graph.name + "/tail" + std::to_string(keep_last);
  out.metadata = graph.metadata;
  out.input_shape = shapes.node_shapes[cut - 1];
  out.input_shape[0] = kAnyBatch;
  for (size_t i = cut; i < graph.nodes.size(); ++i) {
    GraphNode node = graph.nodes[i];
    for (std::string& ref : node.inputs) {
      if (suffix_ids.count(ref)) continue;
      if (ref != boundary) {
        Fail(ErrorCode::kInvalidTruncation,
             "node '" + node.id + "' reaches across the cut to '" + ref + "'");
      }
      ref = std::string(kInputId);
    }
    for (const std::string& w : node.weight_refs) out.weights.emplace(w, graph.weights.at(w));
    suffix_ids.insert(node.id);
    out.nodes.push_back(std::move(node));
  }
  Validate(out);
  return out;
}

ModelGraph Compose(const ModelGraph& backbone, const ModelGraph& head) {
  Shape produced = Validate(backbone);
  Validate(head);
  if (produced != head.input_shape) {
    Fail(ErrorCode::kShapeMismatch, "backbone produces " + ShapeToString(produced) +
                                        " but head expects " + ShapeToString(head.input_shape));
  }
  ModelGraph out = backbone;
  out.name = backbone.name + "+" + head.name;
  std::set<std::string> ids;
  for (const GraphNode& n : backbone.nodes) ids.insert(n.id);
  auto fresh = [](const std::string& base, const auto& taken) {
    std::string id = "head/" + base;
    while (taken.count(id)) id = "head/" + id;
    return id;
  };
  std::map<std::string, std::string> node_rename;
  std::map<std::string, std::string> blob_rename;
  for (const auto& [id, t] : head.weights) {
    std::string nid = out.weights.count(id) ? fresh(id, out.weights) : id;
    blob_rename[id] = nid;
    out.weights.emplace(nid, t);
  }
  const std::string tail = backbone.nodes.back().id;
  for (GraphNode node : head.nodes) {
    std::string nid = ids.count(node.id) ? fresh(node.id, ids) : node.id;
    node_rename[node.id] = nid;
    node.id = nid;
    ids.insert(nid);
    for (std::string& ref : node.inputs) ref = ref == kInputId ? tail : node_rename.at(ref);
    for (std::string& w : node.weight_refs) w = blob_rename.at(w);
    out.nodes.push_back(std::move(node));
  }
  for (const auto& [k, v] : head.metadata) out.metadata[k] = v;
  Validate(out);
  return out;
}

ModelGraph MakeIdentityGraph(Shape input_shape) {
  ModelGraph g;
  g.name = "identity";
  g.input_shape = std::move(input_shape);
  g.input_shape.at(0) = kAnyBatch;
  GraphNode n;
  n.id = "identity";
  n.op = OpKind::kDropoutMarker;
  n.inputs = {std::string(kInputId)};
  g.nodes.push_back(n);
  return g;
}

std::vector<std::string> ClassLabels(const ModelGraph& graph) {
  auto it = graph.metadata.find(std::string(meta::kClassLabels));
  if (it == graph.metadata.end()) return {};
  try {
    return nlohmann::json::parse(it->second).get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kFormatError, std::string("malformed class_labels metadata: ") + e.what());
  }
}

void SetClassLabels(ModelGraph& graph, const std::vector<std::string>& labels) {
  graph.metadata[std::string(meta::kClassLabels)] = nlohmann::json(labels).dump();
}

}  // namespace ttml
