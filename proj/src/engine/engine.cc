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

#include "engine/engine.h"

#include <algorithm>
#include <cstring>
#include <optional>
#include <unordered_map>

#include "common/error.h"
#include "common/parallel.h"
#include "quant/quantizer.h"
#include "tensor/kernels.h"

namespace ttml {

ExecutionPlan::ExecutionPlan(const ModelGraph& graph) : nodes_(graph.nodes) {
  output_shape_ = Validate(graph);
  input_shape_ = graph.input_shape;
  for (const auto& [id, blob] : graph.weights) {
    weights_.emplace(id, blob.is_quantized() ? DequantizeBlob(blob) : blob);
  }
  std::unordered_map<std::string, size_t> index;
  last_use_.assign(nodes_.size(), nodes_.size());
  for (size_t i = 0; i < nodes_.size(); ++i) {
    for (const std::string& ref : nodes_[i].inputs) {
      if (ref != kInputId) last_use_[index.at(ref)] = i;
    }
    index.emplace(nodes_[i].id, i);
  }
}

Tensor ExecutionPlan::RunSample(const Tensor& sample) const {
  std::unordered_map<std::string, size_t> index;
  std::vector<std::optional<Tensor>> values(nodes_.size());
  auto fetch = [&](const std::string& ref) -> const Tensor& {
    return ref == kInputId ? sample : *values[index.at(ref)];
  };
  auto blob = [&](const GraphNode& n, size_t i) -> Tensor {
    return i < n.weight_refs.size() ? weights_.at(n.weight_refs[i]) : Tensor();
  };
  for (size_t i = 0; i < nodes_.size(); ++i) {
    const GraphNode& n = nodes_[i];
    const Tensor& x = fetch(n.inputs[0]);
    Tensor y;
    switch (n.op) {
      case OpKind::kConv2d:
        y = ops::Conv2D(x, weights_.at(n.weight_refs[0]), blob(n, 1), n.params.stride,
                        n.params.padding);
        break;
      case OpKind::kDepthwiseConv2d:
        y = ops::DepthwiseConv2D(x, weights_.at(n.weight_refs[0]), blob(n, 1), n.params.stride,
                                 n.params.padding);
        break;
      case OpKind::kDense:
        y = ops::Dense(x, weights_.at(n.weight_refs[0]), blob(n, 1));
        break;
      case OpKind::kGlobalAveragePool:
        y = ops::GlobalAveragePool(x);
        break;
      case OpKind::kActivation:
        y = ops::Apply(x, n.params.activation);
        break;
      case OpKind::kAdd:
        y = ops::Add(x, fetch(n.inputs[1]));
        break;
      case OpKind::kDropoutMarker:
        y = x;
        break;
      case OpKind::kFlatten:
        y = ops::Flatten(x);
        break;
    }
    values[i] = std::move(y);
    index.emplace(n.id, i);
    // Release inputs whose last consumer was this node.
    for (const std::string& ref : n.inputs) {
      if (ref == kInputId) continue;
      const size_t j = index.at(ref);
      if (last_use_[j] == i) values[j].reset();
    }
  }
  return std::move(*values.back());
}

Tensor ExecutionPlan::Run(const Tensor& batch, int threads) const {
  if (batch.is_quantized() || batch.rank() != static_cast<int64_t>(input_shape_.size()) ||
      !std::equal(input_shape_.begin() + 1, input_shape_.end(), batch.shape().begin() + 1)) {
    Fail(ErrorCode::kShapeMismatch, "batch " + ShapeToString(batch.shape()) +
                                        " does not match graph input " +
                                        ShapeToString(input_shape_));
  }
  const int64_t n = batch.dim(0);
  Shape out_shape = output_shape_;
  out_shape[0] = n;
  Tensor out = Tensor::Zeros(out_shape);
  const int64_t row = out.size() / n;
  float* dst = out.mutable_data().data();
  ParallelFor(static_cast<size_t>(n), threads, [&](size_t i) {
    const auto bi = static_cast<int64_t>(i);
    const Tensor y = RunSample(n == 1 ? batch : batch.Slice(bi, bi + 1));
    std::memcpy(dst + bi * row, y.data().data(), static_cast<size_t>(row) * sizeof(float));
  });
  return out;
}

Tensor RunGraph(const ModelGraph& graph, const Tensor& batch, int threads) {
  return ExecutionPlan(graph).Run(batch, threads);
}

size_t ArgMax(std::span<const float> values) {
  size_t best = 0;
  for (size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

Prediction PredictProbs(const ExecutionPlan& plan, const std::vector<std::string>& labels,
                        const Tensor& sample) {
  if (sample.rank() < 1 || sample.dim(0) != 1) {
    Fail(ErrorCode::kShapeMismatch, "expected a single sample, got " + ShapeToString(sample.shape()));
  }
  if (plan.output_shape().size() != 2) {
    Fail(ErrorCode::kShapeMismatch, "graph output " + ShapeToString(plan.output_shape()) +
                                        " is not a score vector");
  }
  const int64_t width = plan.output_shape()[1];
  if (labels.empty() || static_cast<int64_t>(labels.size()) != width) {
    Fail(ErrorCode::kMissingLabels, "graph has " + std::to_string(labels.size()) +
                                        " class labels for " + std::to_string(width) + " outputs");
  }
  const Tensor y = plan.Run(sample);
  Prediction p;
  p.probs.assign(y.data().begin(), y.data().end());
  p.index = ArgMax(p.probs);
  p.label = labels[p.index];
  return p;
}

Prediction PredictProbs(const ModelGraph& graph, const Tensor& sample) {
  return PredictProbs(ExecutionPlan(graph), ClassLabels(graph), sample);
}

}  // namespace ttml
