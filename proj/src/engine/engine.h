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

#ifndef TTML_ENGINE_ENGINE_H_
#define TTML_ENGINE_ENGINE_H_

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "model/graph.h"
#include "tensor/tensor.h"

namespace ttml {

// A validated graph with every weight blob resolved to float32. qint8 blobs
// are dequantized once here (w = scale * q); inference itself only ever
// sees float kernels. Read-only after construction, so one plan may serve
// concurrent Run calls.
class ExecutionPlan {
 public:
  explicit ExecutionPlan(const ModelGraph& graph);

  // batch: (N, ...input dims), N >= 1. Samples are evaluated independently,
  // optionally on `threads` workers, so results do not depend on N or on the
  // thread count.
  Tensor Run(const Tensor& batch, int threads = 1) const;

  const Shape& input_shape() const { return input_shape_; }
  const Shape& output_shape() const { return output_shape_; }
  const std::map<std::string, Tensor>& float_weights() const { return weights_; }

 private:
  Tensor RunSample(const Tensor& sample) const;

  std::vector<GraphNode> nodes_;
  std::map<std::string, Tensor> weights_;
  std::vector<size_t> last_use_;
  Shape input_shape_;
  Shape output_shape_;
};

// Convenience wrapper building a throwaway plan.
Tensor RunGraph(const ModelGraph& graph, const Tensor& batch, int threads = 1);

// Ties go to the lowest index.
size_t ArgMax(std::span<const float> values);

struct Prediction {
  std::vector<float> probs;
  size_t index = 0;
  std::string label;
};

// Scores for one sample (batch dimension of 1) plus the argmax label from
// the graph's class_labels metadata. Throws kMissingLabels when labels are
// absent or do not match the output width.
Prediction PredictProbs(const ModelGraph& graph, const Tensor& sample);
Prediction PredictProbs(const ExecutionPlan& plan, const std::vector<std::string>& labels,
                        const Tensor& sample);

}  // namespace ttml

#endif  // TTML_ENGINE_ENGINE_H_
