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

#ifndef TTML_HEAD_HEAD_H_
#define TTML_HEAD_HEAD_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "common/rng.h"
#include "features/features.h"
#include "json.hpp"
#include "model/graph.h"
#include "tensor/kernels.h"
#include "tensor/tensor.h"

namespace ttml {

// Row-major double matrix used for training arithmetic.
struct Matrix {
  int64_t rows = 0;
  int64_t cols = 0;
  std::vector<double> v;

  Matrix() = default;
  Matrix(int64_t r, int64_t c, double fill = 0.0)
      : rows(r), cols(c), v(static_cast<size_t>(r * c), fill) {}
  double& at(int64_t r, int64_t c) { return v[static_cast<size_t>(r * cols + c)]; }
  double at(int64_t r, int64_t c) const { return v[static_cast<size_t>(r * cols + c)]; }
  bool operator==(const Matrix&) const = default;
};

// GAP -> dropout -> dense -> softmax|sigmoid. Master weights are kept in
// double and converted to float32 on export.
struct HeadModel {
  Shape input_shape;  // (H, W, C), no batch dimension
  double dropout_rate = 0.0;
  Activation activation = Activation::kSoftmax;
  Matrix weights;            // F x K
  std::vector<double> bias;  // K
  std::vector<std::string> class_names;

  int64_t feature_dim() const { return weights.rows; }
  int64_t class_count() const { return weights.cols; }
  bool operator==(const HeadModel&) const = default;
};

// Zero weights when `init` is null, otherwise Glorot-uniform weights drawn
// from it. Biases start at zero.
HeadModel MakeHead(const Shape& input_shape, std::vector<std::string> class_names,
                   Activation activation, double dropout_rate, Rng* init);

// (N, H, W, C) -> (N, C) channel means in double.
Matrix PoolFeatures(const Tensor& features, const Shape& expected_hwc);

// Inverted-dropout multipliers: 0 with probability rate, else 1/(1-rate).
Matrix DropoutMask(int64_t rows, int64_t cols, double rate, Rng& rng);

struct HeadOutput {
  Matrix probs;  // N x K
  Matrix mask;   // N x F; empty unless training with rate > 0
};

// Training mode draws a dropout mask from `rng`; eval mode ignores it.
HeadOutput HeadForward(const HeadModel& head, const Tensor& features, bool training, Rng* rng);

struct LossGrad {
  double loss = 0.0;
  Matrix grad_weights;  // F x K
  std::vector<double> grad_bias;
};

// Softmax heads: mean categorical cross-entropy. Sigmoid heads: binary
// cross-entropy averaged over batch and classes.
LossGrad HeadLossGrad(const HeadModel& head, const Tensor& features, const Tensor& labels,
                      bool training, Rng* rng);

// Same on pooled (N x F) inputs with an optional precomputed mask.
LossGrad PooledLossGrad(const HeadModel& head, const Matrix& pooled, const Matrix* mask,
                        const Matrix& labels);
Matrix PooledProbs(const HeadModel& head, const Matrix& pooled, const Matrix* mask);

enum class Optimizer { kSgd, kAdam };

struct TrainConfig {
  double learning_rate = 1e-3;
  int epochs = 30;
  int batch_size = 32;
  uint64_t seed = 42;
  Optimizer optimizer = Optimizer::kAdam;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-7;

  void Check() const;  // kConfigError
  bool operator==(const TrainConfig&) const = default;
};

void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);

struct EpochStats {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double train_acc = 0.0;
  double val_loss = 0.0;
  double val_acc = 0.0;
  bool operator==(const EpochStats&) const = default;
};

struct TrainHistory {
  std::vector<EpochStats> epochs;
  bool operator==(const TrainHistory&) const = default;
};

struct HeadSpec {
  Activation activation = Activation::kSoftmax;
  double dropout_rate = 0.5;
};

struct TrainResult {
  HeadModel head;
  TrainHistory history;
};

// Per-epoch statistics are full eval-mode passes over both caches.
TrainResult TrainHead(const FeatureCache& train, const FeatureCache& val, const HeadSpec& spec,
                      const TrainConfig& cfg,
                      const std::function<void(const EpochStats&)>& on_epoch = nullptr);

// Epoch e (1-based) trains on train_rounds[(e - 1) % rounds], e.g. one
// augmented variant of the training set per epoch. Train statistics are
// taken on that epoch's round.
TrainResult TrainHead(std::span<const FeatureCache> train_rounds, const FeatureCache& val,
                      const HeadSpec& spec, const TrainConfig& cfg,
                      const std::function<void(const EpochStats&)>& on_epoch = nullptr);

// GAP, dropout_marker, dense and activation nodes with class_labels set.
ModelGraph ExportHead(const HeadModel& head);

}  // namespace ttml

#endif  // TTML_HEAD_HEAD_H_
