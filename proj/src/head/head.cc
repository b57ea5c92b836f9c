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

#include "head/head.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "common/error.h"

namespace ttml {
namespace {

double Softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double Sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Matrix Logits(const HeadModel& head, const Matrix& pooled, const Matrix* mask) {
  const int64_t n = pooled.rows, f = head.feature_dim(), k = head.class_count();
  if (pooled.cols != f) Fail(ErrorCode::kShapeMismatch, "pooled width does not match head");
  Matrix z(n, k);
  for (int64_t i = 0; i < n; ++i) {
    for (int64_t c = 0; c < k; ++c) z.at(i, c) = head.bias[static_cast<size_t>(c)];
    for (int64_t j = 0; j < f; ++j) {
      double x = pooled.at(i, j);
      if (mask) x *= mask->at(i, j);
      if (x == 0.0) continue;
      const double* w = &head.weights.v[static_cast<size_t>(j * k)];
      for (int64_t c = 0; c < k; ++c) z.at(i, c) += x * w[c];
    }
  }
  return z;
}

Matrix Activate(const HeadModel& head, const Matrix& z) {
  Matrix p(z.rows, z.cols);
  for (int64_t i = 0; i < z.rows; ++i) {
    if (head.activation == Activation::kSoftmax) {
      double mx = z.at(i, 0);
      for (int64_t c = 1; c < z.cols; ++c) mx = std::max(mx, z.at(i, c));
      double sum = 0;
      for (int64_t c = 0; c < z.cols; ++c) sum += p.at(i, c) = std::exp(z.at(i, c) - mx);
      for (int64_t c = 0; c < z.cols; ++c) p.at(i, c) /= sum;
    } else {
      for (int64_t c = 0; c < z.cols; ++c) p.at(i, c) = Sigmoid(z.at(i, c));
    }
  }
  return p;
}

Matrix LabelMatrix(const Tensor& labels, int64_t n, int64_t k) {
  if (labels.shape() != Shape{n, k}) {
    Fail(ErrorCode::kShapeMismatch, "labels " + ShapeToString(labels.shape()) + " do not match (" +
                                        std::to_string(n) + "," + std::to_string(k) + ")");
  }
  Matrix y(n, k);
  std::copy(labels.data().begin(), labels.data().end(), y.v.begin());
  return y;
}

Matrix Rows(const Matrix& m, std::span<const int64_t> idx) {
  Matrix out(static_cast<int64_t>(idx.size()), m.cols);
  for (size_t r = 0; r < idx.size(); ++r) {
    std::copy_n(m.v.begin() + idx[r] * m.cols, m.cols, out.v.begin() + static_cast<int64_t>(r) * m.cols);
  }
  return out;
}

int64_t RowArgMax(const Matrix& m, int64_t r) {
  int64_t best = 0;
  for (int64_t c = 1; c < m.cols; ++c) {
    if (m.at(r, c) > m.at(r, best)) best = c;
  }
  return best;
}

// Loss and accuracy over a full set in eval mode.
std::pair<double, double> Evaluate(const HeadModel& head, const Matrix& pooled, const Matrix& y) {
  const LossGrad lg = PooledLossGrad(head, pooled, nullptr, y);
  const Matrix p = PooledProbs(head, pooled, nullptr);
  int64_t correct = 0;
  for (int64_t i = 0; i < p.rows; ++i) correct += RowArgMax(p, i) == RowArgMax(y, i);
  return {lg.loss, static_cast<double>(correct) / static_cast<double>(p.rows)};
}

std::string OptimizerName(Optimizer o) { return o == Optimizer::kSgd ? "sgd" : "adam"; }

}  // namespace

HeadModel MakeHead(const Shape& input_shape, std::vector<std::string> class_names,
                   Activation activation, double dropout_rate, Rng* init) {
  if (input_shape.size() != 3 || NumElements(input_shape) <= 0) {
    Fail(ErrorCode::kShapeMismatch, "head input must be (H, W, C), got " + ShapeToString(input_shape));
  }
  if (class_names.size() < 2) Fail(ErrorCode::kConfigError, "a head needs at least 2 classes");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    Fail(ErrorCode::kConfigError, "dropout rate must be in [0, 1)");
  }
  if (activation != Activation::kSoftmax && activation != Activation::kSigmoid) {
    Fail(ErrorCode::kConfigError, "head activation must be softmax or sigmoid");
  }
  HeadModel head;
  head.input_shape = input_shape;
  head.dropout_rate = dropout_rate;
  head.activation = activation;
  const int64_t f = input_shape[2];
  const auto k = static_cast<int64_t>(class_names.size());
  head.weights = Matrix(f, k);
  head.bias.assign(static_cast<size_t>(k), 0.0);
  head.class_names = std::move(class_names);
  if (init) {
    const double limit = std::sqrt(6.0 / static_cast<double>(f + k));
    for (double& w : head.weights.v) w = init->Uniform(-limit, limit);
  }
  return head;
}

Matrix PoolFeatures(const Tensor& features, const Shape& expected_hwc) {
  if (features.rank() != 4 || !std::equal(expected_hwc.begin(), expected_hwc.end(),
                                          features.shape().begin() + 1)) {
    Fail(ErrorCode::kShapeMismatch, "features " + ShapeToString(features.shape()) +
                                        " do not match head input " + ShapeToString(expected_hwc));
  }
  const int64_t n = features.dim(0), hw = features.dim(1) * features.dim(2), c = features.dim(3);
  Matrix out(n, c);
  const auto x = features.data();
  for (int64_t i = 0; i < n; ++i) {
    for (int64_t p = 0; p < hw; ++p) {
      const float* row = x.data() + (i * hw + p) * c;
      for (int64_t j = 0; j < c; ++j) out.at(i, j) += row[j];
    }
    for (int64_t j = 0; j < c; ++j) out.at(i, j) /= static_cast<double>(hw);
  }
  return out;
}

Matrix DropoutMask(int64_t rows, int64_t cols, double rate, Rng& rng) {
  Matrix m(rows, cols);
  const double keep = 1.0 / (1.0 - rate);
  for (double& v : m.v) v = rng.Bernoulli(rate) ? 0.0 : keep;
  return m;
}

Matrix PooledProbs(const HeadModel& head, const Matrix& pooled, const Matrix* mask) {
  return Activate(head, Logits(head, pooled, mask));
}

HeadOutput HeadForward(const HeadModel& head, const Tensor& features, bool training, Rng* rng) {
  const Matrix pooled = PoolFeatures(features, head.input_shape);
  HeadOutput out;
  if (training && head.dropout_rate > 0.0) {
    if (!rng) Fail(ErrorCode::kInternal, "training forward needs an rng");
    out.mask = DropoutMask(pooled.rows, pooled.cols, head.dropout_rate, *rng);
  }
  out.probs = PooledProbs(head, pooled, out.mask.v.empty() ? nullptr : &out.mask);
  return out;
}

LossGrad PooledLossGrad(const HeadModel& head, const Matrix& pooled, const Matrix* mask,
                        const Matrix& labels) {
  const int64_t n = pooled.rows, f = head.feature_dim(), k = head.class_count();
  if (n == 0) Fail(ErrorCode::kEmptyDataset, "empty batch");
  if (labels.rows != n || labels.cols != k) Fail(ErrorCode::kShapeMismatch, "label matrix shape");
  const Matrix z = Logits(head, pooled, mask);
  const Matrix p = Activate(head, z);
  LossGrad out;
  Matrix dz(n, k);
  double loss = 0.0;
  if (head.activation == Activation::kSoftmax) {
    for (int64_t i = 0; i < n; ++i) {
      double mx = z.at(i, 0);
      for (int64_t c = 1; c < k; ++c) mx = std::max(mx, z.at(i, c));
      double sum = 0;
      for (int64_t c = 0; c < k; ++c) sum += std::exp(z.at(i, c) - mx);
      const double lse = mx + std::log(sum);
      for (int64_t c = 0; c < k; ++c) {
        loss -= labels.at(i, c) * (z.at(i, c) - lse);
        dz.at(i, c) = (p.at(i, c) - labels.at(i, c)) / static_cast<double>(n);
      }
    }
    out.loss = loss / static_cast<double>(n);
  } else {
    const auto nk = static_cast<double>(n * k);
    for (int64_t i = 0; i < n; ++i) {
      for (int64_t c = 0; c < k; ++c) {
        const double y = labels.at(i, c), x = z.at(i, c);
        loss += y * Softplus(-x) + (1.0 - y) * Softplus(x);
        dz.at(i, c) = (p.at(i, c) - y) / nk;
      }
    }
    out.loss = loss / nk;
  }
  out.grad_weights = Matrix(f, k);
  out.grad_bias.assign(static_cast<size_t>(k), 0.0);
  for (int64_t i = 0; i < n; ++i) {
    for (int64_t c = 0; c < k; ++c) out.grad_bias[static_cast<size_t>(c)] += dz.at(i, c);
    for (int64_t j = 0; j < f; ++j) {
      double x = pooled.at(i, j);
      if (mask) x *= mask->at(i, j);
      if (x == 0.0) continue;
      double* g = &out.grad_weights.v[static_cast<size_t>(j * k)];
      for (int64_t c = 0; c < k; ++c) g[c] += x * dz.at(i, c);
    }
  }
  return out;
}

LossGrad HeadLossGrad(const HeadModel& head, const Tensor& features, const Tensor& labels,
                      bool training, Rng* rng) {
  const Matrix pooled = PoolFeatures(features, head.input_shape);
  const Matrix y = LabelMatrix(labels, pooled.rows, head.class_count());
  Matrix mask;
  if (training && head.dropout_rate > 0.0) {
    if (!rng) Fail(ErrorCode::kInternal, "training loss needs an rng");
    mask = DropoutMask(pooled.rows, pooled.cols, head.dropout_rate, *rng);
  }
  return PooledLossGrad(head, pooled, mask.v.empty() ? nullptr : &mask, y);
}

void TrainConfig::Check() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    Fail(ErrorCode::kConfigError, "learning rate must be >= 0");
  }
  if (epochs < 1) Fail(ErrorCode::kConfigError, "epochs must be >= 1");
  if (batch_size < 1) Fail(ErrorCode::kConfigError, "batch size must be >= 1");
  if (!(beta1 >= 0 && beta1 < 1 && beta2 >= 0 && beta2 < 1 && epsilon > 0)) {
    Fail(ErrorCode::kConfigError, "adam parameters out of range");
  }
}

void to_json(nlohmann::json& j, const TrainConfig& c) {
  j = nlohmann::json{{"learning_rate", c.learning_rate}, {"epochs", c.epochs},
                     {"batch_size", c.batch_size},       {"seed", c.seed},
                     {"optimizer", OptimizerName(c.optimizer)},
                     {"beta1", c.beta1},                 {"beta2", c.beta2},
                     {"epsilon", c.epsilon}};
}

void from_json(const nlohmann::json& j, TrainConfig& c) {
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.epochs = j.value("epochs", c.epochs);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.seed = j.value("seed", c.seed);
  const std::string opt = j.value("optimizer", OptimizerName(c.optimizer));
  if (opt == "sgd") c.optimizer = Optimizer::kSgd;
  else if (opt == "adam") c.optimizer = Optimizer::kAdam;
  else Fail(ErrorCode::kConfigError, "unknown optimizer '" + opt + "'");
  c.beta1 = j.value("beta1", c.beta1);
  c.beta2 = j.value("beta2", c.beta2);
  c.epsilon = j.value("epsilon", c.epsilon);
}

TrainResult TrainHead(const FeatureCache& train, const FeatureCache& val, const HeadSpec& spec,
                      const TrainConfig& cfg,
                      const std::function<void(const EpochStats&)>& on_epoch) {
  return TrainHead(std::span<const FeatureCache>(&train, 1), val, spec, cfg, on_epoch);
}

TrainResult TrainHead(std::span<const FeatureCache> train_rounds, const FeatureCache& val,
                      const HeadSpec& spec, const TrainConfig& cfg,
                      const std::function<void(const EpochStats&)>& on_epoch) {
  cfg.Check();
  if (train_rounds.empty() || train_rounds[0].rows() == 0) {
    Fail(ErrorCode::kEmptyDataset, "training cache is empty");
  }
  const FeatureCache& first = train_rounds[0];
  if (first.class_names != val.class_names) {
    Fail(ErrorCode::kClassMismatch, "training and validation caches list different classes");
  }
  if (val.rows() == 0) Fail(ErrorCode::kEmptyDataset, "validation cache is empty");
  if (first.features.rank() != 4) {
    Fail(ErrorCode::kShapeMismatch, "features must be (N, H, W, C), got " +
                                        ShapeToString(first.features.shape()));
  }
  const Shape hwc(first.features.shape().begin() + 1, first.features.shape().end());
  const auto k = static_cast<int64_t>(first.class_names.size());

  struct Round {
    Matrix x, y;
  };
  std::vector<Round> rounds;
  for (const FeatureCache& c : train_rounds) {
    if (c.class_names != first.class_names) {
      Fail(ErrorCode::kClassMismatch, "training rounds list different classes");
    }
    if (c.rows() == 0) Fail(ErrorCode::kEmptyDataset, "training cache is empty");
    std::vector<int64_t> per_class(static_cast<size_t>(k), 0);
    for (int64_t i = 0; i < c.rows(); ++i) ++per_class[static_cast<size_t>(c.label_of(i))];
    for (int64_t j = 0; j < k; ++j) {
      if (per_class[static_cast<size_t>(j)] == 0) {
        Fail(ErrorCode::kDegenerateDataset,
             "class '" + c.class_names[static_cast<size_t>(j)] + "' has no training rows");
      }
    }
    rounds.push_back({PoolFeatures(c.features, hwc), LabelMatrix(c.labels, c.rows(), k)});
  }
  const Matrix x_val = PoolFeatures(val.features, hwc);
  const Matrix y_val = LabelMatrix(val.labels, val.rows(), k);

  Rng init_rng(DeriveSeed(cfg.seed, {0}));
  Rng shuffle_rng(DeriveSeed(cfg.seed, {1}));
  Rng dropout_rng(DeriveSeed(cfg.seed, {2}));
  TrainResult result;
  HeadModel& head = result.head;
  head = MakeHead(hwc, first.class_names, spec.activation, spec.dropout_rate, &init_rng);

  // Parameters flattened as [weights..., bias...] for the optimizer.
  const size_t nw = head.weights.v.size();
  std::vector<double> m(nw + head.bias.size(), 0.0), v(m.size(), 0.0);
  int64_t step = 0;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const Round& round = rounds[static_cast<size_t>(epoch - 1) % rounds.size()];
    std::vector<int64_t> order(static_cast<size_t>(round.x.rows));
    std::iota(order.begin(), order.end(), 0);
    shuffle_rng.Shuffle(std::span<int64_t>(order));
    for (size_t start = 0; start < order.size(); start += static_cast<size_t>(cfg.batch_size)) {
      const size_t end = std::min(order.size(), start + static_cast<size_t>(cfg.batch_size));
      const std::span<const int64_t> idx(order.data() + start, end - start);
      const Matrix xb = Rows(round.x, idx);
      const Matrix yb = Rows(round.y, idx);
      Matrix mask;
      if (head.dropout_rate > 0.0) mask = DropoutMask(xb.rows, xb.cols, head.dropout_rate, dropout_rng);
      const LossGrad lg = PooledLossGrad(head, xb, mask.v.empty() ? nullptr : &mask, yb);
      ++step;
      const double b1t = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
      const double b2t = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
      for (size_t p = 0; p < m.size(); ++p) {
        double& param = p < nw ? head.weights.v[p] : head.bias[p - nw];
        const double g = p < nw ? lg.grad_weights.v[p] : lg.grad_bias[p - nw];
        if (cfg.optimizer == Optimizer::kSgd) {
          param -= cfg.learning_rate * g;
          continue;
        }
        m[p] = cfg.beta1 * m[p] + (1.0 - cfg.beta1) * g;
        v[p] = cfg.beta2 * v[p] + (1.0 - cfg.beta2) * g * g;
        param -= cfg.learning_rate * (m[p] / b1t) / (std::sqrt(v[p] / b2t) + cfg.epsilon);
      }
    }
    EpochStats s;
    s.epoch = epoch;
    std::tie(s.train_loss, s.train_acc) = Evaluate(head, round.x, round.y);
    std::tie(s.val_loss, s.val_acc) = Evaluate(head, x_val, y_val);
    if (!std::isfinite(s.train_loss)) Fail(ErrorCode::kNonFinite, "training diverged");
    result.history.epochs.push_back(s);
    if (on_epoch) on_epoch(s);
  }
  return result;
}

ModelGraph ExportHead(const HeadModel& head) {
  const int64_t f = head.feature_dim(), k = head.class_count();
  ModelGraph g;
  g.name = "head";
  g.input_shape = {kAnyBatch, head.input_shape[0], head.input_shape[1], head.input_shape[2]};
  GraphNode gap{"head/gap", OpKind::kGlobalAveragePool, {}, {std::string(kInputId)}, {}};
  GraphNode drop{"head/dropout", OpKind::kDropoutMarker, {}, {"head/gap"}, {}};
  drop.params.dropout_rate = static_cast<float>(head.dropout_rate);
  GraphNode dense{"head/dense", OpKind::kDense, {}, {"head/dropout"},
                  {"head/dense/kernel", "head/dense/bias"}};
  GraphNode act{"head/" + std::string(ActivationName(head.activation)), OpKind::kActivation, {},
                {"head/dense"}, {}};
  act.params.activation = head.activation;
  g.nodes = {gap, drop, dense, act};
  std::vector<float> w(head.weights.v.begin(), head.weights.v.end());
  std::vector<float> b(head.bias.begin(), head.bias.end());
  g.weights["head/dense/kernel"] = Tensor::FromData({f, k}, std::move(w));
  g.weights["head/dense/bias"] = Tensor::FromData({k}, std::move(b));
  SetClassLabels(g, head.class_names);
  return g;
}

}  // namespace ttml
