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

#include "tensor/tensor.h"

#include <cmath>
#include <cstring>
#include <sstream>

#include "common/error.h"

namespace ttml {

int64_t NumElements(const Shape& shape) {
  int64_t n = 1;
  for (int64_t d : shape) n *= d;
  return n;
}

std::string ShapeToString(const Shape& shape) {
  std::ostringstream os;
  os << '(';
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ',';
    if (shape[i] == kAnyBatch) {
      os << '?';
    } else {
      os << shape[i];
    }
  }
  os << ')';
  return os.str();
}

namespace {

void CheckShape(const Shape& shape) {
  for (int64_t d : shape) {
    if (d <= 0) Fail(ErrorCode::kShapeMismatch, "non-positive dimension in " + ShapeToString(shape));
  }
}

}  // namespace

Tensor Tensor::Zeros(Shape shape) { return Filled(std::move(shape), 0.0f); }

Tensor Tensor::Filled(Shape shape, float value) {
  CheckShape(shape);
  Tensor t;
  t.data_.assign(static_cast<size_t>(NumElements(shape)), value);
  t.shape_ = std::move(shape);
  return t;
}

Tensor Tensor::FromData(Shape shape, std::vector<float> data) {
  CheckShape(shape);
  if (NumElements(shape) != static_cast<int64_t>(data.size())) {
    Fail(ErrorCode::kShapeMismatch, "shape " + ShapeToString(shape) + " does not hold " +
                                        std::to_string(data.size()) + " values");
  }
  Tensor t;
  t.shape_ = std::move(shape);
  t.data_ = std::move(data);
  return t;
}

Tensor Tensor::Quantized(Shape shape, std::vector<int8_t> q, float scale) {
  CheckShape(shape);
  if (NumElements(shape) != static_cast<int64_t>(q.size())) {
    Fail(ErrorCode::kShapeMismatch, "shape " + ShapeToString(shape) + " does not hold " +
                                        std::to_string(q.size()) + " values");
  }
  if (!(scale > 0.0f) || !std::isfinite(scale)) {
    Fail(ErrorCode::kFormatError, "qint8 scale must be positive and finite");
  }
  Tensor t;
  t.shape_ = std::move(shape);
  t.dtype_ = DType::kQInt8;
  t.qdata_ = std::move(q);
  t.scale_ = scale;
  return t;
}

Tensor Tensor::Reshaped(Shape shape) const {
  CheckShape(shape);
  if (NumElements(shape) != size()) {
    Fail(ErrorCode::kShapeMismatch,
         "cannot reshape " + ShapeToString(shape_) + " to " + ShapeToString(shape));
  }
  Tensor t = *this;
  t.shape_ = std::move(shape);
  return t;
}

Tensor Tensor::Slice(int64_t begin, int64_t end) const {
  if (rank() == 0 || begin < 0 || end > dim(0) || begin >= end) {
    Fail(ErrorCode::kShapeMismatch, "bad slice of " + ShapeToString(shape_));
  }
  const int64_t row = size() / dim(0);
  Shape shape = shape_;
  shape[0] = end - begin;
  if (is_quantized()) {
    std::vector<int8_t> q(qdata_.begin() + begin * row, qdata_.begin() + end * row);
    return Quantized(std::move(shape), std::move(q), scale_);
  }
  std::vector<float> d(data_.begin() + begin * row, data_.begin() + end * row);
  return FromData(std::move(shape), std::move(d));
}

void Tensor::CheckFinite(const std::string& context) const {
  for (float v : data_) {
    if (!std::isfinite(v)) Fail(ErrorCode::kNonFinite, context + ": non-finite value produced");
  }
}

bool operator==(const Tensor& a, const Tensor& b) {
  if (a.shape_ != b.shape_ || a.dtype_ != b.dtype_) return false;
  if (a.is_quantized()) {
    return a.qdata_ == b.qdata_ &&
           std::memcmp(&a.scale_, &b.scale_, sizeof(float)) == 0;
  }
  return a.data_.size() == b.data_.size() &&
         std::memcmp(a.data_.data(), b.data_.data(), a.data_.size() * sizeof(float)) == 0;
}

Tensor Stack(std::span<const Tensor> parts) {
  if (parts.empty()) Fail(ErrorCode::kShapeMismatch, "cannot stack zero tensors");
  Shape shape = parts[0].shape();
  std::vector<float> data;
  int64_t rows = 0;
  for (const Tensor& p : parts) {
    if (p.is_quantized() || p.rank() != static_cast<int64_t>(shape.size()) ||
        !std::equal(p.shape().begin() + 1, p.shape().end(), shape.begin() + 1)) {
      Fail(ErrorCode::kShapeMismatch, "cannot stack " + ShapeToString(p.shape()) +
                                          " onto " + ShapeToString(shape));
    }
    rows += p.dim(0);
    data.insert(data.end(), p.data().begin(), p.data().end());
  }
  shape[0] = rows;
  return Tensor::FromData(std::move(shape), std::move(data));
}

}  // namespace ttml
