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

#ifndef TTML_TENSOR_TENSOR_H_
#define TTML_TENSOR_TENSOR_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ttml {

using Shape = std::vector<int64_t>;

// -1 marks the wildcard batch dimension in stored graph shapes.
inline constexpr int64_t kAnyBatch = -1;

enum class DType : uint8_t { kFloat32 = 0, kQInt8 = 1 };

int64_t NumElements(const Shape& shape);
std::string ShapeToString(const Shape& shape);

// Dense row-major array. Float tensors own a float buffer; qint8 tensors own
// an int8 buffer plus a positive per-tensor scale (zero point is always 0).
class Tensor {
 public:
  Tensor() = default;

  static Tensor Zeros(Shape shape);
  static Tensor Filled(Shape shape, float value);
  static Tensor FromData(Shape shape, std::vector<float> data);
  static Tensor Quantized(Shape shape, std::vector<int8_t> q, float scale);

  const Shape& shape() const { return shape_; }
  int64_t rank() const { return static_cast<int64_t>(shape_.size()); }
  int64_t dim(int64_t axis) const { return shape_.at(static_cast<size_t>(axis)); }
  int64_t size() const { return NumElements(shape_); }
  DType dtype() const { return dtype_; }
  bool is_quantized() const { return dtype_ == DType::kQInt8; }
  // True only for a default-constructed tensor.
  bool empty() const { return shape_.empty() && data_.empty() && qdata_.empty(); }

  std::span<const float> data() const { return data_; }
  std::span<float> mutable_data() { return data_; }
  std::span<const int8_t> qdata() const { return qdata_; }
  float scale() const { return scale_; }
  int zero_point() const { return 0; }

  // Same buffer, new shape of equal element count.
  Tensor Reshaped(Shape shape) const;

  // Rows [begin, end) along axis 0.
  Tensor Slice(int64_t begin, int64_t end) const;

  // Throws kNonFinite when a float entry is NaN or infinite.
  void CheckFinite(const std::string& context) const;

  friend bool operator==(const Tensor& a, const Tensor& b);

 private:
  Shape shape_;
  DType dtype_ = DType::kFloat32;
  std::vector<float> data_;
  std::vector<int8_t> qdata_;
  float scale_ = 1.0f;
};

// Concatenates tensors along axis 0; trailing dims must agree.
Tensor Stack(std::span<const Tensor> parts);

}  // namespace ttml

#endif  // TTML_TENSOR_TENSOR_H_
