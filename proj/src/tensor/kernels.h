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

#ifndef TTML_TENSOR_KERNELS_H_
#define TTML_TENSOR_KERNELS_H_

#include <cstdint>
#include <string_view>

#include "tensor/tensor.h"

namespace ttml {

enum class Padding { kSame, kValid };
enum class Activation { kRelu, kRelu6, kSigmoid, kSoftmax };

std::string_view PaddingName(Padding p);
std::string_view ActivationName(Activation a);
Padding ParsePadding(std::string_view name);
Activation ParseActivation(std::string_view name);

// Output extent along one spatial axis. For kSame this is ceil(in/stride);
// for kValid it is floor((in-k)/stride)+1 and requires in >= k.
int64_t ConvOutputSize(int64_t in, int64_t kernel, int64_t stride, Padding padding);

// Leading (top/left) padding; the odd pixel, if any, goes bottom/right.
int64_t ConvPadBefore(int64_t in, int64_t kernel, int64_t stride, Padding padding);

namespace ops {

// All kernels are pure: float32 in, float32 out, accumulation in double.
// `bias` may be a default-constructed tensor, meaning zero bias.

// input NHWC, kernel HWIO (kh, kw, in_channels, out_channels).
Tensor Conv2D(const Tensor& input, const Tensor& kernel, const Tensor& bias,
              int64_t stride, Padding padding);

// input NHWC, kernel (kh, kw, channels, 1).
Tensor DepthwiseConv2D(const Tensor& input, const Tensor& kernel, const Tensor& bias,
                       int64_t stride, Padding padding);

// input (N, F), weights (F, K), bias (K).
Tensor Dense(const Tensor& input, const Tensor& weights, const Tensor& bias);

// (N, H, W, C) -> (N, C)
Tensor GlobalAveragePool(const Tensor& input);

// Softmax normalizes over the last axis.
Tensor Apply(const Tensor& input, Activation kind);

Tensor Add(const Tensor& a, const Tensor& b);

// (N, ...) -> (N, prod(...))
Tensor Flatten(const Tensor& input);

}  // namespace ops
}  // namespace ttml

#endif  // TTML_TENSOR_KERNELS_H_
