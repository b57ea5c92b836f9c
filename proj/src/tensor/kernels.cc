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

#include "tensor/kernels.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "common/error.h"

namespace ttml {

std::string_view PaddingName(Padding p) { return p == Padding::kSame ? "same" : "valid"; }

std::string_view ActivationName(Activation a) {
  switch (a) {
    case Activation::kRelu: return "relu";
    case Activation::kRelu6: return "relu6";
    case Activation::kSigmoid: return "sigmoid";
    case Activation::kSoftmax: return "softmax";
  }
  return "?";
}

Padding ParsePadding(std::string_view name) {
  if (name == "same") return Padding::kSame;
  if (name == "valid") return Padding::kValid;
  Fail(ErrorCode::kFormatError, "unknown padding '" + std::string(name) + "'");
}

Activation ParseActivation(std::string_view name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "relu6") return Activation::kRelu6;
  if (name == "sigmoid") return Activation::kSigmoid;
  if (name == "softmax") return Activation::kSoftmax;
  Fail(ErrorCode::kFormatError, "unknown activation '" + std::string(name) + "'");
}

int64_t ConvOutputSize(int64_t in, int64_t kernel, int64_t stride, Padding padding) {
  if (stride < 1) Fail(ErrorCode::kShapeMismatch, "stride must be >= 1");
  if (padding == Padding::kSame) return (in + stride - 1) / stride;
  if (in < kernel) {
    Fail(ErrorCode::kShapeMismatch, "valid convolution with kernel " + std::to_string(kernel) +
                                        " larger than input " + std::to_string(in));
  }
  return (in - kernel) / stride + 1;
}

int64_t ConvPadBefore(int64_t in, int64_t kernel, int64_t stride, Padding padding) {
  if (padding == Padding::kValid) return 0;
  const int64_t out = ConvOutputSize(in, kernel, stride, padding);
  const int64_t total = std::max<int64_t>((out - 1) * stride + kernel - in, 0);
  return total / 2;
}

namespace ops {
namespace {

void RequireRank(const Tensor& t, int64_t rank, const char* what) {
  if (t.rank() != rank) {
    Fail(ErrorCode::kShapeMismatch, std::string(what) + " expects rank " + std::to_string(rank) +
                                        ", got " + ShapeToString(t.shape()));
  }
}

void RequireFloat(const Tensor& t, const char* what) {
  if (t.is_quantized()) {
    Fail(ErrorCode::kShapeMismatch, std::string(what) + " takes float32 operands; dequantize first");
  }
}

// Returns bias values or zeros of length n.
std::vector<double> BiasOrZero(const Tensor& bias, int64_t n, const char* what) {
  std::vector<double> out(static_cast<size_t>(n), 0.0);
  if (bias.empty()) return out;
  RequireFloat(bias, what);
  if (bias.size() != n) {
    Fail(ErrorCode::kShapeMismatch, std::string(what) + " bias has " + std::to_string(bias.size()) +
                                        " entries, expected " + std::to_string(n));
  }
  std::copy(bias.data().begin(), bias.data().end(), out.begin());
  return out;
}

}  // namespace

Tensor Conv2D(const Tensor& input, const Tensor& kernel, const Tensor& bias,
              int64_t stride, Padding padding) {
  RequireRank(input, 4, "conv2d input");
  RequireRank(kernel, 4, "conv2d kernel");
  RequireFloat(input, "conv2d");
  RequireFloat(kernel, "conv2d");
  const int64_t n = input.dim(0), h = input.dim(1), w = input.dim(2), c = input.dim(3);
  const int64_t kh = kernel.dim(0), kw = kernel.dim(1), o = kernel.dim(3);
  if (kernel.dim(2) != c) {
    Fail(ErrorCode::kShapeMismatch, "conv2d kernel " + ShapeToString(kernel.shape()) +
                                        " does not match input channels " + std::to_string(c));
  }
  const std::vector<double> b = BiasOrZero(bias, o, "conv2d");
  const int64_t oh = ConvOutputSize(h, kh, stride, padding);
  const int64_t ow = ConvOutputSize(w, kw, stride, padding);
  const int64_t pt = ConvPadBefore(h, kh, stride, padding);
  const int64_t pl = ConvPadBefore(w, kw, stride, padding);

  Tensor out = Tensor::Zeros({n, oh, ow, o});
  const float* in = input.data().data();
  const float* k = kernel.data().data();
  float* dst = out.mutable_data().data();
  std::vector<double> acc(static_cast<size_t>(o));

  for (int64_t bn = 0; bn < n; ++bn) {
    for (int64_t oy = 0; oy < oh; ++oy) {
      for (int64_t ox = 0; ox < ow; ++ox) {
        std::copy(b.begin(), b.end(), acc.begin());
        for (int64_t ky = 0; ky < kh; ++ky) {
          const int64_t iy = oy * stride - pt + ky;
          if (iy < 0 || iy >= h) continue;
          for (int64_t kx = 0; kx < kw; ++kx) {
            const int64_t ix = ox * stride - pl + kx;
            if (ix < 0 || ix >= w) continue;
            const float* px = in + ((bn * h + iy) * w + ix) * c;
            const float* krow = k + (ky * kw + kx) * c * o;
            for (int64_t ci = 0; ci < c; ++ci) {
              const double x = px[ci];
              if (x == 0.0) continue;
              const float* wr = krow + ci * o;
              for (int64_t co = 0; co < o; ++co) acc[co] += x * static_cast<double>(wr[co]);
            }
          }
        }
        float* po = dst + ((bn * oh + oy) * ow + ox) * o;
        for (int64_t co = 0; co < o; ++co) po[co] = static_cast<float>(acc[co]);
      }
    }
  }
  out.CheckFinite("conv2d");
  return out;
}

Tensor DepthwiseConv2D(const Tensor& input, const Tensor& kernel, const Tensor& bias,
                       int64_t stride, Padding padding) {
  RequireRank(input, 4, "depthwise_conv2d input");
  RequireRank(kernel, 4, "depthwise_conv2d kernel");
  RequireFloat(input, "depthwise_conv2d");
  RequireFloat(kernel, "depthwise_conv2d");
  const int64_t n = input.dim(0), h = input.dim(1), w = input.dim(2), c = input.dim(3);
  const int64_t kh = kernel.dim(0), kw = kernel.dim(1);
  if (kernel.dim(2) != c || kernel.dim(3) != 1) {
    Fail(ErrorCode::kShapeMismatch, "depthwise kernel " + ShapeToString(kernel.shape()) +
                                        " does not match input channels " + std::to_string(c));
  }
  const std::vector<double> b = BiasOrZero(bias, c, "depthwise_conv2d");
  const int64_t oh = ConvOutputSize(h, kh, stride, padding);
  const int64_t ow = ConvOutputSize(w, kw, stride, padding);
  const int64_t pt = ConvPadBefore(h, kh, stride, padding);
  const int64_t pl = ConvPadBefore(w, kw, stride, padding);

  Tensor out = Tensor::Zeros({n, oh, ow, c});
  const float* in = input.data().data();
  const float* k = kernel.data().data();
  float* dst = out.mutable_data().data();
  std::vector<double> acc(static_cast<size_t>(c));

  for (int64_t bn = 0; bn < n; ++bn) {
    for (int64_t oy = 0; oy < oh; ++oy) {
      for (int64_t ox = 0; ox < ow; ++ox) {
        std::copy(b.begin(), b.end(), acc.begin());
        for (int64_t ky = 0; ky < kh; ++ky) {
          const int64_t iy = oy * stride - pt + ky;
          if (iy < 0 || iy >= h) continue;
          for (int64_t kx = 0; kx < kw; ++kx) {
            const int64_t ix = ox * stride - pl + kx;
            if (ix < 0 || ix >= w) continue;
            const float* px = in + ((bn * h + iy) * w + ix) * c;
            const float* kr = k + (ky * kw + kx) * c;
            for (int64_t ch = 0; ch < c; ++ch) {
              acc[ch] += static_cast<double>(px[ch]) * static_cast<double>(kr[ch]);
            }
          }
        }
        float* po = dst + ((bn * oh + oy) * ow + ox) * c;
        for (int64_t ch = 0; ch < c; ++ch) po[ch] = static_cast<float>(acc[ch]);
      }
    }
  }
  out.CheckFinite("depthwise_conv2d");
  return out;
}

Tensor Dense(const Tensor& input, const Tensor& weights, const Tensor& bias) {
  RequireRank(input, 2, "dense input");
  RequireRank(weights, 2, "dense weights");
  RequireFloat(input, "dense");
  RequireFloat(weights, "dense");
  const int64_t n = input.dim(0), f = input.dim(1), k = weights.dim(1);
  if (weights.dim(0) != f) {
    Fail(ErrorCode::kShapeMismatch, "dense weights " + ShapeToString(weights.shape()) +
                                        " do not match input " + ShapeToString(input.shape()));
  }
  const std::vector<double> b = BiasOrZero(bias, k, "dense");
  Tensor out = Tensor::Zeros({n, k});
  const float* in = input.data().data();
  const float* wt = weights.data().data();
  float* dst = out.mutable_data().data();
  std::vector<double> acc(static_cast<size_t>(k));
  for (int64_t row = 0; row < n; ++row) {
    std::copy(b.begin(), b.end(), acc.begin());
    for (int64_t fi = 0; fi < f; ++fi) {
      const double x = in[row * f + fi];
      if (x == 0.0) continue;
      const float* wr = wt + fi * k;
      for (int64_t ki = 0; ki < k; ++ki) acc[ki] += x * static_cast<double>(wr[ki]);
    }
    for (int64_t ki = 0; ki < k; ++ki) dst[row * k + ki] = static_cast<float>(acc[ki]);
  }
  out.CheckFinite("dense");
  return out;
}

Tensor GlobalAveragePool(const Tensor& input) {
  RequireRank(input, 4, "global_average_pool");
  RequireFloat(input, "global_average_pool");
  const int64_t n = input.dim(0), hw = input.dim(1) * input.dim(2), c = input.dim(3);
  Tensor out = Tensor::Zeros({n, c});
  const float* in = input.data().data();
  float* dst = out.mutable_data().data();
  std::vector<double> acc(static_cast<size_t>(c));
  for (int64_t bn = 0; bn < n; ++bn) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (int64_t p = 0; p < hw; ++p) {
      const float* px = in + (bn * hw + p) * c;
      for (int64_t ch = 0; ch < c; ++ch) acc[ch] += px[ch];
    }
    for (int64_t ch = 0; ch < c; ++ch) {
      dst[bn * c + ch] = static_cast<float>(acc[ch] / static_cast<double>(hw));
    }
  }
  out.CheckFinite("global_average_pool");
  return out;
}

Tensor Apply(const Tensor& input, Activation kind) {
  RequireFloat(input, "activation");
  Tensor out = input;
  std::span<float> v = out.mutable_data();
  switch (kind) {
    case Activation::kRelu:
      for (float& x : v) x = std::max(x, 0.0f);
      break;
    case Activation::kRelu6:
      for (float& x : v) x = std::min(std::max(x, 0.0f), 6.0f);
      break;
    case Activation::kSigmoid:
      for (float& x : v) {
        const double d = x;
        x = static_cast<float>(d >= 0 ? 1.0 / (1.0 + std::exp(-d))
                                      : std::exp(d) / (1.0 + std::exp(d)));
      }
      break;
    case Activation::kSoftmax: {
      if (input.rank() == 0) break;
      const int64_t width = input.dim(input.rank() - 1);
      std::vector<double> e(static_cast<size_t>(width));
      for (size_t start = 0; start < v.size(); start += static_cast<size_t>(width)) {
        float* row = v.data() + start;
        const double mx = *std::max_element(row, row + width);
        double sum = 0.0;
        for (int64_t i = 0; i < width; ++i) {
          e[i] = std::exp(static_cast<double>(row[i]) - mx);
          sum += e[i];
        }
        for (int64_t i = 0; i < width; ++i) row[i] = static_cast<float>(e[i] / sum);
      }
      break;
    }
  }
  out.CheckFinite(std::string("activation ") + std::string(ActivationName(kind)));
  return out;
}

Tensor Add(const Tensor& a, const Tensor& b) {
  RequireFloat(a, "add");
  RequireFloat(b, "add");
  if (a.shape() != b.shape()) {
    Fail(ErrorCode::kShapeMismatch,
         "add operands " + ShapeToString(a.shape()) + " and " + ShapeToString(b.shape()));
  }
  Tensor out = a;
  std::span<float> v = out.mutable_data();
  std::span<const float> w = b.data();
  for (size_t i = 0; i < v.size(); ++i) v[i] += w[i];
  out.CheckFinite("add");
  return out;
}

Tensor Flatten(const Tensor& input) {
  if (input.rank() < 1) Fail(ErrorCode::kShapeMismatch, "flatten needs a batch axis");
  return input.Reshaped({input.dim(0), input.size() / input.dim(0)});
}

}  // namespace ops
}  // namespace ttml
