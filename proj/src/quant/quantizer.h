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

#ifndef TTML_QUANT_QUANTIZER_H_
#define TTML_QUANT_QUANTIZER_H_

#include <cstdint>
#include <filesystem>
#include <string>

#include "json.hpp"
#include "model/graph.h"
#include "tensor/tensor.h"

namespace ttml {

inline constexpr std::string_view kQuantizationScheme = "int8-symmetric-per-tensor";

// Symmetric per-tensor int8: scale = max|w| / 127 (1 for an all-zero
// tensor), q = round_half_away(w / scale) clamped to [-127, 127].
Tensor QuantizeBlob(const Tensor& weights);

// scale * q as float32.
Tensor DequantizeBlob(const Tensor& blob);

// Quantizes every conv2d / depthwise_conv2d / dense kernel. Biases stay
// float32. Throws kAlreadyQuantized if the graph holds any qint8 blob.
ModelGraph QuantizeModel(const ModelGraph& graph);

struct SizeReport {
  uint64_t before_bytes = 0;
  uint64_t after_bytes = 0;
  double reduction = 0.0;  // 1 - after/before

  std::string ToTable() const;
  nlohmann::json ToJson() const;
};

double SizeReduction(uint64_t before_bytes, uint64_t after_bytes);
SizeReport MakeSizeReport(const std::filesystem::path& before, const std::filesystem::path& after);

}  // namespace ttml

#endif  // TTML_QUANT_QUANTIZER_H_
