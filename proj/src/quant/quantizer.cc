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

#include "quant/quantizer.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <system_error>

#include "common/error.h"
#include "common/format.h"

namespace ttml {

Tensor QuantizeBlob(const Tensor& weights) {
  if (weights.is_quantized()) Fail(ErrorCode::kAlreadyQuantized, "blob is already qint8");
  float max_abs = 0.0f;
  for (float w : weights.data()) max_abs = std::max(max_abs, std::fabs(w));
  const float scale = max_abs > 0.0f ? max_abs / 127.0f : 1.0f;
  std::vector<int8_t> q(weights.data().size());
  for (size_t i = 0; i < q.size(); ++i) {
    const double r = std::round(static_cast<double>(weights.data()[i]) / scale);
    q[i] = static_cast<int8_t>(std::clamp(r, -127.0, 127.0));
  }
  return Tensor::Quantized(weights.shape(), std::move(q), scale);
}

Tensor DequantizeBlob(const Tensor& blob) {
  if (!blob.is_quantized()) return blob;
  std::vector<float> w(blob.qdata().size());
  for (size_t i = 0; i < w.size(); ++i) w[i] = blob.scale() * static_cast<float>(blob.qdata()[i]);
  return Tensor::FromData(blob.shape(), std::move(w));
}

ModelGraph QuantizeModel(const ModelGraph& graph) {
  for (const auto& [id, t] : graph.weights) {
    if (t.is_quantized()) Fail(ErrorCode::kAlreadyQuantized, "blob '" + id + "' is already qint8");
  }
  Validate(graph);
  std::set<std::string> kernels;
  for (const GraphNode& n : graph.nodes) {
    if ((n.op == OpKind::kConv2d || n.op == OpKind::kDepthwiseConv2d || n.op == OpKind::kDense) &&
        !n.weight_refs.empty()) {
      kernels.insert(n.weight_refs[0]);
    }
  }
  ModelGraph out = graph;
  for (const std::string& id : kernels) out.weights[id] = QuantizeBlob(graph.weights.at(id));
  out.metadata[std::string(meta::kQuantization)] = std::string(kQuantizationScheme);
  Validate(out);
  return out;
}

double SizeReduction(uint64_t before_bytes, uint64_t after_bytes) {
  if (before_bytes == 0) return 0.0;
  return 1.0 - static_cast<double>(after_bytes) / static_cast<double>(before_bytes);
}

SizeReport MakeSizeReport(const std::filesystem::path& before, const std::filesystem::path& after) {
  SizeReport r;
  std::error_code ec;
  r.before_bytes = std::filesystem::file_size(before, ec);
  if (ec) Fail(ErrorCode::kIoError, "cannot stat '" + before.string() + "': " + ec.message());
  r.after_bytes = std::filesystem::file_size(after, ec);
  if (ec) Fail(ErrorCode::kIoError, "cannot stat '" + after.string() + "': " + ec.message());
  r.reduction = SizeReduction(r.before_bytes, r.after_bytes);
  return r;
}

std::string SizeReport::ToTable() const {
  std::ostringstream os;
  os << "                 bytes        MB\n";
  auto row = [&](const char* name, uint64_t b) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%-10s %12llu %9.2f\n", name, static_cast<unsigned long long>(b),
                  static_cast<double>(b) / 1e6);
    os << buf;
  };
  row("before", before_bytes);
  row("after", after_bytes);
  os << "reduction  " << FormatPercent(reduction) << '\n';
  return os.str();
}

nlohmann::json SizeReport::ToJson() const {
  return {{"before_bytes", before_bytes},
          {"after_bytes", after_bytes},
          {"reduction", reduction},
          {"reduction_percent", FormatPercent(reduction)}};
}

}  // namespace ttml
