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

#include "model/container.h"

#include <bit>
#include <cstring>

#include "common/error.h"

namespace ttml {
namespace {

using nlohmann::json;

static_assert(std::endian::native == std::endian::little,
              "container I/O assumes a little-endian host");
static_assert(sizeof(float) == 4);

void PutU32(std::vector<uint8_t>& out, uint32_t v) {
  uint8_t b[4];
  std::memcpy(b, &v, 4);
  out.insert(out.end(), b, b + 4);
}

uint32_t GetU32(std::span<const uint8_t> bytes, size_t at) {
  uint32_t v;
  std::memcpy(&v, bytes.data() + at, 4);
  return v;
}

uint64_t BlobBytes(const Tensor& t) {
  return t.is_quantized() ? static_cast<uint64_t>(t.size()) + 4
                          : static_cast<uint64_t>(t.size()) * 4;
}

size_t HeaderEnd(std::span<const uint8_t> bytes, std::string_view magic) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), magic.data(), 4) != 0) {
    Fail(ErrorCode::kFormatError, "bad magic; expected '" + std::string(magic) + "'");
  }
  const uint32_t version = GetU32(bytes, 4);
  if (version != kContainerVersion) {
    Fail(ErrorCode::kFormatError, "unsupported container version " + std::to_string(version));
  }
  const uint64_t manifest_len = GetU32(bytes, 8);
  if (12 + manifest_len > bytes.size()) Fail(ErrorCode::kFormatError, "truncated manifest");
  return 12 + static_cast<size_t>(manifest_len);
}

}  // namespace

std::vector<uint8_t> EncodeContainer(std::string_view magic, const json& manifest,
                                     std::span<const NamedBlob> blobs) {
  if (magic.size() != 4) Fail(ErrorCode::kInternal, "container magic must be 4 bytes");
  json full = manifest;
  json table = json::array();
  uint64_t offset = 0;
  for (const NamedBlob& b : blobs) {
    const uint64_t n = BlobBytes(b.tensor);
    table.push_back({{"id", b.id},
                     {"dtype", b.tensor.is_quantized() ? "qint8" : "float32"},
                     {"shape", b.tensor.shape()},
                     {"offset", offset},
                     {"nbytes", n}});
    offset += n;
  }
  full["blobs"] = std::move(table);
  const std::string text = full.dump(1);

  std::vector<uint8_t> out;
  out.reserve(12 + text.size() + offset);
  out.insert(out.end(), magic.begin(), magic.end());
  PutU32(out, kContainerVersion);
  PutU32(out, static_cast<uint32_t>(text.size()));
  out.insert(out.end(), text.begin(), text.end());
  for (const NamedBlob& b : blobs) {
    if (b.tensor.is_quantized()) {
      const auto q = b.tensor.qdata();
      const auto* p = reinterpret_cast<const uint8_t*>(q.data());
      out.insert(out.end(), p, p + q.size());
      const float s = b.tensor.scale();
      const auto* sp = reinterpret_cast<const uint8_t*>(&s);
      out.insert(out.end(), sp, sp + 4);
    } else {
      const auto d = b.tensor.data();
      const auto* p = reinterpret_cast<const uint8_t*>(d.data());
      out.insert(out.end(), p, p + d.size() * 4);
    }
  }
  return out;
}

Container DecodeContainer(std::span<const uint8_t> bytes, std::string_view magic) {
  const size_t blob_start = HeaderEnd(bytes, magic);
  Container c;
  try {
    c.manifest = json::parse(bytes.begin() + 12, bytes.begin() + static_cast<ptrdiff_t>(blob_start));
  } catch (const json::exception& e) {
    Fail(ErrorCode::kFormatError, std::string("malformed manifest: ") + e.what());
  }
  if (!c.manifest.is_object() || !c.manifest.contains("blobs") || !c.manifest["blobs"].is_array()) {
    Fail(ErrorCode::kFormatError, "manifest lacks a blob table");
  }
  const uint64_t section = bytes.size() - blob_start;
  uint64_t expected_offset = 0;
  try {
    for (const json& entry : c.manifest["blobs"]) {
      NamedBlob blob;
      blob.id = entry.at("id").get<std::string>();
      const std::string dtype = entry.at("dtype").get<std::string>();
      Shape shape = entry.at("shape").get<Shape>();
      const uint64_t offset = entry.at("offset").get<uint64_t>();
      const uint64_t nbytes = entry.at("nbytes").get<uint64_t>();
      for (int64_t d : shape) {
        if (d <= 0) Fail(ErrorCode::kFormatError, "blob '" + blob.id + "' has a bad shape");
      }
      const uint64_t count = static_cast<uint64_t>(NumElements(shape));
      if (offset != expected_offset || offset + nbytes > section) {
        Fail(ErrorCode::kFormatError, "blob '" + blob.id + "' is truncated or misplaced");
      }
      const uint8_t* p = bytes.data() + blob_start + offset;
      if (dtype == "float32") {
        if (nbytes != count * 4) Fail(ErrorCode::kFormatError, "blob '" + blob.id + "' size mismatch");
        std::vector<float> v(count);
        std::memcpy(v.data(), p, nbytes);
        blob.tensor = Tensor::FromData(std::move(shape), std::move(v));
      } else if (dtype == "qint8") {
        if (nbytes != count + 4) Fail(ErrorCode::kFormatError, "blob '" + blob.id + "' size mismatch");
        std::vector<int8_t> q(count);
        std::memcpy(q.data(), p, count);
        float scale;
        std::memcpy(&scale, p + count, 4);
        blob.tensor = Tensor::Quantized(std::move(shape), std::move(q), scale);
      } else {
        Fail(ErrorCode::kFormatError, "blob '" + blob.id + "' has unknown dtype '" + dtype + "'");
      }
      expected_offset = offset + nbytes;
      c.blobs.push_back(std::move(blob));
    }
  } catch (const json::exception& e) {
    Fail(ErrorCode::kFormatError, std::string("malformed blob table: ") + e.what());
  }
  if (expected_offset != section) {
    Fail(ErrorCode::kFormatError, "blob section has " + std::to_string(section - expected_offset) +
                                      " unexpected trailing bytes");
  }
  c.manifest.erase("blobs");
  return c;
}

std::string ReadManifestText(std::span<const uint8_t> bytes, std::string_view magic) {
  const size_t end = HeaderEnd(bytes, magic);
  return std::string(bytes.begin() + 12, bytes.begin() + static_cast<ptrdiff_t>(end));
}

}  // namespace ttml
