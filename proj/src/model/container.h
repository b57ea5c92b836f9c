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

#ifndef TTML_MODEL_CONTAINER_H_
#define TTML_MODEL_CONTAINER_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "tensor/tensor.h"

namespace ttml {

// Byte layout shared by .ttml models and .ttfc feature caches:
//
//   magic[4] | u32 version | u32 manifest_bytes | manifest (JSON text)
//   | blob section
//
// All integers little-endian. Blobs are concatenated in manifest order with
// no padding: float32 blobs as IEEE-754 values, qint8 blobs as the int8
// values followed by one float32 scale. The manifest's "blobs" array gives
// id, dtype, shape, offset (from the start of the blob section) and nbytes.
inline constexpr uint32_t kContainerVersion = 1;

struct NamedBlob {
  std::string id;
  Tensor tensor;
};

struct Container {
  nlohmann::json manifest;  // without the "blobs" entry
  std::vector<NamedBlob> blobs;
};

std::vector<uint8_t> EncodeContainer(std::string_view magic, const nlohmann::json& manifest,
                                     std::span<const NamedBlob> blobs);

// Throws kFormatError on bad magic, unknown version, malformed manifest or a
// blob section that does not match the manifest.
Container DecodeContainer(std::span<const uint8_t> bytes, std::string_view magic);

// Just the manifest text, blob table included.
std::string ReadManifestText(std::span<const uint8_t> bytes, std::string_view magic);

}  // namespace ttml

#endif  // TTML_MODEL_CONTAINER_H_
