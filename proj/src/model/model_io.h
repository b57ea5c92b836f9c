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

#ifndef TTML_MODEL_MODEL_IO_H_
#define TTML_MODEL_MODEL_IO_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "model/graph.h"

namespace ttml {

inline constexpr std::string_view kModelMagic = "TTML";

// Validates, then encodes. Blobs appear in order of first reference by the
// node list; unreferenced blobs are not written. Identical graphs produce
// identical bytes.
std::vector<uint8_t> SerializeModel(const ModelGraph& graph);
ModelGraph DeserializeModel(std::span<const uint8_t> bytes);

// Returns the number of bytes written.
uint64_t SaveModel(const ModelGraph& graph, const std::filesystem::path& path);
ModelGraph LoadModel(const std::filesystem::path& path);

// Pretty manifest of a .ttml file, for `inspect`.
std::string InspectModelFile(const std::filesystem::path& path);

}  // namespace ttml

#endif  // TTML_MODEL_MODEL_IO_H_
