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

#ifndef TTML_FEATURES_FEATURES_H_
#define TTML_FEATURES_FEATURES_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "model/graph.h"
#include "tensor/tensor.h"

namespace ttml {

inline constexpr char kCacheMagic[] = "TTFC";

// One backbone input row. `input` has a leading batch dimension of 1.
struct Sample {
  Tensor input;
  int64_t label = 0;
  int64_t clip_id = -1;  // source clip for audio patches
};

// Yields samples in order; std::nullopt ends the stream.
using SampleStream = std::function<std::optional<Sample>()>;

SampleStream StreamFromVector(std::vector<Sample> samples);

// Expands clips of (P, ...) preprocessed patches into P samples each, all
// tagged with the clip's label and index. `load(i)` preprocesses clip i.
struct ClipTensor {
  Tensor patches;
  int64_t label = 0;
};
SampleStream StreamFromClips(int64_t clip_count, std::function<ClipTensor(int64_t)> load);

struct FeatureCache {
  Tensor features;  // (rows, ...backbone output dims)
  Tensor labels;    // (rows, K) one-hot
  std::vector<std::string> class_names;
  std::vector<int64_t> clip_ids;  // one per row; -1 when not applicable
  std::string backbone_fingerprint;
  std::string preprocessing_id;
  std::string source_digest;  // identifies the input file list

  int64_t rows() const { return features.empty() ? 0 : features.dim(0); }
  int64_t label_of(int64_t row) const;
  bool operator==(const FeatureCache&) const = default;
};

struct ExtractOptions {
  int batch_size = 32;
  int threads = 1;
  // Called after each backbone batch with its index and row count.
  std::function<void(int64_t, int64_t)> on_batch;
};

// Runs the frozen backbone over the stream in batches of batch_size. Stops
// once sample_count rows are filled (all rows when unset); a short final
// batch is kept. Identity fields (fingerprint, preprocessing id, digest)
// are left for the caller.
FeatureCache ExtractFeatures(const ModelGraph& backbone, const SampleStream& stream,
                             std::optional<int64_t> sample_count,
                             const std::vector<std::string>& class_names,
                             const ExtractOptions& options = {});

// Identity a cache must carry to be reused.
struct CacheKey {
  std::string backbone_fingerprint;
  std::string preprocessing_id;
  std::string source_digest;
};

void SaveCache(const FeatureCache& cache, const std::filesystem::path& path);

// Throws kFormatError on a malformed file and kStaleCache when `expect` is
// given and any field differs.
FeatureCache LoadCache(const std::filesystem::path& path,
                       const std::optional<CacheKey>& expect = std::nullopt);

}  // namespace ttml

#endif  // TTML_FEATURES_FEATURES_H_
