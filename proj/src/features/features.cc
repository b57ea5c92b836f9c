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

#include "features/features.h"

#include <algorithm>
#include <memory>
#include <utility>

#include "common/error.h"
#include "common/files.h"
#include "engine/engine.h"
#include "model/container.h"

namespace ttml {

SampleStream StreamFromVector(std::vector<Sample> samples) {
  auto state = std::make_shared<std::pair<std::vector<Sample>, size_t>>(std::move(samples), 0);
  return [state]() -> std::optional<Sample> {
    if (state->second >= state->first.size()) return std::nullopt;
    return state->first[state->second++];
  };
}

SampleStream StreamFromClips(int64_t clip_count, std::function<ClipTensor(int64_t)> load) {
  struct State {
    int64_t next_clip = 0;
    ClipTensor current;
    int64_t next_patch = 0;
  };
  auto state = std::make_shared<State>();
  return [state, clip_count, load = std::move(load)]() -> std::optional<Sample> {
    while (state->current.patches.empty() || state->next_patch >= state->current.patches.dim(0)) {
      if (state->next_clip >= clip_count) return std::nullopt;
      state->current = load(state->next_clip++);
      state->next_patch = 0;
    }
    const int64_t p = state->next_patch++;
    return Sample{state->current.patches.Slice(p, p + 1), state->current.label,
                  state->next_clip - 1};
  };
}

int64_t FeatureCache::label_of(int64_t row) const {
  const int64_t k = labels.dim(1);
  const auto r = labels.data().subspan(static_cast<size_t>(row * k), static_cast<size_t>(k));
  return static_cast<int64_t>(std::max_element(r.begin(), r.end()) - r.begin());
}

FeatureCache ExtractFeatures(const ModelGraph& backbone, const SampleStream& stream,
                             std::optional<int64_t> sample_count,
                             const std::vector<std::string>& class_names,
                             const ExtractOptions& options) {
  if (options.batch_size < 1) Fail(ErrorCode::kConfigError, "batch size must be >= 1");
  if (sample_count && *sample_count < 1) Fail(ErrorCode::kEmptyDataset, "sample count is zero");
  const auto k = static_cast<int64_t>(class_names.size());
  const ExecutionPlan plan(backbone);
  Shape want = plan.input_shape();
  want[0] = 1;

  std::vector<float> features;
  std::vector<int64_t> labels;
  std::vector<int64_t> clips;
  Shape row_shape;
  int64_t filled = 0;
  for (int64_t batch_index = 0;; ++batch_index) {
    int64_t limit = options.batch_size;
    if (sample_count) limit = std::min(limit, *sample_count - filled);
    std::vector<Tensor> inputs;
    while (static_cast<int64_t>(inputs.size()) < limit) {
      std::optional<Sample> s = stream();
      if (!s) break;
      if (s->input.shape() != want) {
        Fail(ErrorCode::kShapeMismatch, "sample shape " + ShapeToString(s->input.shape()) +
                                            " does not match backbone input " + ShapeToString(want));
      }
      if (s->label < 0 || s->label >= k) {
        Fail(ErrorCode::kValidationError, "label " + std::to_string(s->label) + " out of range");
      }
      inputs.push_back(std::move(s->input));
      labels.push_back(s->label);
      clips.push_back(s->clip_id);
    }
    if (inputs.empty()) break;
    const Tensor out = plan.Run(Stack(inputs), options.threads);
    row_shape = out.shape();
    features.insert(features.end(), out.data().begin(), out.data().end());
    filled += static_cast<int64_t>(inputs.size());
    if (options.on_batch) options.on_batch(batch_index, static_cast<int64_t>(inputs.size()));
    if (sample_count && filled >= *sample_count) break;
  }
  if (filled == 0) Fail(ErrorCode::kEmptyDataset, "no samples to extract");
  if (sample_count && filled < *sample_count) {
    Fail(ErrorCode::kEmptyDataset, "stream ended after " + std::to_string(filled) + " of " +
                                       std::to_string(*sample_count) + " samples");
  }

  FeatureCache cache;
  row_shape[0] = filled;
  cache.features = Tensor::FromData(row_shape, std::move(features));
  std::vector<float> onehot(static_cast<size_t>(filled * k), 0.0f);
  for (int64_t i = 0; i < filled; ++i) onehot[static_cast<size_t>(i * k + labels[i])] = 1.0f;
  cache.labels = Tensor::FromData({filled, k}, std::move(onehot));
  cache.class_names = class_names;
  cache.clip_ids = std::move(clips);
  return cache;
}

void SaveCache(const FeatureCache& cache, const std::filesystem::path& path) {
  nlohmann::json manifest;
  manifest["format"] = "ttfc";
  manifest["class_names"] = cache.class_names;
  manifest["clip_ids"] = cache.clip_ids;
  manifest["backbone_fingerprint"] = cache.backbone_fingerprint;
  manifest["preprocessing_id"] = cache.preprocessing_id;
  manifest["source_digest"] = cache.source_digest;
  const std::vector<NamedBlob> blobs = {{"features", cache.features}, {"labels", cache.labels}};
  WriteFileBytes(path, EncodeContainer(kCacheMagic, manifest, blobs));
}

FeatureCache LoadCache(const std::filesystem::path& path, const std::optional<CacheKey>& expect) {
  const Container c = DecodeContainer(ReadFileBytes(path), kCacheMagic);
  FeatureCache cache;
  try {
    const nlohmann::json& m = c.manifest;
    if (m.at("format") != "ttfc") Fail(ErrorCode::kFormatError, "not a feature cache");
    cache.class_names = m.at("class_names").get<std::vector<std::string>>();
    cache.clip_ids = m.at("clip_ids").get<std::vector<int64_t>>();
    cache.backbone_fingerprint = m.at("backbone_fingerprint").get<std::string>();
    cache.preprocessing_id = m.at("preprocessing_id").get<std::string>();
    cache.source_digest = m.at("source_digest").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kFormatError, std::string("bad cache manifest: ") + e.what());
  }
  for (const NamedBlob& b : c.blobs) {
    if (b.id == "features") cache.features = b.tensor;
    if (b.id == "labels") cache.labels = b.tensor;
  }
  const auto k = static_cast<int64_t>(cache.class_names.size());
  if (cache.features.empty() || cache.labels.empty() || cache.features.rank() < 2 ||
      cache.labels.rank() != 2 || cache.labels.dim(0) != cache.features.dim(0) ||
      cache.labels.dim(1) != k ||
      static_cast<int64_t>(cache.clip_ids.size()) != cache.features.dim(0)) {
    Fail(ErrorCode::kFormatError, "feature cache tables are inconsistent");
  }
  const auto l = cache.labels.data();
  for (int64_t i = 0; i < cache.labels.dim(0); ++i) {
    int ones = 0;
    for (int64_t j = 0; j < k; ++j) {
      const float v = l[static_cast<size_t>(i * k + j)];
      if (v == 1.0f) ++ones;
      else if (v != 0.0f) ones = 2;
    }
    if (ones != 1) Fail(ErrorCode::kFormatError, "label row " + std::to_string(i) + " is not one-hot");
  }
  if (expect) {
    auto check = [](const std::string& what, const std::string& have, const std::string& want) {
      if (have != want) {
        Fail(ErrorCode::kStaleCache, "cache " + what + " is " + have + ", expected " + want);
      }
    };
    check("backbone fingerprint", cache.backbone_fingerprint, expect->backbone_fingerprint);
    check("preprocessing id", cache.preprocessing_id, expect->preprocessing_id);
    check("source digest", cache.source_digest, expect->source_digest);
  }
  return cache;
}

}  // namespace ttml
