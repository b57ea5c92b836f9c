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

#ifndef TTML_PIPELINE_PIPELINE_H_
#define TTML_PIPELINE_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "audio/audio.h"
#include "common/error.h"
#include "common/rng.h"
#include "engine/engine.h"
#include "eval/evaluator.h"
#include "features/features.h"
#include "head/head.h"
#include "image/image.h"
#include "model/graph.h"
#include "pipeline/dataset.h"
#include "pipeline/run_config.h"
#include "quant/quantizer.h"

namespace ttml {

using Logger = std::function<void(const std::string&)>;

// Preprocessing ids recorded in model metadata and cache files.
std::string ImagePreprocessingId();
std::string AudioPreprocessingId(const AudioFrontendConfig& cfg);

struct Preprocessing {
  Task task = Task::kImage;
  AudioFrontendConfig audio;
};

// Throws kFormatError for ids this build does not know.
Preprocessing ParsePreprocessingId(const std::string& id);

// Backbone input shape for a task, batch wildcarded.
Shape TaskInputShape(Task task);

// One media file as model input: (1, 224, 224, 3) for images, (P, 96, 64, 1)
// for audio. `augment` applies to images only and needs `rng`.
Tensor LoadMediaInput(const std::filesystem::path& path, const Preprocessing& prep,
                      const AugmentConfig* augment = nullptr, Rng* rng = nullptr);

struct Backbone {
  ModelGraph graph;
  std::string fingerprint;  // file hash plus truncation depth
};

// Loads, truncates and checks the input shape against the task.
Backbone LoadBackbone(const std::filesystem::path& path, int64_t drop_last, Task task);

struct DatasetFeatures {
  std::vector<FeatureCache> train_rounds;
  FeatureCache val;
};

enum class CacheMode {
  kReuseOrBuild,  // valid caches are reused, anything else is rebuilt
  kRequire,       // every cache must exist and match; nothing is extracted
};

// Extracts (or reuses cached) features for both splits of `manifest`.
DatasetFeatures ExtractDataset(const RunConfig& cfg, const DatasetManifest& manifest,
                               const Backbone& backbone, const Logger& log,
                               CacheMode mode = CacheMode::kReuseOrBuild);

// Cache file names inside a cache directory.
std::filesystem::path TrainCachePath(const std::filesystem::path& dir, int round);
std::filesystem::path ValCachePath(const std::filesystem::path& dir);

// All train_r*.ttfc rounds present in `dir`, in round order.
std::vector<FeatureCache> LoadTrainRounds(const std::filesystem::path& dir);

HeadSpec HeadSpecFor(const RunConfig& cfg);

// Labeled items for one split, preprocessed without augmentation.
ItemStream DatasetItems(const DatasetManifest& manifest, bool train, const Preprocessing& prep);

struct CreateResult {
  ModelGraph model;
  uint64_t model_bytes = 0;
  std::optional<SizeReport> size;  // when quantized
  EvalReport report;
  TrainHistory history;
  std::vector<std::filesystem::path> report_files;
};

struct ExtractResult {
  DatasetManifest manifest;
  Backbone backbone;
  DatasetFeatures features;
};

// config, ingest, backbone and extract stages of create.
ExtractResult RunExtract(const RunConfig& cfg, const Logger& log, CacheMode mode = CacheMode::kReuseOrBuild);

// ingest -> extract -> train -> export -> compose -> quantize -> save ->
// evaluate on the validation split -> emit reports. Errors carry the stage
// name in their message.
CreateResult RunCreate(const RunConfig& cfg, const Logger& log);

// create without extraction: features come from the caches written by an
// earlier extract with the same dataset, backbone and preprocessing.
CreateResult RunTrain(const RunConfig& cfg, const Logger& log);

// Evaluates a packaged model on one split of a dataset directory.
EvalReport RunEval(const ModelGraph& model, const DatasetManifest& manifest, bool train_split,
                   Aggregation aggregation, int threads);

// Mean class probabilities over the media file's inputs. Throws
// kPreprocessingMismatch when the file belongs to the other task.
Prediction RunPredict(const ModelGraph& model, const std::filesystem::path& media, int threads);

// Quantizes a float model file; returns the size comparison.
SizeReport RunQuantize(const std::filesystem::path& in, const std::filesystem::path& out);

// Runs `fn`, prefixing any Error message with "[stage] ".
template <typename F>
auto InStage(const char* stage, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.code(), "[" + std::string(stage) + "] " + e.what());
  }
}

}  // namespace ttml

#endif  // TTML_PIPELINE_PIPELINE_H_
