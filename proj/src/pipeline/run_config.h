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

#ifndef TTML_PIPELINE_RUN_CONFIG_H_
#define TTML_PIPELINE_RUN_CONFIG_H_

#include <filesystem>
#include <string>

#include "audio/audio.h"
#include "eval/evaluator.h"
#include "head/head.h"
#include "image/image.h"
#include "json.hpp"
#include "pipeline/dataset.h"

namespace ttml {

// Every knob of a create run. Serialized as JSON; a config file may set any
// subset of keys and unknown keys are rejected.
struct RunConfig {
  Task task = Task::kImage;
  std::string dataset;
  std::string backbone;
  std::string output = "model.ttml";
  std::string report_dir;  // default: <output stem>_report next to output
  std::string cache_dir;   // default: <output stem>_cache next to output
  int64_t drop_last = 0;   // backbone nodes to remove before extraction

  SplitSpec split;
  AugmentConfig augment;
  int augment_rounds = 0;  // 0: one round per epoch
  TrainConfig train;
  double dropout = -1.0;   // < 0: 0.5 for image heads, 0 for audio heads
  bool quantize = true;
  AudioFrontendConfig audio;
  int extract_batch_size = 32;
  bool use_cache = true;
  std::string aggregation = "auto";  // per_clip for audio, per_sample for images
  int threads = 0;                   // 0: all cores

  void Check() const;  // kConfigError

  double EffectiveDropout() const;
  Aggregation EffectiveAggregation() const;
  int EffectiveAugmentRounds() const;
  std::filesystem::path ReportDir() const;
  std::filesystem::path CacheDir() const;

  nlohmann::json ToJson() const;
  // The settings that determine the model; output locations, caching and
  // thread count are left out so the packaged file does not depend on them.
  nlohmann::json ModelJson() const;
};

// Applies the keys present in `j` on top of `base`.
RunConfig RunConfigFromJson(const nlohmann::json& j, RunConfig base = {});
RunConfig LoadRunConfig(const std::filesystem::path& path);

}  // namespace ttml

#endif  // TTML_PIPELINE_RUN_CONFIG_H_
