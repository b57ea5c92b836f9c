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

#include "pipeline/run_config.h"

#include <initializer_list>
#include <string_view>

#include "common/error.h"
#include "common/files.h"

namespace ttml {
namespace {

void CheckKeys(const nlohmann::json& j, std::string_view where,
               std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) Fail(ErrorCode::kConfigError, std::string(where) + " must be an object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (std::string_view a : allowed) ok = ok || key == a;
    if (!ok) Fail(ErrorCode::kConfigError, "unknown config key '" + std::string(where) + "." + key + "'");
  }
}

template <typename T>
void Take(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

void RunConfig::Check() const {
  augment.Check();
  train.Check();
  if (drop_last < 0) Fail(ErrorCode::kConfigError, "drop_last must be >= 0");
  if (augment_rounds < 0) Fail(ErrorCode::kConfigError, "augment rounds must be >= 0");
  if (dropout >= 1.0) Fail(ErrorCode::kConfigError, "dropout must be < 1");
  if (extract_batch_size < 1) Fail(ErrorCode::kConfigError, "batch size must be >= 1");
  if (threads < 0) Fail(ErrorCode::kConfigError, "threads must be >= 0");
  if (!(audio.silence_threshold >= 0.0)) Fail(ErrorCode::kConfigError, "silence threshold must be >= 0");
  if (!(split.ratio > 0.0 && split.ratio <= 1.0)) Fail(ErrorCode::kConfigError, "split ratio must be in (0, 1]");
  if (aggregation != "auto") ParseAggregation(aggregation);
}

double RunConfig::EffectiveDropout() const {
  if (dropout >= 0.0) return dropout;
  return task == Task::kImage ? 0.5 : 0.0;
}

Aggregation RunConfig::EffectiveAggregation() const {
  if (aggregation != "auto") return ParseAggregation(aggregation);
  return task == Task::kAudio ? Aggregation::kPerClip : Aggregation::kPerSample;
}

int RunConfig::EffectiveAugmentRounds() const {
  if (!augment.enabled || task != Task::kImage) return 1;
  return augment_rounds > 0 ? augment_rounds : train.epochs;
}

std::filesystem::path RunConfig::ReportDir() const {
  if (!report_dir.empty()) return report_dir;
  const std::filesystem::path out(output);
  return out.parent_path() / (out.stem().string() + "_report");
}

std::filesystem::path RunConfig::CacheDir() const {
  if (!cache_dir.empty()) return cache_dir;
  const std::filesystem::path out(output);
  return out.parent_path() / (out.stem().string() + "_cache");
}

nlohmann::json RunConfig::ModelJson() const {
  nlohmann::json j;
  j["task"] = TaskName(task);
  j["dataset"] = dataset;
  j["backbone"] = backbone;
  j["drop_last"] = drop_last;
  j["split"] = {{"ratio", split.ratio}, {"seed", split.seed}};
  j["augment"] = {{"enabled", augment.enabled},
                  {"hflip_prob", augment.hflip_prob},
                  {"rotation_max_deg", augment.rotation_max_deg},
                  {"zoom", {augment.zoom_lo, augment.zoom_hi}},
                  {"seed", augment.seed},
                  {"rounds", augment_rounds}};
  j["train"] = train;
  j["train"]["dropout"] = dropout;
  j["quantize"] = quantize;
  j["audio"] = {{"trim", audio.trim}, {"silence_threshold", audio.silence_threshold}};
  j["extract"] = {{"batch_size", extract_batch_size}};
  j["eval"] = {{"aggregation", aggregation}};
  return j;
}

nlohmann::json RunConfig::ToJson() const {
  nlohmann::json j = ModelJson();
  j["output"] = output;
  j["report_dir"] = report_dir;
  j["cache_dir"] = cache_dir;
  j["extract"]["cache"] = use_cache;
  j["threads"] = threads;
  return j;
}

RunConfig RunConfigFromJson(const nlohmann::json& j, RunConfig c) {
  try {
    CheckKeys(j, "config",
              {"task", "dataset", "backbone", "output", "report_dir", "cache_dir", "drop_last", "split",
               "augment", "train", "quantize", "audio", "extract", "eval", "threads"});
    if (j.contains("task")) c.task = ParseTask(j.at("task").get<std::string>());
    Take(j, "dataset", c.dataset);
    Take(j, "backbone", c.backbone);
    Take(j, "output", c.output);
    Take(j, "report_dir", c.report_dir);
    Take(j, "cache_dir", c.cache_dir);
    Take(j, "drop_last", c.drop_last);
    Take(j, "quantize", c.quantize);
    Take(j, "threads", c.threads);
    if (j.contains("split")) {
      const auto& s = j.at("split");
      CheckKeys(s, "split", {"ratio", "seed"});
      Take(s, "ratio", c.split.ratio);
      Take(s, "seed", c.split.seed);
    }
    if (j.contains("augment")) {
      const auto& a = j.at("augment");
      CheckKeys(a, "augment", {"enabled", "hflip_prob", "rotation_max_deg", "zoom", "seed", "rounds"});
      Take(a, "enabled", c.augment.enabled);
      Take(a, "hflip_prob", c.augment.hflip_prob);
      Take(a, "rotation_max_deg", c.augment.rotation_max_deg);
      if (a.contains("zoom")) {
        const auto z = a.at("zoom").get<std::vector<double>>();
        if (z.size() != 2) Fail(ErrorCode::kConfigError, "augment.zoom must be [lo, hi]");
        c.augment.zoom_lo = z[0];
        c.augment.zoom_hi = z[1];
      }
      Take(a, "seed", c.augment.seed);
      Take(a, "rounds", c.augment_rounds);
    }
    if (j.contains("train")) {
      nlohmann::json t = j.at("train");
      CheckKeys(t, "train", {"learning_rate", "epochs", "batch_size", "seed", "optimizer", "beta1",
                             "beta2", "epsilon", "dropout"});
      if (t.contains("dropout")) {
        c.dropout = t.at("dropout").get<double>();
        t.erase("dropout");
      }
      nlohmann::json merged = c.train;
      merged.update(t);
      c.train = merged.get<TrainConfig>();
    }
    if (j.contains("audio")) {
      const auto& a = j.at("audio");
      CheckKeys(a, "audio", {"trim", "silence_threshold"});
      Take(a, "trim", c.audio.trim);
      Take(a, "silence_threshold", c.audio.silence_threshold);
    }
    if (j.contains("extract")) {
      const auto& e = j.at("extract");
      CheckKeys(e, "extract", {"batch_size", "cache"});
      Take(e, "batch_size", c.extract_batch_size);
      Take(e, "cache", c.use_cache);
    }
    if (j.contains("eval")) {
      const auto& e = j.at("eval");
      CheckKeys(e, "eval", {"aggregation"});
      Take(e, "aggregation", c.aggregation);
    }
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kConfigError, std::string("bad config value: ") + e.what());
  }
  return c;
}

RunConfig LoadRunConfig(const std::filesystem::path& path) {
  std::string text;
  try {
    text = ReadTextFile(path);
  } catch (const Error& e) {
    Fail(ErrorCode::kConfigError, e.what());
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kConfigError, "config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return RunConfigFromJson(j);
}

}  // namespace ttml
