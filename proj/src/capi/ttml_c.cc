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

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <stdexcept>
#include <exception>
#include <new>
#include <string>
#include <utility>
#include <vector>

#include "common/error.h"
#include "engine/engine.h"
#include "json.hpp"
#include "model/fixtures.h"
#include "model/model_io.h"
#include "pipeline/pipeline.h"
#include "ttml/ttml.h"

struct ttml_model {
  ttml::ModelGraph graph;
  ttml::ExecutionPlan plan;
  std::vector<std::string> labels;
};

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

thread_local std::string g_last_error;

struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

ttml_status StatusOf(ttml::ErrorCode code) { return static_cast<ttml_status>(static_cast<int>(code)); }

template <typename F>
ttml_status Guard(F&& fn) {
  g_last_error.clear();
  try {
    fn();
    return TTML_OK;
  } catch (const ttml::Error& e) {
    g_last_error = e.what();
    return StatusOf(e.code());
  } catch (const InvalidArgument& e) {
    g_last_error = e.what();
    return TTML_INVALID_ARGUMENT;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown error";
  }
  return TTML_INTERNAL;
}

char* Dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void Require(const void* p, const char* what) {
  if (p == nullptr) throw InvalidArgument(std::string(what) + " must not be NULL");
}

json ParseJson(const char* text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ttml::Error(ttml::ErrorCode::kConfigError, std::string("invalid ") + what + " JSON: " + e.what());
  }
}

ttml::RunConfig ConfigFrom(const char* config_json) {
  Require(config_json, "config_json");
  ttml::RunConfig cfg = ttml::RunConfigFromJson(ParseJson(config_json, "config"));
  cfg.Check();
  return cfg;
}

ttml::Logger LoggerFor(ttml_log_fn log, void* user) {
  return [log, user](const std::string& line) {
    if (log != nullptr) log(line.c_str(), user);
  };
}

json ReportJson(const ttml::EvalReport& r) {
  json per_class = json::array();
  for (size_t k = 0; k < r.class_names.size(); ++k) {
    per_class.push_back({{"name", r.class_names[k]}, {"precision", r.precision[k]}, {"recall", r.recall[k]}});
  }
  return {{"accuracy", r.accuracy}, {"sample_count", r.sample_count}, {"classes", per_class},
          {"confusion", r.confusion}};
}

json CreateJson(const ttml::RunConfig& cfg, const ttml::CreateResult& r) {
  json j = {{"output", cfg.output},
            {"model_bytes", r.model_bytes},
            {"epochs", r.history.epochs.size()},
            {"report", ReportJson(r.report)},
            {"report_dir", cfg.ReportDir().string()},
            {"report_text", ttml::ReportText(r.report)}};
  if (!r.history.epochs.empty()) {
    const ttml::EpochStats& last = r.history.epochs.back();
    j["final_epoch"] = {{"train_loss", last.train_loss}, {"train_acc", last.train_acc},
                        {"val_loss", last.val_loss}, {"val_acc", last.val_acc}};
  }
  j["size"] = r.size ? r.size->ToJson() : json(nullptr);
  json files = json::array();
  for (const fs::path& p : r.report_files) files.push_back(p.string());
  j["report_files"] = files;
  return j;
}

ttml::Shape ShapeOf(const int64_t* dims, size_t rank) {
  ttml::Shape s;
  for (size_t i = 0; i < rank; ++i) s.push_back(dims[i]);
  return s;
}

}  // namespace

extern "C" {

const char* ttml_version(void) { return "1.0.0"; }

const char* ttml_status_name(ttml_status status) {
  if (status == TTML_OK) return "Ok";
  if (status == TTML_INVALID_ARGUMENT) return "InvalidArgument";
  if (status < TTML_SHAPE_MISMATCH || status > TTML_INTERNAL) return "Unknown";
  return ttml::ErrorCodeName(static_cast<ttml::ErrorCode>(status)).data();
}

const char* ttml_last_error(void) { return g_last_error.c_str(); }

void ttml_string_free(char* s) { std::free(s); }

ttml_status ttml_config_resolve(const char* config_path, const char* overrides_json, char** out_json) {
  return Guard([&] {
    Require(out_json, "out_json");
    ttml::RunConfig cfg = config_path != nullptr ? ttml::LoadRunConfig(config_path) : ttml::RunConfig{};
    if (overrides_json != nullptr) cfg = ttml::RunConfigFromJson(ParseJson(overrides_json, "override"), cfg);
    cfg.Check();
    *out_json = Dup(cfg.ToJson().dump(2));
  });
}

ttml_status ttml_ingest(const char* root, const char* task, double ratio, uint64_t seed, char** out_json) {
  return Guard([&] {
    Require(root, "root");
    Require(task, "task");
    Require(out_json, "out_json");
    ttml::SplitSpec split{ratio, seed};
    if (!(ratio > 0.0 && ratio <= 1.0)) throw ttml::Error(ttml::ErrorCode::kConfigError, "split ratio must be in (0, 1]");
    const ttml::DatasetManifest m = ttml::Ingest(root, ttml::ParseTask(task), split);
    *out_json = Dup(m.ToJson().dump(2));
  });
}

ttml_status ttml_create(const char* config_json, ttml_log_fn log, void* user, char** out_json) {
  return Guard([&] {
    Require(out_json, "out_json");
    const ttml::RunConfig cfg = ConfigFrom(config_json);
    const ttml::CreateResult r = ttml::RunCreate(cfg, LoggerFor(log, user));
    *out_json = Dup(CreateJson(cfg, r).dump(2));
  });
}

ttml_status ttml_train(const char* config_json, ttml_log_fn log, void* user, char** out_json) {
  return Guard([&] {
    Require(out_json, "out_json");
    const ttml::RunConfig cfg = ConfigFrom(config_json);
    const ttml::CreateResult r = ttml::RunTrain(cfg, LoggerFor(log, user));
    *out_json = Dup(CreateJson(cfg, r).dump(2));
  });
}

ttml_status ttml_extract(const char* config_json, ttml_log_fn log, void* user, char** out_json) {
  return Guard([&] {
    Require(out_json, "out_json");
    ttml::RunConfig cfg = ConfigFrom(config_json);
    cfg.use_cache = true;
    const ttml::ExtractResult x = ttml::RunExtract(cfg, LoggerFor(log, user));
    json rounds = json::array();
    for (const ttml::FeatureCache& c : x.features.train_rounds) rounds.push_back(c.rows());
    json files = json::array();
    for (size_t r = 0; r < x.features.train_rounds.size(); ++r) {
      files.push_back(ttml::TrainCachePath(cfg.CacheDir(), static_cast<int>(r)).string());
    }
    files.push_back(ttml::ValCachePath(cfg.CacheDir()).string());
    *out_json = Dup(json{{"cache_dir", cfg.CacheDir().string()},
                         {"classes", x.manifest.classes},
                         {"feature_shape", x.features.val.features.shape()},
                         {"train_rows", rounds},
                         {"val_rows", x.features.val.rows()},
                         {"files", files}}
                        .dump(2));
  });
}

ttml_status ttml_quantize(const char* in_path, const char* out_path, char** out_json) {
  return Guard([&] {
    Require(in_path, "in_path");
    Require(out_path, "out_path");
    Require(out_json, "out_json");
    const ttml::SizeReport r = ttml::RunQuantize(in_path, out_path);
    json j = r.ToJson();
    j["table"] = r.ToTable();
    *out_json = Dup(j.dump(2));
  });
}

ttml_status ttml_inspect(const char* path, char** out_text) {
  return Guard([&] {
    Require(path, "path");
    Require(out_text, "out_text");
    *out_text = Dup(ttml::InspectModelFile(path));
  });
}

ttml_status ttml_write_fixture(const char* kind, uint64_t seed, const char* path) {
  return Guard([&] {
    Require(kind, "kind");
    Require(path, "path");
    const fs::path out(path);
    if (!out.parent_path().empty()) fs::create_directories(out.parent_path());
    ttml::SaveModel(ttml::MakeFixture(kind, seed), out);
  });
}

ttml_status ttml_model_load(const char* path, ttml_model** out) {
  return Guard([&] {
    Require(path, "path");
    Require(out, "out");
    *out = nullptr;
    ttml::ModelGraph g = ttml::LoadModel(path);
    ttml::ExecutionPlan plan(g);
    std::vector<std::string> labels = ttml::ClassLabels(g);
    *out = new ttml_model{std::move(g), std::move(plan), std::move(labels)};
  });
}

void ttml_model_free(ttml_model* model) { delete model; }

ttml_status ttml_model_info(const ttml_model* model, char** out_json) {
  return Guard([&] {
    Require(model, "model");
    Require(out_json, "out_json");
    const ttml::ModelGraph& g = model->graph;
    json meta = json::object();
    for (const auto& [k, v] : g.metadata) meta[k] = v;
    auto get = [&](std::string_view key) {
      const auto it = g.metadata.find(std::string(key));
      return it == g.metadata.end() ? json(nullptr) : json(it->second);
    };
    *out_json = Dup(json{{"name", g.name},
                         {"task", get(ttml::meta::kTask)},
                         {"preprocessing_id", get(ttml::meta::kPreprocessing)},
                         {"quantization", get(ttml::meta::kQuantization)},
                         {"class_labels", model->labels},
                         {"input_shape", model->plan.input_shape()},
                         {"output_shape", model->plan.output_shape()},
                         {"nodes", g.nodes.size()},
                         {"metadata", meta}}
                        .dump(2));
  });
}

ttml_status ttml_predict_file(const ttml_model* model, const char* media_path, int threads, char** out_json) {
  return Guard([&] {
    Require(model, "model");
    Require(media_path, "media_path");
    Require(out_json, "out_json");
    const ttml::Prediction p = ttml::RunPredict(model->graph, media_path, threads);
    json probs = json::array();
    for (size_t k = 0; k < p.probs.size(); ++k) {
      probs.push_back({{"label", k < model->labels.size() ? model->labels[k] : std::to_string(k)},
                       {"prob", p.probs[k]}});
    }
    *out_json = Dup(json{{"label", p.label}, {"index", p.index}, {"probs", probs}}.dump(2));
  });
}

ttml_status ttml_run(const ttml_model* model, const float* input, const int64_t* shape, size_t rank, float* probs,
                     size_t capacity, size_t* num_classes) {
  return Guard([&] {
    Require(model, "model");
    Require(input, "input");
    Require(shape, "shape");
    Require(num_classes, "num_classes");
    const ttml::Shape s = ShapeOf(shape, rank);
    const ttml::Tensor in = ttml::Tensor::FromData(s, std::vector<float>(input, input + ttml::NumElements(s)));
    const ttml::Tensor out = model->plan.Run(in);
    *num_classes = static_cast<size_t>(out.shape().back());
    if (probs != nullptr) {
      if (capacity < static_cast<size_t>(out.size())) {
        throw ttml::Error(ttml::ErrorCode::kShapeMismatch, "output buffer holds " + std::to_string(capacity) +
                                                               " floats, need " + std::to_string(out.size()));
      }
      std::memcpy(probs, out.data().data(), static_cast<size_t>(out.size()) * sizeof(float));
    }
  });
}

ttml_status ttml_evaluate(const ttml_model* model, const char* dataset_dir, const char* options_json,
                          char** out_json) {
  return Guard([&] {
    Require(model, "model");
    Require(dataset_dir, "dataset_dir");
    Require(out_json, "out_json");
    const json opt = options_json != nullptr ? ParseJson(options_json, "options") : json::object();
    for (const auto& [k, v] : opt.items()) {
      static const std::vector<std::string> known = {"split", "aggregation", "ratio", "seed", "threads", "report_dir"};
      if (std::find(known.begin(), known.end(), k) == known.end()) {
        throw ttml::Error(ttml::ErrorCode::kConfigError, "unknown evaluate option '" + k + "'");
      }
    }
    const ttml::ModelGraph& g = model->graph;
    ttml::RunConfig trained;
    if (const auto it = g.metadata.find(std::string(ttml::meta::kRunConfig)); it != g.metadata.end()) {
      trained = ttml::RunConfigFromJson(ParseJson(it->second.c_str(), "embedded run_config"));
    }
    const auto prep = g.metadata.find(std::string(ttml::meta::kPreprocessing));
    if (prep == g.metadata.end()) throw ttml::Error(ttml::ErrorCode::kFormatError, "model has no preprocessing_id metadata");
    const ttml::Task task = ttml::ParsePreprocessingId(prep->second).task;
    trained.task = task;
    try {
      trained.split.ratio = opt.value("ratio", trained.split.ratio);
      trained.split.seed = opt.value("seed", trained.split.seed);
      trained.aggregation = opt.value("aggregation", std::string("auto"));
      trained.threads = opt.value("threads", 0);
    } catch (const json::exception& e) {
      throw ttml::Error(ttml::ErrorCode::kConfigError, std::string("bad evaluate option: ") + e.what());
    }
    const std::string split = opt.value("split", std::string("val"));
    if (split != "val" && split != "train") {
      throw ttml::Error(ttml::ErrorCode::kConfigError, "split must be 'train' or 'val', got '" + split + "'");
    }
    trained.Check();
    const ttml::DatasetManifest manifest = ttml::Ingest(dataset_dir, task, trained.split);
    const ttml::Aggregation agg = trained.EffectiveAggregation();
    const ttml::EvalReport r = ttml::RunEval(g, manifest, split == "train", agg, trained.threads);
    json j = ReportJson(r);
    j["aggregation"] = std::string(ttml::AggregationName(agg));
    j["split"] = split;
    j["report_text"] = ttml::ReportText(r);
    if (opt.contains("report_dir")) {
      json files = json::array();
      for (const fs::path& p : ttml::EmitReport(r, {}, opt.at("report_dir").get<std::string>(),
                                                {"aggregation: " + std::string(ttml::AggregationName(agg)),
                                                 "split: " + split})) {
        files.push_back(p.string());
      }
      j["report_files"] = files;
    }
    *out_json = Dup(j.dump(2));
  });
}

}  // extern "C"
