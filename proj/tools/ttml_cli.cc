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

// ttml command-line tool. Everything goes through the C API in libttml.
#include <algorithm>
#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ttml/ttml.h"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitInternal = 4;

int ExitCodeFor(ttml_status s) {
  switch (s) {
    case TTML_OK:
      return kExitOk;
    case TTML_CONFIG_ERROR:
    case TTML_IO_ERROR:
    case TTML_INVALID_ARGUMENT:
      return kExitConfig;
    case TTML_INTERNAL:
      return kExitInternal;
    default:
      return kExitData;
  }
}

struct Failure {
  ttml_status status;
};

// Throws Failure after printing the library's message.
void Check(ttml_status s) {
  if (s == TTML_OK) return;
  std::cerr << "error (" << ttml_status_name(s) << "): " << ttml_last_error() << "\n";
  throw Failure{s};
}

struct OwnedString {
  char* p = nullptr;
  ~OwnedString() { ttml_string_free(p); }
  std::string str() const { return p ? p : ""; }
  json parse() const { return json::parse(str()); }
};

struct ModelHandle {
  ttml_model* m = nullptr;
  explicit ModelHandle(const std::string& path) { Check(ttml_model_load(path.c_str(), &m)); }
  ~ModelHandle() { ttml_model_free(m); }
};

void LogToStderr(const char* line, void* quiet) {
  if (!*static_cast<bool*>(quiet)) std::cerr << line << "\n";
}

// Flags shared by create, extract and train. Only flags the user actually
// passes become overrides on top of the config file.
struct RunFlags {
  std::string config;
  std::optional<std::string> task, dataset, backbone, output, report_dir, cache_dir, optimizer, aggregation;
  std::optional<int64_t> drop_last, augment_rounds;
  std::optional<int> epochs, batch_size, threads;
  std::optional<double> lr, dropout, silence_threshold, split_ratio;
  std::optional<uint64_t> seed, split_seed;
  bool no_quantize = false, no_trim = false, no_cache = false, augment = false;
  bool print_config = false, quiet = false, json_out = false;

  void Register(CLI::App* app) {
    app->add_option("--config,-c", config, "JSON run config file")->check(CLI::ExistingFile);
    app->add_option("--task", task, "image or audio")->check(CLI::IsMember({"image", "audio"}));
    app->add_option("--dataset,-d", dataset, "dataset directory (one subdirectory per class)");
    app->add_option("--backbone,-b", backbone, "backbone .ttml file");
    app->add_option("--output,-o", output, "output model path");
    app->add_option("--report-dir", report_dir, "report directory (default <output stem>_report)");
    app->add_option("--cache-dir", cache_dir, "feature cache directory (default <output stem>_cache)");
    app->add_option("--drop-last", drop_last, "drop this many trailing backbone nodes")->check(CLI::NonNegativeNumber);
    app->add_option("--split-ratio", split_ratio, "training fraction for datasets without train/ and val/");
    app->add_option("--split-seed", split_seed, "seed for the ratio split");
    app->add_option("--lr", lr, "learning rate");
    app->add_option("--epochs", epochs, "training epochs");
    app->add_option("--batch-size", batch_size, "batch size for extraction and training");
    app->add_option("--seed", seed, "training seed");
    app->add_option("--dropout", dropout, "head dropout rate (default 0.5 image, 0 audio)");
    app->add_option("--optimizer", optimizer, "adam or sgd")->check(CLI::IsMember({"adam", "sgd"}));
    app->add_option("--aggregation", aggregation, "auto, per_sample or per_clip")
        ->check(CLI::IsMember({"auto", "per_sample", "per_clip"}));
    app->add_option("--silence-threshold", silence_threshold, "RMS below which audio frames are trimmed");
    app->add_flag("--no-trim", no_trim, "keep silent audio frames");
    app->add_flag("--no-quantize", no_quantize, "save float32 weights");
    app->add_flag("--no-cache", no_cache, "neither read nor write feature caches");
    app->add_flag("--augment", augment, "augment training images (flip, rotation, zoom)");
    app->add_option("--augment-rounds", augment_rounds, "distinct augmented passes, cycled over epochs");
    app->add_option("--threads,-j", threads, "worker threads (0 = all cores)");
    app->add_flag("--print-config", print_config, "print the effective config and exit");
    app->add_flag("--quiet,-q", quiet, "no progress output");
    app->add_flag("--json", json_out, "print the result as JSON");
  }

  json Overrides() const {
    json j = json::object();
    if (task) j["task"] = *task;
    if (dataset) j["dataset"] = *dataset;
    if (backbone) j["backbone"] = *backbone;
    if (output) j["output"] = *output;
    if (report_dir) j["report_dir"] = *report_dir;
    if (cache_dir) j["cache_dir"] = *cache_dir;
    if (drop_last) j["drop_last"] = *drop_last;
    if (split_ratio) j["split"]["ratio"] = *split_ratio;
    if (split_seed) j["split"]["seed"] = *split_seed;
    if (lr) j["train"]["learning_rate"] = *lr;
    if (epochs) j["train"]["epochs"] = *epochs;
    if (batch_size) {
      j["train"]["batch_size"] = *batch_size;
      j["extract"]["batch_size"] = *batch_size;
    }
    if (seed) j["train"]["seed"] = *seed;
    if (dropout) j["train"]["dropout"] = *dropout;
    if (optimizer) j["train"]["optimizer"] = *optimizer;
    if (aggregation) j["eval"]["aggregation"] = *aggregation;
    if (silence_threshold) j["audio"]["silence_threshold"] = *silence_threshold;
    if (no_trim) j["audio"]["trim"] = false;
    if (no_quantize) j["quantize"] = false;
    if (no_cache) j["extract"]["cache"] = false;
    if (augment) j["augment"]["enabled"] = true;
    if (augment_rounds) j["augment"]["rounds"] = *augment_rounds;
    if (threads) j["threads"] = *threads;
    return j;
  }

  std::string Resolve() const {
    OwnedString out;
    const std::string overrides = Overrides().dump();
    Check(ttml_config_resolve(config.empty() ? nullptr : config.c_str(), overrides.c_str(), &out.p));
    return out.str();
  }
};

using RunFn = ttml_status (*)(const char*, ttml_log_fn, void*, char**);

void PrintCreateResult(const json& r) {
  std::cout << r.at("report_text").get<std::string>();
  std::cout << "model: " << r.at("output").get<std::string>() << " (" << r.at("model_bytes") << " bytes)\n";
  if (!r.at("size").is_null()) {
    std::printf("size reduction: %.1f%% (%llu -> %llu bytes)\n", 100.0 * r["size"]["reduction"].get<double>(),
                r["size"]["before_bytes"].get<unsigned long long>(), r["size"]["after_bytes"].get<unsigned long long>());
  }
  std::cout << "report: " << r.at("report_dir").get<std::string>() << "\n";
}

void RunPipeline(const RunFlags& f, RunFn fn, bool extract_only) {
  const std::string cfg = f.Resolve();
  if (f.print_config) {
    std::cout << cfg << "\n";
    return;
  }
  OwnedString out;
  bool quiet = f.quiet;
  Check(fn(cfg.c_str(), LogToStderr, &quiet, &out.p));
  const json r = out.parse();
  if (f.json_out) {
    std::cout << r.dump(2) << "\n";
  } else if (extract_only) {
    std::cout << "features " << r.at("feature_shape").dump() << " cached in " << r.at("cache_dir").get<std::string>()
              << "\n";
    for (const auto& p : r.at("files")) std::cout << "  " << p.get<std::string>() << "\n";
  } else {
    PrintCreateResult(r);
  }
}

void PrintIngest(const json& m) {
  std::printf("%-24s %8s %8s\n", "class", "train", "val");
  for (const auto& c : m.at("classes")) {
    const std::string name = c.get<std::string>();
    std::printf("%-24s %8zu %8zu\n", name.c_str(), m["train"][name].size(), m["val"][name].size());
  }
  std::printf("%-24s %8lld %8lld\n", "total", m["counts"]["train"].get<long long>(),
              m["counts"]["val"].get<long long>());
  std::cout << "split: " << m.at("split").dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ttml: train small transfer-learned image and audio classifiers"};
  app.set_version_flag("--version", std::string(ttml_version()));
  app.require_subcommand(1);

  // ingest
  std::string ingest_root, ingest_task = "image";
  double ingest_ratio = 0.8;
  uint64_t ingest_seed = 42;
  bool ingest_json = false;
  CLI::App* ingest = app.add_subcommand("ingest", "scan a dataset directory and show the split");
  ingest->add_option("dataset", ingest_root, "dataset directory")->required();
  ingest->add_option("--task", ingest_task, "image or audio")->check(CLI::IsMember({"image", "audio"}));
  ingest->add_option("--split-ratio", ingest_ratio, "training fraction for datasets without train/ and val/");
  ingest->add_option("--split-seed", ingest_seed, "seed for the ratio split");
  ingest->add_flag("--json", ingest_json, "print the manifest as JSON");

  RunFlags create_flags, extract_flags, train_flags;
  CLI::App* create = app.add_subcommand("create", "extract, train, package, quantize, evaluate and report");
  create_flags.Register(create);
  CLI::App* extract = app.add_subcommand("extract", "compute and cache backbone features");
  extract_flags.Register(extract);
  CLI::App* train = app.add_subcommand("train", "train and package from cached features (run extract first)");
  train_flags.Register(train);

  // quantize
  std::string q_in, q_out;
  CLI::App* quantize = app.add_subcommand("quantize", "int8-quantize the weights of a float model");
  quantize->add_option("input", q_in, "float .ttml model")->required();
  quantize->add_option("output", q_out, "quantized output path")->required();

  // eval
  std::string e_model, e_dataset, e_split = "val", e_aggregation = "auto", e_report_dir;
  std::optional<double> e_ratio;
  std::optional<uint64_t> e_seed;
  int e_threads = 0;
  bool e_json = false;
  CLI::App* eval = app.add_subcommand("eval", "evaluate a model on a dataset split");
  eval->add_option("model", e_model, ".ttml model")->required();
  eval->add_option("dataset", e_dataset, "dataset directory")->required();
  eval->add_option("--split", e_split, "val or train")->check(CLI::IsMember({"val", "train"}));
  eval->add_option("--aggregation", e_aggregation, "auto, per_sample or per_clip")
      ->check(CLI::IsMember({"auto", "per_sample", "per_clip"}));
  eval->add_option("--split-ratio", e_ratio, "ratio split (default: the model's training config)");
  eval->add_option("--split-seed", e_seed, "split seed (default: the model's training config)");
  eval->add_option("--report-dir", e_report_dir, "also write report.txt and confusion.csv here");
  eval->add_option("--threads,-j", e_threads, "worker threads (0 = all cores)");
  eval->add_flag("--json", e_json, "print the report as JSON");

  // predict
  std::string p_model;
  std::vector<std::string> p_media;
  int p_top = 5, p_threads = 0;
  bool p_json = false;
  CLI::App* predict = app.add_subcommand("predict", "classify media files with a packaged model");
  predict->add_option("model", p_model, ".ttml model")->required();
  predict->add_option("media", p_media, "image or WAV files")->required();
  predict->add_option("--top-k,-k", p_top, "number of classes to print")->check(CLI::PositiveNumber);
  predict->add_option("--threads,-j", p_threads, "worker threads (0 = all cores)");
  predict->add_flag("--json", p_json, "print probabilities as JSON");

  // inspect
  std::string i_model;
  bool i_json = false;
  CLI::App* inspect = app.add_subcommand("inspect", "print the manifest of a .ttml file");
  inspect->add_option("model", i_model, ".ttml model")->required();
  inspect->add_flag("--json", i_json, "print model info as JSON");

  // fixture
  std::string f_kind, f_out;
  uint64_t f_seed = 0;
  CLI::App* fixture = app.add_subcommand("fixture", "write a random-weight backbone or test graph");
  fixture->add_option("kind", f_kind, "mobilenet_v2, yamnet, yamnet_top, dense_classifier, tiny_image, tiny_audio")
      ->required();
  fixture->add_option("output", f_out, "output path")->required();
  fixture->add_option("--seed", f_seed, "weight seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*ingest) {
      OwnedString out;
      Check(ttml_ingest(ingest_root.c_str(), ingest_task.c_str(), ingest_ratio, ingest_seed, &out.p));
      if (ingest_json) {
        std::cout << out.str() << "\n";
      } else {
        PrintIngest(out.parse());
      }
    } else if (*create) {
      RunPipeline(create_flags, ttml_create, false);
    } else if (*extract) {
      RunPipeline(extract_flags, ttml_extract, true);
    } else if (*train) {
      RunPipeline(train_flags, ttml_train, false);
    } else if (*quantize) {
      OwnedString out;
      Check(ttml_quantize(q_in.c_str(), q_out.c_str(), &out.p));
      std::cout << out.parse().at("table").get<std::string>();
    } else if (*eval) {
      ModelHandle model(e_model);
      json opt = {{"split", e_split}, {"aggregation", e_aggregation}, {"threads", e_threads}};
      if (e_ratio) opt["ratio"] = *e_ratio;
      if (e_seed) opt["seed"] = *e_seed;
      if (!e_report_dir.empty()) opt["report_dir"] = e_report_dir;
      OwnedString out;
      Check(ttml_evaluate(model.m, e_dataset.c_str(), opt.dump().c_str(), &out.p));
      const json r = out.parse();
      if (e_json) {
        std::cout << r.dump(2) << "\n";
      } else {
        std::cout << r.at("report_text").get<std::string>();
        std::cout << "aggregation: " << r.at("aggregation").get<std::string>() << "\n";
      }
    } else if (*predict) {
      ModelHandle model(p_model);
      json all = json::array();
      for (const std::string& media : p_media) {
        OwnedString out;
        Check(ttml_predict_file(model.m, media.c_str(), p_threads, &out.p));
        json r = out.parse();
        r["file"] = media;
        if (p_json) {
          all.push_back(r);
          continue;
        }
        std::vector<json> probs = r.at("probs").get<std::vector<json>>();
        std::stable_sort(probs.begin(), probs.end(), [](const json& a, const json& b) {
          return a.at("prob").get<double>() > b.at("prob").get<double>();
        });
        std::cout << media << ": " << r.at("label").get<std::string>() << "\n";
        for (size_t k = 0; k < probs.size() && k < static_cast<size_t>(p_top); ++k) {
          std::printf("  %-24s %.6f\n", probs[k].at("label").get<std::string>().c_str(),
                      probs[k].at("prob").get<double>());
        }
      }
      if (p_json) std::cout << all.dump(2) << "\n";
    } else if (*inspect) {
      OwnedString out;
      if (i_json) {
        ModelHandle model(i_model);
        Check(ttml_model_info(model.m, &out.p));
      } else {
        Check(ttml_inspect(i_model.c_str(), &out.p));
      }
      std::cout << out.str();
      if (i_json) std::cout << "\n";
    } else if (*fixture) {
      Check(ttml_write_fixture(f_kind.c_str(), f_seed, f_out.c_str()));
      std::cout << "wrote " << f_kind << " fixture to " << f_out << "\n";
    }
  } catch (const Failure& f) {
    return ExitCodeFor(f.status);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitOk;
}
