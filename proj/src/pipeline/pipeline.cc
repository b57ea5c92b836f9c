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

#include "pipeline/pipeline.h"

#include <cstdio>
#include <string_view>
#include <utility>

#include "common/files.h"
#include "common/format.h"
#include "common/parallel.h"
#include "model/model_io.h"

namespace ttml {
namespace fs = std::filesystem;
namespace {

constexpr std::string_view kImageId = "image/rgb-224x224-bilinear-div255";
constexpr std::string_view kAudioBase =
    "audio/logmel-16k-win400-hop160-fft512-mel64-125-7500-log0.001-patch96-hop48";

std::string Digest(const std::string& text) {
  return Fingerprint(std::span(reinterpret_cast<const uint8_t*>(text.data()), text.size()));
}

bool LooksLikeWav(std::span<const uint8_t> b) {
  return b.size() >= 12 && std::string_view(reinterpret_cast<const char*>(b.data()), 4) == "RIFF";
}

bool LooksLikeImage(std::span<const uint8_t> b) {
  try {
    SniffImageFormat(b);
    return true;
  } catch (const Error&) {
    return false;
  }
}

// Returns the cache at `path` when its identity matches, else builds and
// (when caching) stores a fresh one.
FeatureCache CachedOrBuilt(const RunConfig& cfg, const fs::path& path, const CacheKey& key,
                           const std::string& what, const Logger& log, CacheMode mode,
                           const std::function<FeatureCache()>& build) {
  if (mode == CacheMode::kRequire) {
    if (!fs::exists(path)) Fail(ErrorCode::kIoError, "no cached " + what + " features at " + path.string() + "; run extract first");
    FeatureCache c = LoadCache(path, key);
    log("reusing " + what + " features from " + path.string());
    return c;
  }
  if (cfg.use_cache && fs::exists(path)) {
    try {
      FeatureCache c = LoadCache(path, key);
      log("reusing " + what + " features from " + path.string());
      return c;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kStaleCache && e.code() != ErrorCode::kFormatError) throw;
      log("rebuilding " + what + " features: " + e.what());
    }
  }
  FeatureCache c = build();
  c.backbone_fingerprint = key.backbone_fingerprint;
  c.preprocessing_id = key.preprocessing_id;
  c.source_digest = key.source_digest;
  if (cfg.use_cache) {
    fs::create_directories(path.parent_path());
    SaveCache(c, path);
  }
  return c;
}

}  // namespace

std::string ImagePreprocessingId() { return std::string(kImageId); }

std::string AudioPreprocessingId(const AudioFrontendConfig& cfg) {
  if (!cfg.trim) return std::string(kAudioBase) + ";trim=off";
  char buf[64];
  std::snprintf(buf, sizeof(buf), ";trim=%.17g", cfg.silence_threshold);
  return std::string(kAudioBase) + buf;
}

Preprocessing ParsePreprocessingId(const std::string& id) {
  Preprocessing p;
  if (id == kImageId) return p;
  const size_t semi = id.find(';');
  if (id.substr(0, semi) == kAudioBase && semi != std::string::npos &&
      id.compare(semi, 6, ";trim=") == 0) {
    p.task = Task::kAudio;
    const std::string value = id.substr(semi + 6);
    if (value == "off") {
      p.audio.trim = false;
      return p;
    }
    try {
      size_t used = 0;
      p.audio.silence_threshold = std::stod(value, &used);
      if (used == value.size() && p.audio.silence_threshold >= 0.0) return p;
    } catch (const std::exception&) {
    }
  }
  Fail(ErrorCode::kFormatError, "unknown preprocessing id '" + id + "'");
}

Shape TaskInputShape(Task task) {
  if (task == Task::kImage) return {kAnyBatch, kImageSize, kImageSize, 3};
  return {kAnyBatch, audio::kPatchFrames, audio::kMelBands, 1};
}

Tensor LoadMediaInput(const fs::path& path, const Preprocessing& prep, const AugmentConfig* augment,
                      Rng* rng) {
  const Task other = prep.task == Task::kImage ? Task::kAudio : Task::kImage;
  auto mismatch = [&] {
    Fail(ErrorCode::kPreprocessingMismatch,
         "'" + path.filename().string() + "' is " + std::string(TaskName(other)) + " input but the model expects " +
             std::string(TaskName(prep.task)));
  };
  if (IsMediaFile(path, other)) mismatch();
  const std::vector<uint8_t> bytes = ReadFileBytes(path);
  if (prep.task == Task::kImage) {
    if (LooksLikeWav(bytes)) mismatch();
    RasterImage img = DecodeImage(bytes);
    if (augment && augment->enabled) {
      if (!rng) Fail(ErrorCode::kInternal, "augmentation needs an rng");
      img = Augment(img, *augment, *rng);
    }
    return PreprocessImage(img);
  }
  if (!LooksLikeWav(bytes) && LooksLikeImage(bytes)) mismatch();
  return AudioToPatches(DecodeWav(bytes), prep.audio);
}

Backbone LoadBackbone(const fs::path& path, int64_t drop_last, Task task) {
  if (path.empty()) Fail(ErrorCode::kConfigError, "no backbone given");
  Backbone b;
  b.graph = LoadModel(path);
  if (drop_last > 0) b.graph = Truncate(b.graph, drop_last);
  Validate(b.graph);
  if (b.graph.input_shape != TaskInputShape(task)) {
    Fail(ErrorCode::kShapeMismatch, "backbone input " + ShapeToString(b.graph.input_shape) + " does not fit " +
                                        std::string(TaskName(task)) + " input " +
                                        ShapeToString(TaskInputShape(task)));
  }
  b.fingerprint = FileFingerprint(path);
  if (drop_last > 0) b.fingerprint += "-drop" + std::to_string(drop_last);
  return b;
}

fs::path TrainCachePath(const fs::path& dir, int round) {
  return dir / ("train_r" + std::to_string(round) + std::string(".ttfc"));
}

fs::path ValCachePath(const fs::path& dir) { return dir / "val.ttfc"; }

std::vector<FeatureCache> LoadTrainRounds(const fs::path& dir) {
  std::vector<FeatureCache> rounds;
  for (int r = 0; fs::exists(TrainCachePath(dir, r)); ++r) rounds.push_back(LoadCache(TrainCachePath(dir, r)));
  if (rounds.empty()) Fail(ErrorCode::kIoError, "no training cache in '" + dir.string() + "'");
  return rounds;
}

HeadSpec HeadSpecFor(const RunConfig& cfg) {
  return {cfg.task == Task::kImage ? Activation::kSoftmax : Activation::kSigmoid, cfg.EffectiveDropout()};
}

ItemStream DatasetItems(const DatasetManifest& manifest, bool train, const Preprocessing& prep) {
  auto entries = std::make_shared<std::vector<DatasetEntry>>(manifest.Entries(train));
  auto next = std::make_shared<size_t>(0);
  return [entries, next, prep]() -> std::optional<LabeledItem> {
    if (*next >= entries->size()) return std::nullopt;
    const DatasetEntry& e = (*entries)[(*next)++];
    return LabeledItem{LoadMediaInput(e.path, prep), e.label};
  };
}

DatasetFeatures ExtractDataset(const RunConfig& cfg, const DatasetManifest& manifest,
                               const Backbone& backbone, const Logger& log, CacheMode mode) {
  const Preprocessing prep{cfg.task, cfg.audio};
  const std::string prep_id = cfg.task == Task::kImage ? ImagePreprocessingId() : AudioPreprocessingId(cfg.audio);
  const fs::path dir = cfg.CacheDir();
  ExtractOptions opt;
  opt.batch_size = cfg.extract_batch_size;
  opt.threads = ResolveThreads(cfg.threads);

  auto extract = [&](bool train, int round) {
    const std::vector<DatasetEntry> entries = manifest.Entries(train);
    if (entries.empty()) {
      Fail(ErrorCode::kEmptyDataset, std::string(train ? "training" : "validation") + " split has no files");
    }
    const bool augment = train && cfg.augment.enabled && cfg.task == Task::kImage;
    SampleStream stream = StreamFromClips(static_cast<int64_t>(entries.size()), [&, augment, round](int64_t i) {
      const DatasetEntry& e = entries[static_cast<size_t>(i)];
      try {
        if (augment) {
          Rng rng(DeriveSeed(cfg.augment.seed, {static_cast<uint64_t>(round), static_cast<uint64_t>(i)}));
          return ClipTensor{LoadMediaInput(e.path, prep, &cfg.augment, &rng), e.label};
        }
        return ClipTensor{LoadMediaInput(e.path, prep), e.label};
      } catch (const Error& err) {
        throw Error(err.code(), e.path.string() + ": " + err.what());
      }
    });
    return ExtractFeatures(backbone.graph, stream, std::nullopt, manifest.classes, opt);
  };

  DatasetFeatures out;
  const std::string train_digest = SplitDigest(manifest, true);
  const int rounds = cfg.EffectiveAugmentRounds();
  for (int r = 0; r < rounds; ++r) {
    std::string digest = train_digest;
    if (cfg.augment.enabled && cfg.task == Task::kImage) {
      digest = Digest(train_digest + cfg.ModelJson()["augment"].dump() + "#" + std::to_string(r));
    }
    const std::string what = rounds > 1 ? "training round " + std::to_string(r + 1) + "/" + std::to_string(rounds)
                                        : std::string("training");
    out.train_rounds.push_back(CachedOrBuilt(cfg, TrainCachePath(dir, r), {backbone.fingerprint, prep_id, digest},
                                             what, log, mode, [&] { return extract(true, r); }));
    log(what + " features " + ShapeToString(out.train_rounds.back().features.shape()));
  }
  out.val = CachedOrBuilt(cfg, ValCachePath(dir), {backbone.fingerprint, prep_id, SplitDigest(manifest, false)},
                          "validation", log, mode, [&] { return extract(false, 0); });
  log("validation features " + ShapeToString(out.val.features.shape()));
  // Drop stale rounds from an earlier run with more rounds.
  if (cfg.use_cache && mode == CacheMode::kReuseOrBuild) {
    for (int r = rounds; fs::exists(TrainCachePath(dir, r)); ++r) fs::remove(TrainCachePath(dir, r));
  }
  return out;
}

EvalReport RunEval(const ModelGraph& model, const DatasetManifest& manifest, bool train_split,
                   Aggregation aggregation, int threads) {
  const auto it = model.metadata.find(std::string(meta::kPreprocessing));
  if (it == model.metadata.end()) Fail(ErrorCode::kFormatError, "model has no preprocessing_id metadata");
  const Preprocessing prep = ParsePreprocessingId(it->second);
  if (prep.task != manifest.task) {
    Fail(ErrorCode::kPreprocessingMismatch, "model expects " + std::string(TaskName(prep.task)) +
                                                " data, dataset is " + std::string(TaskName(manifest.task)));
  }
  return Evaluate(model, DatasetItems(manifest, train_split, prep), manifest.classes, aggregation,
                  ResolveThreads(threads));
}

Prediction RunPredict(const ModelGraph& model, const fs::path& media, int threads) {
  const auto it = model.metadata.find(std::string(meta::kPreprocessing));
  if (it == model.metadata.end()) Fail(ErrorCode::kFormatError, "model has no preprocessing_id metadata");
  const Preprocessing prep = ParsePreprocessingId(it->second);
  const std::vector<std::string> labels = ClassLabels(model);
  const Tensor input = LoadMediaInput(media, prep);
  const ExecutionPlan plan(model);
  const Tensor probs = plan.Run(input, ResolveThreads(threads));
  if (probs.rank() != 2 || labels.size() != static_cast<size_t>(probs.dim(1))) {
    Fail(ErrorCode::kMissingLabels, "model class labels do not match its output width");
  }
  const int64_t rows = probs.dim(0), k = probs.dim(1);
  std::vector<double> mean(static_cast<size_t>(k), 0.0);
  for (int64_t r = 0; r < rows; ++r) {
    for (int64_t c = 0; c < k; ++c) mean[static_cast<size_t>(c)] += probs.data()[static_cast<size_t>(r * k + c)];
  }
  Prediction p;
  for (double m : mean) p.probs.push_back(static_cast<float>(m / static_cast<double>(rows)));
  p.index = ArgMax(p.probs);
  p.label = labels[p.index];
  return p;
}

SizeReport RunQuantize(const fs::path& in, const fs::path& out) {
  SaveModel(QuantizeModel(LoadModel(in)), out);
  return MakeSizeReport(in, out);
}

ExtractResult RunExtract(const RunConfig& cfg, const Logger& log, CacheMode mode) {
  InStage("config", [&] {
    cfg.Check();
    if (cfg.dataset.empty()) Fail(ErrorCode::kConfigError, "no dataset directory given");
    if (cfg.output.empty()) Fail(ErrorCode::kConfigError, "no output path given");
  });
  ExtractResult x;
  x.manifest = InStage("ingest", [&] { return Ingest(cfg.dataset, cfg.task, cfg.split); });
  log("dataset: " + std::to_string(x.manifest.classes.size()) + " classes, " + std::to_string(x.manifest.Count(true)) +
      " train / " + std::to_string(x.manifest.Count(false)) + " val files");
  x.backbone = InStage("backbone", [&] { return LoadBackbone(cfg.backbone, cfg.drop_last, cfg.task); });
  log("backbone output " + ShapeToString(Validate(x.backbone.graph)));
  x.features = InStage("extract", [&] { return ExtractDataset(cfg, x.manifest, x.backbone, log, mode); });
  return x;
}

namespace {

CreateResult TrainAndPackage(const RunConfig& cfg, const ExtractResult& x, const Logger& log) {
  const DatasetManifest& manifest = x.manifest;
  const Backbone& backbone = x.backbone;
  const DatasetFeatures& features = x.features;
  CreateResult result;
  TrainResult trained = InStage("train", [&] {
    return TrainHead(features.train_rounds, features.val, HeadSpecFor(cfg), cfg.train, [&](const EpochStats& s) {
      char line[160];
      std::snprintf(line, sizeof(line), "epoch %d/%d  loss %.4f  acc %.4f  val_loss %.4f  val_acc %.4f", s.epoch,
                    cfg.train.epochs, s.train_loss, s.train_acc, s.val_loss, s.val_acc);
      log(line);
    });
  });
  result.history = trained.history;

  uint64_t float_bytes = 0;
  InStage("package", [&] {
    ModelGraph head = ExportHead(trained.head);
    head.metadata[std::string(meta::kPreprocessing)] =
        cfg.task == Task::kImage ? ImagePreprocessingId() : AudioPreprocessingId(cfg.audio);
    head.metadata[std::string(meta::kTask)] = std::string(TaskName(cfg.task));
    head.metadata[std::string(meta::kRunConfig)] = cfg.ModelJson().dump();
    head.metadata[std::string(meta::kQuantization)] = "none";
    head.metadata["backbone_fingerprint"] = backbone.fingerprint;
    result.model = Compose(backbone.graph, head);
    result.model.name = "ttml-" + std::string(TaskName(cfg.task)) + "-classifier";
    float_bytes = SerializeModel(result.model).size();
    if (cfg.quantize) result.model = QuantizeModel(result.model);
    const fs::path out(cfg.output);
    if (!out.parent_path().empty()) fs::create_directories(out.parent_path());
    result.model_bytes = SaveModel(result.model, out);
  });
  if (cfg.quantize) {
    result.size = SizeReport{float_bytes, result.model_bytes, SizeReduction(float_bytes, result.model_bytes)};
  }
  log("wrote " + cfg.output + " (" + std::to_string(result.model_bytes) + " bytes)");

  const Aggregation agg = cfg.EffectiveAggregation();
  result.report = InStage("evaluate", [&] { return RunEval(result.model, manifest, false, agg, cfg.threads); });
  log("validation accuracy " + FormatPercent(result.report.accuracy));

  std::vector<std::string> extra = {"aggregation: " + std::string(AggregationName(agg)),
                                    "model size: " + std::to_string(result.model_bytes) + " bytes"};
  if (result.size) {
    extra.push_back("float32 size: " + std::to_string(result.size->before_bytes) + " bytes");
    extra.push_back("size reduction: " + FormatPercent(result.size->reduction) + " (" +
                    std::string(kQuantizationScheme) + ")");
  }
  result.report_files = InStage("report", [&] { return EmitReport(result.report, result.history, cfg.ReportDir(), extra); });
  return result;
}

}  // namespace

CreateResult RunCreate(const RunConfig& cfg, const Logger& log) {
  return TrainAndPackage(cfg, RunExtract(cfg, log, CacheMode::kReuseOrBuild), log);
}

CreateResult RunTrain(const RunConfig& cfg, const Logger& log) {
  return TrainAndPackage(cfg, RunExtract(cfg, log, CacheMode::kRequire), log);
}

}  // namespace ttml
