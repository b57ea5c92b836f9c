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

#include "pipeline/dataset.h"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "common/error.h"
#include "common/files.h"
#include "common/rng.h"

namespace ttml {
namespace fs = std::filesystem;
namespace {

std::vector<fs::path> SortedChildren(const fs::path& dir, bool want_dirs) {
  std::vector<fs::path> out;
  std::error_code ec;
  for (fs::directory_iterator it(dir, ec), end; !ec && it != end; it.increment(ec)) {
    const std::string name = it->path().filename().string();
    if (name.empty() || name[0] == '.') continue;
    if (want_dirs ? it->is_directory() : it->is_regular_file()) out.push_back(it->path());
  }
  if (ec) Fail(ErrorCode::kIoError, "cannot list '" + dir.string() + "': " + ec.message());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<fs::path> MediaIn(const fs::path& dir, Task task) {
  std::vector<fs::path> files;
  for (const fs::path& p : SortedChildren(dir, false)) {
    if (IsMediaFile(p, task)) files.push_back(p);
  }
  return files;
}

bool HasLooseMedia(const fs::path& dir, Task task) { return !MediaIn(dir, task).empty(); }

}  // namespace

std::string_view TaskName(Task task) { return task == Task::kAudio ? "audio" : "image"; }

Task ParseTask(std::string_view name) {
  if (name == "image") return Task::kImage;
  if (name == "audio") return Task::kAudio;
  Fail(ErrorCode::kConfigError, "unknown task '" + std::string(name) + "' (image or audio)");
}

bool IsMediaFile(const fs::path& path, Task task) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (task == Task::kAudio) return ext == ".wav";
  return ext == ".ppm" || ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

std::vector<DatasetEntry> DatasetManifest::Entries(bool train) const {
  const auto& lists = train ? train_files : val_files;
  std::vector<DatasetEntry> out;
  for (size_t c = 0; c < lists.size(); ++c) {
    for (const fs::path& p : lists[c]) out.push_back({p, static_cast<int64_t>(c)});
  }
  return out;
}

int64_t DatasetManifest::Count(bool train) const {
  int64_t n = 0;
  for (const auto& l : train ? train_files : val_files) n += static_cast<int64_t>(l.size());
  return n;
}

nlohmann::json DatasetManifest::ToJson() const {
  nlohmann::json j;
  j["root"] = root.string();
  j["task"] = TaskName(task);
  j["classes"] = classes;
  if (explicit_split) {
    j["split"] = {{"layout", "explicit"}};
  } else {
    j["split"] = {{"layout", "ratio"}, {"ratio", split.ratio}, {"seed", split.seed}};
  }
  for (const char* which : {"train", "val"}) {
    const auto& lists = std::string(which) == "train" ? train_files : val_files;
    nlohmann::json per_class = nlohmann::json::object();
    for (size_t c = 0; c < classes.size(); ++c) {
      std::vector<std::string> rel;
      for (const fs::path& p : lists[c]) rel.push_back(p.lexically_relative(root).generic_string());
      per_class[classes[c]] = rel;
    }
    j[which] = per_class;
  }
  j["counts"] = {{"train", Count(true)}, {"val", Count(false)}};
  return j;
}

DatasetManifest Ingest(const fs::path& root, Task task, const SplitSpec& split) {
  if (!fs::is_directory(root)) Fail(ErrorCode::kIoError, "dataset root '" + root.string() + "' is not a directory");
  DatasetManifest m;
  m.root = root;
  m.task = task;
  m.split = split;
  const std::vector<fs::path> dirs = SortedChildren(root, true);
  const bool has_train = fs::is_directory(root / "train");
  const bool has_val = fs::is_directory(root / "val");
  if (HasLooseMedia(root, task)) {
    Fail(ErrorCode::kMixedLayout, "media files directly under the dataset root; expected one directory per class");
  }

  if (has_train || has_val) {
    if (!has_train) Fail(ErrorCode::kMixedLayout, "val/ without train/");
    for (const fs::path& d : dirs) {
      const std::string n = d.filename().string();
      if (n != "train" && n != "val") {
        Fail(ErrorCode::kMixedLayout, "class directory '" + n + "' next to train/ and val/");
      }
    }
    m.explicit_split = true;
    for (const fs::path& d : SortedChildren(root / "train", true)) m.classes.push_back(d.filename().string());
    if (has_val) {
      for (const fs::path& d : SortedChildren(root / "val", true)) {
        if (std::find(m.classes.begin(), m.classes.end(), d.filename().string()) == m.classes.end()) {
          Fail(ErrorCode::kMixedLayout, "val class '" + d.filename().string() + "' has no train directory");
        }
      }
    }
    if (m.classes.size() < 2) {
      Fail(ErrorCode::kNoClasses, "found " + std::to_string(m.classes.size()) + " class(es), need at least 2");
    }
    if (HasLooseMedia(root / "train", task) || (has_val && HasLooseMedia(root / "val", task))) {
      Fail(ErrorCode::kMixedLayout, "media files directly under train/ or val/");
    }
    for (const std::string& c : m.classes) {
      m.train_files.push_back(MediaIn(root / "train" / c, task));
      m.val_files.push_back(has_val && fs::is_directory(root / "val" / c) ? MediaIn(root / "val" / c, task)
                                                                          : std::vector<fs::path>{});
    }
  } else {
    if (!(split.ratio > 0.0 && split.ratio <= 1.0)) {
      Fail(ErrorCode::kConfigError, "split ratio must be in (0, 1]");
    }
    for (const fs::path& d : dirs) m.classes.push_back(d.filename().string());
    if (m.classes.size() < 2) {
      Fail(ErrorCode::kNoClasses, "found " + std::to_string(m.classes.size()) + " class(es), need at least 2");
    }
    for (size_t c = 0; c < m.classes.size(); ++c) {
      std::vector<fs::path> files = MediaIn(root / m.classes[c], task);
      Rng rng(DeriveSeed(split.seed, {c}));
      rng.Shuffle(std::span<fs::path>(files));
      const auto n = static_cast<int64_t>(files.size());
      const int64_t n_train = std::clamp<int64_t>(std::llround(split.ratio * static_cast<double>(n)), 1, std::max<int64_t>(n, 1));
      std::vector<fs::path> train(files.begin(), files.begin() + std::min(n, n_train));
      std::vector<fs::path> val(files.begin() + std::min(n, n_train), files.end());
      std::sort(train.begin(), train.end());
      std::sort(val.begin(), val.end());
      m.train_files.push_back(std::move(train));
      m.val_files.push_back(std::move(val));
    }
  }
  for (size_t c = 0; c < m.classes.size(); ++c) {
    if (m.train_files[c].empty()) {
      Fail(ErrorCode::kEmptyClass, "class '" + m.classes[c] + "' has no " + std::string(TaskName(task)) + " files for training");
    }
  }
  return m;
}

std::string SplitDigest(const DatasetManifest& manifest, bool train) {
  std::string acc = std::string(TaskName(manifest.task)) + "\n";
  for (const DatasetEntry& e : manifest.Entries(train)) {
    acc += manifest.classes[static_cast<size_t>(e.label)] + "/" + e.path.filename().string() + ":" +
           FileFingerprint(e.path) + "\n";
  }
  return Fingerprint(std::span(reinterpret_cast<const uint8_t*>(acc.data()), acc.size()));
}

}  // namespace ttml
