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

#ifndef TTML_PIPELINE_DATASET_H_
#define TTML_PIPELINE_DATASET_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace ttml {

enum class Task { kImage, kAudio };

std::string_view TaskName(Task task);
Task ParseTask(std::string_view name);  // kConfigError

// Media extensions recognised for a task (lowercase, with dot).
bool IsMediaFile(const std::filesystem::path& path, Task task);

struct SplitSpec {
  double ratio = 0.8;  // training fraction per class
  uint64_t seed = 42;
};

struct DatasetEntry {
  std::filesystem::path path;
  int64_t label = 0;
};

struct DatasetManifest {
  std::filesystem::path root;
  Task task = Task::kImage;
  std::vector<std::string> classes;  // sorted
  bool explicit_split = false;       // root/{train,val}/<class>/
  SplitSpec split;
  std::vector<std::vector<std::filesystem::path>> train_files;  // per class, sorted
  std::vector<std::vector<std::filesystem::path>> val_files;

  // Class-major, file order within a class.
  std::vector<DatasetEntry> Entries(bool train) const;
  int64_t Count(bool train) const;
  nlohmann::json ToJson() const;
};

// Directory-per-class ingestion: root/<class>/<files> split by ratio, or
// root/train/<class>/ and root/val/<class>/. Throws kNoClasses (fewer than
// two classes), kEmptyClass (a class without training files), kMixedLayout
// or kIoError.
DatasetManifest Ingest(const std::filesystem::path& root, Task task, const SplitSpec& split = {});

// Identity of one split's file list and contents; changes when any file is
// added, removed, renamed or edited.
std::string SplitDigest(const DatasetManifest& manifest, bool train);

}  // namespace ttml

#endif  // TTML_PIPELINE_DATASET_H_
