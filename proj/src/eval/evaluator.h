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

#ifndef TTML_EVAL_EVALUATOR_H_
#define TTML_EVAL_EVALUATOR_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "head/head.h"
#include "model/graph.h"
#include "tensor/tensor.h"

namespace ttml {

struct EvalReport {
  double accuracy = 0.0;
  std::vector<std::vector<int64_t>> confusion;  // [true][predicted]
  std::vector<double> precision;
  std::vector<double> recall;
  int64_t sample_count = 0;
  std::vector<std::string> class_names;

  bool operator==(const EvalReport&) const = default;
};

enum class Aggregation { kPerSample, kPerClip };

std::string_view AggregationName(Aggregation a);
Aggregation ParseAggregation(std::string_view name);

// One media file after preprocessing: (P, ...) model inputs, P >= 1.
struct LabeledItem {
  Tensor input;
  int64_t label = 0;
};

using ItemStream = std::function<std::optional<LabeledItem>()>;

// Builds the report from predicted and true class indices.
EvalReport ReportFromPredictions(const std::vector<int64_t>& predicted,
                                 const std::vector<int64_t>& truth,
                                 const std::vector<std::string>& class_names);

// per_sample scores every input row; per_clip averages the rows'
// probabilities per item before the argmax. Throws kClassMismatch when the
// model's labels differ from class_names and kEmptyDataset on no items.
EvalReport Evaluate(const ModelGraph& model, const ItemStream& items,
                    const std::vector<std::string>& class_names, Aggregation aggregation,
                    int threads = 1);

// Writes report.txt and confusion.csv, plus history.csv and curves.svg when
// the history is non-empty. `extra` lines are appended to report.txt.
// Returns the written paths.
std::vector<std::filesystem::path> EmitReport(const EvalReport& report, const TrainHistory& history,
                                              const std::filesystem::path& out_dir,
                                              const std::vector<std::string>& extra = {});

std::string HistoryCsv(const TrainHistory& history);
std::string ConfusionCsv(const EvalReport& report);
std::string ReportText(const EvalReport& report, const std::vector<std::string>& extra = {});
std::string CurvesSvg(const TrainHistory& history);

}  // namespace ttml

#endif  // TTML_EVAL_EVALUATOR_H_
