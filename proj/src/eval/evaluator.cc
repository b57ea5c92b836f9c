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

#include "eval/evaluator.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "common/error.h"
#include "common/files.h"
#include "common/format.h"
#include "engine/engine.h"

namespace ttml {
namespace {

std::string Fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// One line chart of several series on a shared y axis.
struct Series {
  std::string id;
  std::string color;
  std::vector<double> values;
};

std::string Chart(const std::string& title, const std::vector<Series>& series, double x0, double y0) {
  constexpr double kW = 420, kH = 240, kPad = 40;
  double lo = 0.0, hi = 1.0;
  size_t n = 0;
  for (const Series& s : series) {
    n = std::max(n, s.values.size());
    for (double v : s.values) lo = std::min(lo, v), hi = std::max(hi, v);
  }
  if (hi - lo < 1e-12) hi = lo + 1.0;
  auto px = [&](size_t i) { return x0 + kPad + (n > 1 ? (kW - 2 * kPad) * i / (n - 1.0) : 0.0); };
  auto py = [&](double v) { return y0 + kH - kPad - (kH - 2 * kPad) * (v - lo) / (hi - lo); };
  std::ostringstream out;
  out << "<g>\n<text x=\"" << x0 + kW / 2 << "\" y=\"" << y0 + 20
      << "\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
  out << "<line x1=\"" << x0 + kPad << "\" y1=\"" << py(lo) << "\" x2=\"" << x0 + kW - kPad
      << "\" y2=\"" << py(lo) << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << x0 + kPad << "\" y1=\"" << py(lo) << "\" x2=\"" << x0 + kPad
      << "\" y2=\"" << py(hi) << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << x0 + 4 << "\" y=\"" << py(hi) + 4 << "\" font-size=\"10\">" << Fixed(hi, 2)
      << "</text>\n<text x=\"" << x0 + 4 << "\" y=\"" << py(lo) + 4 << "\" font-size=\"10\">"
      << Fixed(lo, 2) << "</text>\n";
  out << "<text x=\"" << x0 + kW / 2 << "\" y=\"" << y0 + kH - 8
      << "\" text-anchor=\"middle\" font-size=\"10\">epoch (1-" << n << ")</text>\n";
  double legend_y = y0 + 36;
  for (const Series& s : series) {
    out << "<polyline id=\"" << s.id << "\" fill=\"none\" stroke=\"" << s.color << "\" points=\"";
    for (size_t i = 0; i < s.values.size(); ++i) {
      out << (i ? " " : "") << Fixed(px(i), 2) << "," << Fixed(py(s.values[i]), 2);
    }
    out << "\"/>\n<text x=\"" << x0 + kW - kPad - 70 << "\" y=\"" << legend_y << "\" font-size=\"10\" fill=\""
        << s.color << "\">" << s.id << "</text>\n";
    legend_y += 12;
  }
  out << "</g>\n";
  return out.str();
}

}  // namespace

std::string_view AggregationName(Aggregation a) {
  return a == Aggregation::kPerClip ? "per_clip" : "per_sample";
}

Aggregation ParseAggregation(std::string_view name) {
  if (name == "per_clip") return Aggregation::kPerClip;
  if (name == "per_sample") return Aggregation::kPerSample;
  Fail(ErrorCode::kConfigError, "unknown aggregation '" + std::string(name) + "'");
}

EvalReport ReportFromPredictions(const std::vector<int64_t>& predicted,
                                 const std::vector<int64_t>& truth,
                                 const std::vector<std::string>& class_names) {
  if (predicted.size() != truth.size()) Fail(ErrorCode::kShapeMismatch, "prediction count mismatch");
  if (truth.empty()) Fail(ErrorCode::kEmptyDataset, "nothing to evaluate");
  const auto k = static_cast<int64_t>(class_names.size());
  EvalReport r;
  r.class_names = class_names;
  r.sample_count = static_cast<int64_t>(truth.size());
  r.confusion.assign(static_cast<size_t>(k), std::vector<int64_t>(static_cast<size_t>(k), 0));
  for (size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] < 0 || truth[i] >= k || predicted[i] < 0 || predicted[i] >= k) {
      Fail(ErrorCode::kValidationError, "class index out of range");
    }
    ++r.confusion[static_cast<size_t>(truth[i])][static_cast<size_t>(predicted[i])];
  }
  int64_t trace = 0;
  for (int64_t c = 0; c < k; ++c) {
    const auto cc = static_cast<size_t>(c);
    trace += r.confusion[cc][cc];
    int64_t row = 0, col = 0;
    for (int64_t j = 0; j < k; ++j) {
      row += r.confusion[cc][static_cast<size_t>(j)];
      col += r.confusion[static_cast<size_t>(j)][cc];
    }
    r.recall.push_back(row ? static_cast<double>(r.confusion[cc][cc]) / static_cast<double>(row) : 0.0);
    r.precision.push_back(col ? static_cast<double>(r.confusion[cc][cc]) / static_cast<double>(col) : 0.0);
  }
  r.accuracy = static_cast<double>(trace) / static_cast<double>(r.sample_count);
  return r;
}

EvalReport Evaluate(const ModelGraph& model, const ItemStream& items,
                    const std::vector<std::string>& class_names, Aggregation aggregation,
                    int threads) {
  if (ClassLabels(model) != class_names) {
    Fail(ErrorCode::kClassMismatch, "model classes do not match the dataset classes");
  }
  const ExecutionPlan plan(model);
  const auto k = static_cast<int64_t>(class_names.size());
  if (plan.output_shape().size() != 2 || plan.output_shape()[1] != k) {
    Fail(ErrorCode::kShapeMismatch, "model output " + ShapeToString(plan.output_shape()) +
                                        " does not give one score per class");
  }
  std::vector<int64_t> predicted, truth;
  while (std::optional<LabeledItem> item = items()) {
    const Tensor probs = plan.Run(item->input, threads);
    const int64_t rows = probs.dim(0);
    const auto p = probs.data();
    if (aggregation == Aggregation::kPerSample) {
      for (int64_t r = 0; r < rows; ++r) {
        predicted.push_back(static_cast<int64_t>(ArgMax(p.subspan(static_cast<size_t>(r * k), static_cast<size_t>(k)))));
        truth.push_back(item->label);
      }
    } else {
      std::vector<double> mean(static_cast<size_t>(k), 0.0);
      for (int64_t r = 0; r < rows; ++r) {
        for (int64_t c = 0; c < k; ++c) mean[static_cast<size_t>(c)] += p[static_cast<size_t>(r * k + c)];
      }
      std::vector<float> avg(mean.size());
      for (size_t c = 0; c < mean.size(); ++c) avg[c] = static_cast<float>(mean[c] / static_cast<double>(rows));
      predicted.push_back(static_cast<int64_t>(ArgMax(avg)));
      truth.push_back(item->label);
    }
  }
  if (truth.empty()) Fail(ErrorCode::kEmptyDataset, "evaluation set is empty");
  return ReportFromPredictions(predicted, truth, class_names);
}

std::string HistoryCsv(const TrainHistory& history) {
  std::string out = "epoch,train_loss,train_acc,val_loss,val_acc\n";
  for (const EpochStats& e : history.epochs) {
    out += std::to_string(e.epoch) + "," + Fixed(e.train_loss) + "," + Fixed(e.train_acc) + "," +
           Fixed(e.val_loss) + "," + Fixed(e.val_acc) + "\n";
  }
  return out;
}

std::string ConfusionCsv(const EvalReport& report) {
  std::string out = "true\\predicted";
  for (const std::string& n : report.class_names) out += "," + CsvField(n);
  out += "\n";
  for (size_t i = 0; i < report.confusion.size(); ++i) {
    out += CsvField(report.class_names[i]);
    for (int64_t v : report.confusion[i]) out += "," + std::to_string(v);
    out += "\n";
  }
  return out;
}

std::string ReportText(const EvalReport& report, const std::vector<std::string>& extra) {
  std::ostringstream out;
  int64_t correct = 0;
  for (size_t i = 0; i < report.confusion.size(); ++i) correct += report.confusion[i][i];
  out << "accuracy: " << FormatPercent(report.accuracy) << " (" << correct << "/"
      << report.sample_count << ")\n";
  out << "classes: " << report.class_names.size() << "\n\n";
  size_t width = 5;
  for (const std::string& n : report.class_names) width = std::max(width, n.size());
  char line[256];
  std::snprintf(line, sizeof(line), "%-*s  %9s  %6s  %7s\n", static_cast<int>(width), "class",
                "precision", "recall", "support");
  out << line;
  for (size_t i = 0; i < report.class_names.size(); ++i) {
    int64_t support = 0;
    for (int64_t v : report.confusion[i]) support += v;
    std::snprintf(line, sizeof(line), "%-*s  %9s  %6s  %7lld\n", static_cast<int>(width),
                  report.class_names[i].c_str(), FormatPercent(report.precision[i]).c_str(),
                  FormatPercent(report.recall[i]).c_str(), static_cast<long long>(support));
    out << line;
  }
  out << "\nconfusion (rows true, columns predicted):\n";
  for (size_t i = 0; i < report.confusion.size(); ++i) {
    out << "  " << report.class_names[i] << ":";
    for (int64_t v : report.confusion[i]) out << " " << v;
    out << "\n";
  }
  if (!extra.empty()) out << "\n";
  for (const std::string& e : extra) out << e << "\n";
  return out.str();
}

std::string CurvesSvg(const TrainHistory& history) {
  std::vector<double> tl, vl, ta, va;
  for (const EpochStats& e : history.epochs) {
    tl.push_back(e.train_loss);
    vl.push_back(e.val_loss);
    ta.push_back(e.train_acc);
    va.push_back(e.val_acc);
  }
  std::string out =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"860\" height=\"260\" "
      "viewBox=\"0 0 860 260\">\n<rect width=\"860\" height=\"260\" fill=\"white\"/>\n";
  out += Chart("loss", {{"train_loss", "#1f77b4", tl}, {"val_loss", "#ff7f0e", vl}}, 0, 10);
  out += Chart("accuracy", {{"train_acc", "#1f77b4", ta}, {"val_acc", "#ff7f0e", va}}, 430, 10);
  out += "</svg>\n";
  return out;
}

std::vector<std::filesystem::path> EmitReport(const EvalReport& report, const TrainHistory& history,
                                              const std::filesystem::path& out_dir,
                                              const std::vector<std::string>& extra) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir)) {
    Fail(ErrorCode::kIoError, "cannot create report directory " + out_dir.string());
  }
  std::vector<std::filesystem::path> written;
  auto emit = [&](const char* name, const std::string& text) {
    WriteTextFile(out_dir / name, text);
    written.push_back(out_dir / name);
  };
  if (!history.epochs.empty()) emit("history.csv", HistoryCsv(history));
  emit("confusion.csv", ConfusionCsv(report));
  emit("report.txt", ReportText(report, extra));
  if (!history.epochs.empty()) emit("curves.svg", CurvesSvg(history));
  return written;
}

}  // namespace ttml
