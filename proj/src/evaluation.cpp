// Copyright 2025 The pqmigrate Authors.
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

#include "pqmigrate/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "pqmigrate/error.hpp"
#include "pqmigrate/features.hpp"

namespace pqmigrate {
namespace {

using nlohmann::json;

void check_lengths(std::span<const Strategy> predictions,
                   std::span<const Strategy> truths) {
  if (predictions.size() != truths.size()) {
    throw InputError("predictions and truths differ in length");
  }
  if (predictions.empty()) throw InputError("nothing to evaluate");
}

double ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string pad_right(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string pad_left(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

// Renders rows of cells with the first column left-aligned and the rest
// right-aligned.
std::string align(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> widths;
  for (const auto& row : rows) {
    widths.resize(std::max(widths.size(), row.size()), 0);
    for (std::size_t c = 0; c < row.size(); ++c) {
      widths[c] = std::max(widths[c], row[c].size());
    }
  }
  std::string out;
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) line += "  ";
      line += c == 0 ? pad_right(row[c], widths[c]) : pad_left(row[c], widths[c]);
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + '\n';
  }
  return out;
}

std::vector<std::string> strategy_names() {
  std::vector<std::string> names;
  for (auto s : kAllStrategies) names.emplace_back(to_string(s));
  return names;
}

void require_labeled(const Dataset& dataset) {
  if (dataset.empty()) throw InputError("dataset is empty");
  for (const auto& r : dataset) {
    if (!r.recommended_strategy) throw InputError("dataset has unlabeled records", "recommended_strategy");
  }
}

template <typename Key, std::size_t N>
HeatmapTable distribution_table(const Dataset& dataset, std::string title,
                                const std::array<Key, N>& keys,
                                Key SystemRecord::*member) {
  require_labeled(dataset);
  HeatmapTable t;
  t.title = std::move(title);
  t.column_labels = strategy_names();
  for (auto key : keys) {
    std::array<std::int64_t, kNumStrategies> counts{};
    std::int64_t n = 0;
    for (const auto& r : dataset) {
      if (r.*member != key) continue;
      ++counts[index_of(*r.recommended_strategy)];
      ++n;
    }
    if (n == 0) continue;
    std::vector<double> row;
    for (auto c : counts) row.push_back(100.0 * static_cast<double>(c) / static_cast<double>(n));
    t.row_labels.emplace_back(to_string(key));
    t.cells.push_back(std::move(row));
    t.row_counts.push_back(n);
  }
  return t;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

json ClassificationReport::to_json() const {
  json classes = json::object();
  for (auto s : kAllStrategies) {
    const auto& m = per_class[index_of(s)];
    classes[std::string(to_string(s))] = {{"precision", m.precision},
                                          {"recall", m.recall},
                                          {"f1", m.f1},
                                          {"support", m.support}};
  }
  return {{"classes", classes},
          {"accuracy", accuracy},
          {"macro_avg", {{"precision", macro_precision}, {"recall", macro_recall}, {"f1", macro_f1}}},
          {"total", total}};
}

std::string ClassificationReport::to_text() const {
  std::vector<std::vector<std::string>> rows{{"", "precision", "recall", "f1", "support"}};
  for (auto s : kAllStrategies) {
    const auto& m = per_class[index_of(s)];
    rows.push_back({std::string(to_string(s)), fixed(m.precision, 3), fixed(m.recall, 3),
                    fixed(m.f1, 3), std::to_string(m.support)});
  }
  rows.push_back({"macro avg", fixed(macro_precision, 3), fixed(macro_recall, 3),
                  fixed(macro_f1, 3), std::to_string(total)});
  rows.push_back({"accuracy", "", "", fixed(accuracy, 3), std::to_string(total)});
  return align(rows);
}

std::int64_t ConfusionMatrix::total() const {
  std::int64_t n = 0;
  for (const auto& row : counts) n += std::accumulate(row.begin(), row.end(), std::int64_t{0});
  return n;
}

std::int64_t ConfusionMatrix::trace() const {
  std::int64_t n = 0;
  for (std::size_t i = 0; i < kNumStrategies; ++i) n += counts[i][i];
  return n;
}

double ConfusionMatrix::accuracy() const {
  return ratio(static_cast<double>(trace()), static_cast<double>(total()));
}

std::pair<Strategy, Strategy> ConfusionMatrix::most_confused_pair() const {
  std::pair<std::size_t, std::size_t> best{0, 1};
  std::int64_t best_count = -1;
  for (std::size_t a = 0; a < kNumStrategies; ++a) {
    for (std::size_t b = a + 1; b < kNumStrategies; ++b) {
      const auto n = counts[a][b] + counts[b][a];
      if (n > best_count) {
        best_count = n;
        best = {a, b};
      }
    }
  }
  return {kAllStrategies[best.first], kAllStrategies[best.second]};
}

json ConfusionMatrix::to_json() const {
  return {{"labels", strategy_names()}, {"counts", counts}};
}

std::string ConfusionMatrix::to_text() const {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{"true \\ predicted"};
  for (auto s : kAllStrategies) header.emplace_back(to_string(s));
  rows.push_back(header);
  for (auto s : kAllStrategies) {
    std::vector<std::string> row{std::string(to_string(s))};
    for (auto v : counts[index_of(s)]) row.push_back(std::to_string(v));
    rows.push_back(row);
  }
  return align(rows);
}

ConfusionMatrix confusion_matrix(std::span<const Strategy> predictions,
                                 std::span<const Strategy> truths) {
  check_lengths(predictions, truths);
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    ++cm.counts[index_of(truths[i])][index_of(predictions[i])];
  }
  return cm;
}

ClassificationReport classification_report(std::span<const Strategy> predictions,
                                           std::span<const Strategy> truths) {
  const ConfusionMatrix cm = confusion_matrix(predictions, truths);
  ClassificationReport r;
  r.total = cm.total();
  r.accuracy = cm.accuracy();
  for (std::size_t c = 0; c < kNumStrategies; ++c) {
    std::int64_t predicted = 0;
    std::int64_t actual = 0;
    for (std::size_t o = 0; o < kNumStrategies; ++o) {
      predicted += cm.counts[o][c];
      actual += cm.counts[c][o];
    }
    auto& m = r.per_class[c];
    const auto tp = static_cast<double>(cm.counts[c][c]);
    m.support = actual;
    m.precision = ratio(tp, static_cast<double>(predicted));
    m.recall = ratio(tp, static_cast<double>(actual));
    m.f1 = ratio(2.0 * m.precision * m.recall, m.precision + m.recall);
    r.macro_precision += m.precision;
    r.macro_recall += m.recall;
    r.macro_f1 += m.f1;
  }
  r.macro_precision /= kNumStrategies;
  r.macro_recall /= kNumStrategies;
  r.macro_f1 /= kNumStrategies;
  return r;
}

CvScore CvScore::from_folds(std::vector<double> accuracies) {
  if (accuracies.empty()) throw InputError("no fold scores");
  CvScore s;
  s.fold_accuracies = std::move(accuracies);
  const double n = static_cast<double>(s.fold_accuracies.size());
  s.mean = std::accumulate(s.fold_accuracies.begin(), s.fold_accuracies.end(), 0.0) / n;
  double var = 0.0;
  for (double a : s.fold_accuracies) var += (a - s.mean) * (a - s.mean);
  s.std = std::sqrt(var / n);
  return s;
}

json CvScore::to_json() const {
  return {{"fold_accuracies", fold_accuracies},
          {"mean", mean},
          {"std", std},
          {"std_kind", "population"}};
}

CvScore CvScore::from_json(const json& j) {
  return from_folds(j.at("fold_accuracies").get<std::vector<double>>());
}

CvScore cross_validate(const Dataset& dataset, const FoldModel& model, int k,
                       std::uint64_t seed) {
  const auto labels = labels_of(dataset);
  const auto folds = kfold(labels, k, seed);
  std::vector<double> scores;
  for (const auto& fold : folds) {
    std::vector<bool> held(dataset.size(), false);
    for (auto i : fold.validation) held[i] = true;
    Dataset train, validation;
    std::vector<Strategy> truths;
    for (auto i : fold.train) {
      if (held[i]) throw std::logic_error("fold leaks validation rows into training");
      train.push_back(dataset[i]);
    }
    for (auto i : fold.validation) {
      validation.push_back(dataset[i]);
      truths.push_back(labels[i]);
    }
    const auto predictions = model(train, validation);
    scores.push_back(confusion_matrix(predictions, truths).accuracy());
  }
  return CvScore::from_folds(std::move(scores));
}

json HeatmapTable::to_json() const {
  json rows = json::array();
  for (std::size_t i = 0; i < row_labels.size(); ++i) {
    rows.push_back({{"label", row_labels[i]}, {"values", cells[i]}, {"count", row_counts[i]}});
  }
  return {{"title", title}, {"columns", column_labels}, {"rows", rows}};
}

std::string HeatmapTable::to_text() const {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{""};
  header.insert(header.end(), column_labels.begin(), column_labels.end());
  header.emplace_back("n");
  rows.push_back(header);
  for (std::size_t i = 0; i < row_labels.size(); ++i) {
    std::vector<std::string> row{row_labels[i]};
    for (double v : cells[i]) row.push_back(fixed(v, 2));
    row.push_back(std::to_string(row_counts[i]));
    rows.push_back(row);
  }
  return title + "\n" + align(rows);
}

std::string HeatmapTable::to_csv() const {
  std::ostringstream out;
  out << "label";
  for (const auto& c : column_labels) out << ',' << csv_escape(c);
  out << ",n\n";
  for (std::size_t i = 0; i < row_labels.size(); ++i) {
    out << csv_escape(row_labels[i]);
    for (double v : cells[i]) out << ',' << fixed(v, 4);
    out << ',' << row_counts[i] << '\n';
  }
  return out.str();
}

HeatmapTable method_strategy_heatmap(const Dataset& dataset) {
  return distribution_table(dataset, "Strategy distribution by crypto method (%)",
                            kAllMethods, &SystemRecord::crypto_method);
}

HeatmapTable type_strategy_heatmap(const Dataset& dataset) {
  return distribution_table(dataset, "Strategy distribution by system type (%)",
                            kAllSystemTypes, &SystemRecord::system_type);
}

HeatmapTable system_vulnerability_scores(const Dataset& dataset) {
  require_labeled(dataset);
  struct Row {
    SystemType type;
    double mean;
    double std;
    std::int64_t n;
  };
  std::vector<Row> rows;
  for (auto type : kAllSystemTypes) {
    std::vector<double> urgencies;
    for (const auto& r : dataset) {
      if (r.system_type == type) urgencies.push_back(urgency_index(*r.recommended_strategy));
    }
    if (urgencies.empty()) continue;
    const double n = static_cast<double>(urgencies.size());
    const double mean = std::accumulate(urgencies.begin(), urgencies.end(), 0.0) / n;
    double var = 0.0;
    for (double u : urgencies) var += (u - mean) * (u - mean);
    rows.push_back({type, mean, std::sqrt(var / n), static_cast<std::int64_t>(urgencies.size())});
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const Row& a, const Row& b) { return a.mean > b.mean; });
  HeatmapTable t;
  t.title = "Mean urgency by system type";
  t.column_labels = {"mean", "std"};
  for (const auto& r : rows) {
    t.row_labels.emplace_back(to_string(r.type));
    t.cells.push_back({r.mean, r.std});
    t.row_counts.push_back(r.n);
  }
  return t;
}

}  // namespace pqmigrate
