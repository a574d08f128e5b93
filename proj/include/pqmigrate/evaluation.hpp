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

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "pqmigrate/domain.hpp"

namespace pqmigrate {

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::int64_t support = 0;
};

struct ClassificationReport {
  std::array<ClassMetrics, kNumStrategies> per_class{};
  double accuracy = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  std::int64_t total = 0;

  nlohmann::json to_json() const;
  std::string to_text() const;
};

struct ConfusionMatrix {
  // counts[true][predicted], strategies in urgency order.
  std::array<std::array<std::int64_t, kNumStrategies>, kNumStrategies> counts{};

  std::int64_t total() const;
  std::int64_t trace() const;
  double accuracy() const;
  // The unordered pair (a < b) with the largest counts[a][b] + counts[b][a];
  // ties go to the lexicographically smallest pair.
  std::pair<Strategy, Strategy> most_confused_pair() const;

  nlohmann::json to_json() const;
  std::string to_text() const;
};

// Both throw InputError on empty or mismatched inputs.
ClassificationReport classification_report(std::span<const Strategy> predictions,
                                           std::span<const Strategy> truths);
ConfusionMatrix confusion_matrix(std::span<const Strategy> predictions,
                                 std::span<const Strategy> truths);

struct CvScore {
  std::vector<double> fold_accuracies;
  double mean = 0.0;
  double std = 0.0;  // population

  static CvScore from_folds(std::vector<double> accuracies);
  nlohmann::json to_json() const;
  static CvScore from_json(const nlohmann::json& j);
};

// Trains on the first dataset and predicts every record of the second.
using FoldModel =
    std::function<std::vector<Strategy>(const Dataset& train, const Dataset& validation)>;

// Stratified k-fold accuracy of `model`.
CvScore cross_validate(const Dataset& dataset, const FoldModel& model, int k,
                       std::uint64_t seed);

struct HeatmapTable {
  std::string title;
  std::vector<std::string> row_labels;
  std::vector<std::string> column_labels;
  std::vector<std::vector<double>> cells;
  std::vector<std::int64_t> row_counts;

  nlohmann::json to_json() const;
  std::string to_text() const;
  std::string to_csv() const;
};

// Per crypto method present in the data, the percentage of its records under
// each label. Throws InputError on an empty or unlabeled dataset.
HeatmapTable method_strategy_heatmap(const Dataset& dataset);

// Same layout keyed by system type.
HeatmapTable type_strategy_heatmap(const Dataset& dataset);

// Per system type: mean and population std of the urgency index, sorted by
// mean descending (ties by type order). Columns: mean, std.
HeatmapTable system_vulnerability_scores(const Dataset& dataset);

}  // namespace pqmigrate
