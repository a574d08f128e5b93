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

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "pqmigrate/advisor.hpp"
#include "pqmigrate/cart.hpp"
#include "pqmigrate/evaluation.hpp"
#include "pqmigrate/features.hpp"
#include "pqmigrate/forest.hpp"

namespace pqmigrate {

struct TrainingConfig {
  TreeParams tree{5, 2, 0.0};
  ForestParams forest;
  double test_fraction = 0.3;
  std::uint64_t split_seed = 42;
  int cv_folds = 5;
  bool cross_validate = true;
  // Recorded in the model metadata only.
  std::uint64_t generator_seed = 42;
  std::string created_at = "1970-01-01T00:00:00Z";

  void validate() const;
};

// FNV-1a of the dataset's CSV serialization.
std::string dataset_fingerprint(const Dataset& dataset);

// Builds the schema on `train` and fits both classifiers on it. Metadata
// other than training_rows is left for the caller.
TrainedModel fit_models(const Dataset& train, const TreeParams& tree,
                        const ForestParams& forest);

// Fold models that rebuild the schema on every training fold.
FoldModel tree_fold_model(const TreeParams& params);
FoldModel forest_fold_model(const ForestParams& params);

struct TrainingRun {
  TrainedModel model;
  Dataset train;
  Dataset test;
};

// Stratified split, fit on the training side, and (optionally) k-fold CV of
// both model families over the whole dataset.
TrainingRun train_pipeline(const Dataset& dataset, const TrainingConfig& config);

// Rows the model was not trained on when `dataset` is its training dataset;
// otherwise every row.
std::pair<Dataset, std::string> evaluation_rows(const TrainedModel& model,
                                                const Dataset& dataset);

struct EvaluationResult {
  std::string evaluated_on;  // "held_out_split" or "full_dataset"
  std::size_t rows = 0;
  ClassificationReport forest_report;
  ClassificationReport tree_report;
  ConfusionMatrix forest_confusion;
  ConfusionMatrix tree_confusion;
  std::optional<CvScore> forest_cv;
  std::optional<CvScore> tree_cv;
  std::vector<std::pair<std::string, double>> importances;  // descending
  HeatmapTable method_heatmap;
  HeatmapTable type_heatmap;
  HeatmapTable vulnerability;
  std::vector<std::string> rules;

  nlohmann::json to_json() const;
  std::string to_text() const;
};

// Named importances sorted by share, ties by feature order.
std::vector<std::pair<std::string, double>> ranked_importances(const TrainedModel& model);

EvaluationResult evaluate_pipeline(const TrainedModel& model, const Dataset& dataset);

}  // namespace pqmigrate
