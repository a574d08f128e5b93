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
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"
#include "pqmigrate/cart.hpp"
#include "pqmigrate/domain.hpp"
#include "pqmigrate/evaluation.hpp"
#include "pqmigrate/features.hpp"
#include "pqmigrate/forest.hpp"

namespace pqmigrate {

inline constexpr int kModelFormatVersion = 1;

struct ModelMetadata {
  int format_version = kModelFormatVersion;
  std::string created_at;
  std::uint64_t generator_seed = 0;
  std::uint64_t split_seed = 0;
  double test_fraction = 0.3;
  std::string dataset_fingerprint;
  std::size_t training_rows = 0;
  int cv_folds = 5;
  std::optional<CvScore> forest_cv;
  std::optional<CvScore> tree_cv;

  nlohmann::json to_json() const;
  static ModelMetadata from_json(const nlohmann::json& j);
};

struct TrainedModel {
  FeatureSchema schema;
  Forest forest;
  DecisionTree tree;  // depth-limited, for rule extraction
  ModelMetadata metadata;
};

struct Alternative {
  Strategy strategy = Strategy::kNoActionNeeded;
  double probability = 0.0;
};

struct Recommendation {
  Strategy strategy = Strategy::kNoActionNeeded;
  double confidence = 0.0;
  // Ranks 2 to 4 of the probability vector.
  std::array<Alternative, 3> alternatives{};
  Probabilities probabilities{};

  nlohmann::json to_json() const;
};

// Orders strategies by probability, ties by ascending urgency.
Recommendation rank_probabilities(const Probabilities& p);

// Throws InputError naming the first invalid field, or EncodingError for a
// category the schema has not seen.
Recommendation recommend(const TrainedModel& model, const SystemRecord& record);

nlohmann::json model_to_json(const TrainedModel& model);
// Throws LoadError on unknown versions, structural problems, or classifiers
// whose fingerprint differs from the embedded schema.
TrainedModel model_from_json(const nlohmann::json& j);

void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace pqmigrate
