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

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "pqmigrate/cart.hpp"
#include "pqmigrate/features.hpp"

namespace pqmigrate {

// How many candidate features each split considers.
struct FeaturesPerSplit {
  enum class Kind { kSqrt, kAll, kFixed };

  Kind kind = Kind::kSqrt;
  std::size_t count = 0;  // used by kFixed only

  // Resolved count for a matrix with `total` features, at least 1.
  std::size_t resolve(std::size_t total) const;
  std::string to_string() const;
  // Accepts "sqrt", "all" or a positive integer.
  static FeaturesPerSplit parse(const std::string& text);
};

struct ForestParams {
  int n_trees = 100;
  TreeParams tree_params{32, 2, 0.0};
  FeaturesPerSplit features_per_split;
  bool bootstrap = true;
  std::uint64_t seed = 42;
  // Worker threads for fitting; 0 picks the hardware concurrency. Has no
  // effect on the fitted forest.
  unsigned threads = 0;

  void validate() const;
  nlohmann::json to_json() const;
  static ForestParams from_json(const nlohmann::json& j);
};

class Forest {
 public:
  Forest() = default;
  Forest(std::vector<DecisionTree> trees, ForestParams params,
         std::vector<std::vector<std::size_t>> oob_rows);

  const std::vector<DecisionTree>& trees() const { return trees_; }
  const ForestParams& params() const { return params_; }
  // Per tree, the ascending training rows its bootstrap sample left out.
  const std::vector<std::vector<std::size_t>>& oob_rows() const { return oob_rows_; }
  // Normalized mean decrease in impurity, one entry per feature.
  const std::vector<double>& importances() const { return importances_; }
  std::size_t n_features() const;

  nlohmann::json to_json() const;
  static Forest from_json(const nlohmann::json& j);

 private:
  std::vector<DecisionTree> trees_;
  ForestParams params_;
  std::vector<std::vector<std::size_t>> oob_rows_;
  std::vector<double> importances_;
};

// Tree t draws from substream t of params.seed, so the result does not depend
// on how trees are scheduled across threads.
Forest fit_forest(const FeatureMatrix& train, const ForestParams& params,
                  const std::string& schema_fingerprint = {});

Probabilities predict_proba(const Forest& forest, std::span<const double> x);

// Raw importances averaged over trees, normalized to sum 1. All zero when no
// tree ever split.
std::vector<double> feature_importance(const std::vector<DecisionTree>& trees,
                                       std::size_t n_features);

// Accuracy of out-of-bag votes on the training matrix the forest was fit on;
// rows that were in every bootstrap sample are skipped. Returns 0 when no row
// is out of bag anywhere.
double oob_accuracy(const Forest& forest, const FeatureMatrix& train);

}  // namespace pqmigrate
