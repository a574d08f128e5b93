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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "pqmigrate/domain.hpp"
#include "pqmigrate/features.hpp"

namespace pqmigrate {

using ClassCounts = std::array<std::int64_t, kNumStrategies>;
using Probabilities = std::array<double, kNumStrategies>;

// 1 - sum (c_i / n)^2. Throws InputError when every count is zero or any
// count is negative.
double gini(std::span<const std::int64_t> class_counts);

struct TreeParams {
  int max_depth = 5;
  int min_samples_split = 2;
  double min_impurity_decrease = 0.0;

  void validate() const;
  nlohmann::json to_json() const;
  static TreeParams from_json(const nlohmann::json& j);
};

struct TreeNode {
  // -1 marks a leaf.
  int feature = -1;
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  ClassCounts counts{};

  bool is_leaf() const { return feature < 0; }
  std::int64_t samples() const;
};

class DecisionTree {
 public:
  DecisionTree() = default;
  DecisionTree(std::vector<TreeNode> nodes, TreeParams params,
               std::size_t n_features, std::string schema_fingerprint);

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const TreeParams& params() const { return params_; }
  std::size_t n_features() const { return n_features_; }
  const std::string& schema_fingerprint() const { return schema_fingerprint_; }

  // Longest root-to-leaf edge count.
  int depth() const;
  std::size_t leaf_count() const;
  // Index of the leaf `x` routes to (x[feature] <= threshold goes left).
  std::size_t leaf_index(std::span<const double> x) const;

  // Nested node objects; leaf nodes carry only "counts".
  nlohmann::json to_json() const;
  // Throws InputError on structural problems.
  static DecisionTree from_json(const nlohmann::json& j);

 private:
  std::vector<TreeNode> nodes_;
  TreeParams params_;
  std::size_t n_features_ = 0;
  std::string schema_fingerprint_;
};

struct SplitCandidate {
  std::size_t feature = 0;
  double threshold = 0.0;
  double impurity_decrease = 0.0;
};

// Exhaustive search over `features` and midpoints between consecutive
// distinct values of the given rows (duplicates count with multiplicity).
// Ties go to the lowest feature index, then the lowest threshold. Returns
// nullopt when nothing beats `min_impurity_decrease`.
std::optional<SplitCandidate> best_split(const FeatureMatrix& data,
                                         std::span<const std::size_t> rows,
                                         std::span<const std::size_t> features,
                                         double min_impurity_decrease = 0.0);

// Picks the features examined at one node, given the ones that are not
// constant there (ascending).
using FeatureSampler =
    std::function<std::vector<std::size_t>(std::span<const std::size_t> varying)>;

struct FitOptions {
  // Training rows, repeats allowed. Empty means every row once.
  std::span<const std::size_t> rows;
  FeatureSampler sampler;
  std::string schema_fingerprint;
};

DecisionTree fit_tree(const FeatureMatrix& train, const TreeParams& params,
                      const FitOptions& options = {});

Probabilities predict_tree(const DecisionTree& tree, std::span<const double> x);

// Argmax with ties to the less urgent strategy.
Strategy majority(const ClassCounts& counts);
Strategy argmax(const Probabilities& p);

// Sum over internal nodes of (node samples / root samples) * decrease, per
// feature. Not normalized.
std::vector<double> impurity_importance(const DecisionTree& tree);

struct RuleCondition {
  std::size_t feature = 0;
  double threshold = 0.0;
  bool greater = false;  // false: x <= threshold, true: x > threshold
};

struct TreeRule {
  std::vector<RuleCondition> conditions;
  Strategy outcome = Strategy::kNoActionNeeded;
  double purity = 1.0;
  std::size_t leaf = 0;
};

// One rule per leaf, left subtrees first.
std::vector<TreeRule> tree_rules(const DecisionTree& tree);

// Human-readable rules with thresholds mapped back to raw units, e.g.
//   IF crypto_method = RSA AND security_lifetime > 10.5 → immediate_hybrid (purity 0.93)
// Throws InputError if the schema fingerprint does not match the tree.
std::vector<std::string> extract_rules(const DecisionTree& tree,
                                       const FeatureSchema& schema);

}  // namespace pqmigrate
