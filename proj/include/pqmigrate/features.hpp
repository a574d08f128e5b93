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
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "pqmigrate/domain.hpp"

namespace pqmigrate {

struct CategoricalSpec {
  std::string field;                // "system_type" or "crypto_method"
  std::vector<std::string> categories;  // sorted

  bool operator==(const CategoricalSpec&) const = default;
};

struct NumericSpec {
  std::string field;
  double min = 0.0;
  double max = 0.0;

  bool operator==(const NumericSpec&) const = default;
};

// Encoding layout: system_type one-hot, crypto_method one-hot, then the five
// min-max normalized numeric fields.
struct FeatureSchema {
  std::vector<CategoricalSpec> categorical;
  std::vector<NumericSpec> numeric;
  std::vector<std::string> feature_names;

  std::size_t size() const { return feature_names.size(); }

  // Stable 64-bit FNV-1a hash of the canonical JSON form, as 16 hex digits.
  std::string fingerprint() const;

  // Feature index range [first, last) of a categorical block.
  std::pair<std::size_t, std::size_t> block(std::size_t categorical_index) const;
  // Which categorical block a feature belongs to, if any.
  std::optional<std::size_t> block_of(std::size_t feature) const;
  // Index into `numeric` for a numeric feature, if it is one.
  std::optional<std::size_t> numeric_of(std::size_t feature) const;

  nlohmann::json to_json() const;
  // Throws InputError on a malformed document.
  static FeatureSchema from_json(const nlohmann::json& j);

  bool operator==(const FeatureSchema&) const = default;
};

// Dense row-major matrix with optional aligned labels.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t cols, std::vector<double> values,
                std::vector<Strategy> labels = {});

  std::size_t rows() const { return cols_ ? values_.size() / cols_ : 0; }
  std::size_t cols() const { return cols_; }
  bool labeled() const { return !labels_.empty(); }

  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * cols_, cols_};
  }
  double at(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
  std::span<const Strategy> labels() const { return labels_; }
  Strategy label(std::size_t i) const { return labels_[i]; }

 private:
  std::size_t cols_ = 0;
  std::vector<double> values_;
  std::vector<Strategy> labels_;
};

// Categorical blocks cover every enumerated value; numeric ranges come from
// `dataset`. Throws InputError on an empty dataset.
FeatureSchema build_schema(const Dataset& dataset);

// Throws EncodingError for a category missing from the schema (possible only
// for schemas loaded from a document).
std::vector<double> encode(const SystemRecord& record, const FeatureSchema& schema);

// Encodes every record; labels are attached when all records carry one.
FeatureMatrix encode_dataset(const Dataset& dataset, const FeatureSchema& schema);

// Inverse of the one-hot block: the category with the largest cell.
std::string decode_category(std::span<const double> encoded,
                            const FeatureSchema& schema,
                            std::size_t categorical_index);

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Per class, round(count * test_fraction) rows (exact halves round down) go
// to the test side. Both index lists are ascending.
SplitIndices stratified_split_indices(std::span<const Strategy> labels,
                                      double test_fraction, std::uint64_t seed);

std::pair<Dataset, Dataset> stratified_split(const Dataset& dataset,
                                             double test_fraction,
                                             std::uint64_t seed);

struct Fold {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};

// Stratified k-fold: each class is shuffled and dealt round-robin, the
// dealing position carrying over from class to class so fold sizes stay
// within one of each other overall as well as per class.
std::vector<Fold> kfold(std::span<const Strategy> labels, int k, std::uint64_t seed);
std::vector<Fold> kfold(const Dataset& dataset, int k, std::uint64_t seed);

// Labels of a fully labeled dataset; throws InputError otherwise.
std::vector<Strategy> labels_of(const Dataset& dataset);

}  // namespace pqmigrate
