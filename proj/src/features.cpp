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

#include "pqmigrate/features.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <set>

#include "pqmigrate/error.hpp"
#include "pqmigrate/hash.hpp"
#include "pqmigrate/rng.hpp"

namespace pqmigrate {
namespace {

using nlohmann::json;

constexpr std::array<std::string_view, 5> kNumericFields = {
    "security_lifetime", "key_size", "system_complexity",
    "integration_complexity", "data_sensitivity"};

double numeric_value(const SystemRecord& r, std::size_t i) {
  switch (i) {
    case 0:
      return r.security_lifetime;
    case 1:
      return r.key_size;
    case 2:
      return r.system_complexity;
    case 3:
      return r.integration_complexity;
    default:
      return r.data_sensitivity;
  }
}

std::string category_value(const SystemRecord& r, std::size_t block) {
  return std::string(block == 0 ? to_string(r.system_type)
                                : to_string(r.crypto_method));
}

std::vector<std::string> make_feature_names(
    const std::vector<CategoricalSpec>& categorical,
    const std::vector<NumericSpec>& numeric) {
  std::vector<std::string> names;
  for (const auto& c : categorical) {
    for (const auto& v : c.categories) names.push_back(c.field + "=" + v);
  }
  for (const auto& n : numeric) names.push_back(n.field);
  return names;
}

std::size_t round_half_down(double x) {
  const double fl = std::floor(x);
  return static_cast<std::size_t>(x - fl > 0.5 ? fl + 1.0 : fl);
}

std::array<std::vector<std::size_t>, kNumStrategies> group_by_class(
    std::span<const Strategy> labels) {
  std::array<std::vector<std::size_t>, kNumStrategies> groups;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    groups[index_of(labels[i])].push_back(i);
  }
  return groups;
}

}  // namespace

FeatureMatrix::FeatureMatrix(std::size_t cols, std::vector<double> values,
                             std::vector<Strategy> labels)
    : cols_(cols), values_(std::move(values)), labels_(std::move(labels)) {
  if (cols_ == 0 || values_.size() % cols_ != 0) {
    throw InputError("feature matrix values do not form whole rows");
  }
  if (!labels_.empty() && labels_.size() != rows()) {
    throw InputError("feature matrix has " + std::to_string(rows()) +
                     " rows but " + std::to_string(labels_.size()) + " labels");
  }
}

std::string FeatureSchema::fingerprint() const { return fnv1a_hex(to_json().dump()); }

std::pair<std::size_t, std::size_t> FeatureSchema::block(std::size_t ci) const {
  std::size_t first = 0;
  for (std::size_t i = 0; i < ci; ++i) first += categorical[i].categories.size();
  return {first, first + categorical[ci].categories.size()};
}

std::optional<std::size_t> FeatureSchema::block_of(std::size_t feature) const {
  std::size_t first = 0;
  for (std::size_t i = 0; i < categorical.size(); ++i) {
    const std::size_t last = first + categorical[i].categories.size();
    if (feature < last) return i;
    first = last;
  }
  return std::nullopt;
}

std::optional<std::size_t> FeatureSchema::numeric_of(std::size_t feature) const {
  std::size_t n_cat = 0;
  for (const auto& c : categorical) n_cat += c.categories.size();
  if (feature < n_cat || feature >= n_cat + numeric.size()) return std::nullopt;
  return feature - n_cat;
}

json FeatureSchema::to_json() const {
  json cats = json::array();
  for (const auto& c : categorical) {
    cats.push_back({{"field", c.field}, {"categories", c.categories}});
  }
  json nums = json::array();
  for (const auto& n : numeric) {
    nums.push_back({{"field", n.field}, {"min", n.min}, {"max", n.max}});
  }
  return {{"categorical", cats}, {"numeric", nums}, {"feature_names", feature_names}};
}

FeatureSchema FeatureSchema::from_json(const json& j) {
  FeatureSchema s;
  try {
    for (const auto& c : j.at("categorical")) {
      CategoricalSpec spec{c.at("field").get<std::string>(),
                           c.at("categories").get<std::vector<std::string>>()};
      if (!std::is_sorted(spec.categories.begin(), spec.categories.end()) ||
          spec.categories.empty()) {
        throw InputError("schema categories for " + spec.field +
                         " must be a nonempty sorted list");
      }
      s.categorical.push_back(std::move(spec));
    }
    for (const auto& n : j.at("numeric")) {
      NumericSpec spec{n.at("field").get<std::string>(), n.at("min").get<double>(),
                       n.at("max").get<double>()};
      if (!(spec.min <= spec.max)) {
        throw InputError("schema range for " + spec.field + " has min > max");
      }
      s.numeric.push_back(std::move(spec));
    }
    s.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed feature schema: ") + e.what());
  }
  if (s.categorical.size() != 2 || s.categorical[0].field != "system_type" ||
      s.categorical[1].field != "crypto_method" ||
      s.numeric.size() != kNumericFields.size()) {
    throw InputError("feature schema does not match the record layout");
  }
  for (std::size_t i = 0; i < kNumericFields.size(); ++i) {
    if (s.numeric[i].field != kNumericFields[i]) {
      throw InputError("feature schema numeric field " + std::to_string(i) +
                       " should be " + std::string(kNumericFields[i]));
    }
  }
  if (s.feature_names != make_feature_names(s.categorical, s.numeric)) {
    throw InputError("feature schema names disagree with its specs");
  }
  return s;
}

FeatureSchema build_schema(const Dataset& dataset) {
  if (dataset.empty()) throw InputError("cannot build a schema from an empty dataset");
  FeatureSchema s;
  // The vocabularies are the full enumerations, so a category absent from the
  // training rows still encodes (to a column no split ever uses).
  std::set<std::string> types, methods;
  for (auto t : kAllSystemTypes) types.emplace(to_string(t));
  for (auto m : kAllMethods) methods.emplace(to_string(m));
  s.categorical.push_back({"system_type", {types.begin(), types.end()}});
  s.categorical.push_back({"crypto_method", {methods.begin(), methods.end()}});
  for (std::size_t i = 0; i < kNumericFields.size(); ++i) {
    NumericSpec spec{std::string(kNumericFields[i]), numeric_value(dataset[0], i),
                     numeric_value(dataset[0], i)};
    for (const auto& r : dataset) {
      spec.min = std::min(spec.min, numeric_value(r, i));
      spec.max = std::max(spec.max, numeric_value(r, i));
    }
    s.numeric.push_back(std::move(spec));
  }
  s.feature_names = make_feature_names(s.categorical, s.numeric);
  return s;
}

std::vector<double> encode(const SystemRecord& record, const FeatureSchema& schema) {
  std::vector<double> x(schema.size(), 0.0);
  std::size_t offset = 0;
  for (std::size_t b = 0; b < schema.categorical.size(); ++b) {
    const auto& spec = schema.categorical[b];
    const std::string value = category_value(record, b);
    const auto it = std::lower_bound(spec.categories.begin(), spec.categories.end(), value);
    if (it == spec.categories.end() || *it != value) {
      throw EncodingError("unseen " + spec.field + " '" + value + "'", spec.field);
    }
    x[offset + static_cast<std::size_t>(it - spec.categories.begin())] = 1.0;
    offset += spec.categories.size();
  }
  for (std::size_t i = 0; i < schema.numeric.size(); ++i) {
    const auto& spec = schema.numeric[i];
    const double v = numeric_value(record, i);
    x[offset + i] = spec.max == spec.min ? 0.5 : (v - spec.min) / (spec.max - spec.min);
  }
  return x;
}

FeatureMatrix encode_dataset(const Dataset& dataset, const FeatureSchema& schema) {
  std::vector<double> values;
  values.reserve(dataset.size() * schema.size());
  std::vector<Strategy> labels;
  bool all_labeled = !dataset.empty();
  for (const auto& r : dataset) {
    const auto x = encode(r, schema);
    values.insert(values.end(), x.begin(), x.end());
    if (r.recommended_strategy) {
      labels.push_back(*r.recommended_strategy);
    } else {
      all_labeled = false;
    }
  }
  if (!all_labeled) labels.clear();
  return FeatureMatrix(schema.size(), std::move(values), std::move(labels));
}

std::string decode_category(std::span<const double> encoded,
                            const FeatureSchema& schema, std::size_t ci) {
  const auto [first, last] = schema.block(ci);
  std::size_t best = first;
  for (std::size_t f = first; f < last; ++f) {
    if (encoded[f] > encoded[best]) best = f;
  }
  return schema.categorical[ci].categories[best - first];
}

std::vector<Strategy> labels_of(const Dataset& dataset) {
  std::vector<Strategy> labels;
  labels.reserve(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (!dataset[i].recommended_strategy) {
      throw InputError("record " + std::to_string(i) + " has no label",
                       "recommended_strategy");
    }
    labels.push_back(*dataset[i].recommended_strategy);
  }
  return labels;
}

SplitIndices stratified_split_indices(std::span<const Strategy> labels,
                                      double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw InputError("test_fraction must be within (0, 1)", "test_fraction");
  }
  auto groups = group_by_class(labels);
  SplitIndices out;
  for (std::size_t c = 0; c < kNumStrategies; ++c) {
    auto& g = groups[c];
    if (g.empty()) continue;
    Rng rng = Rng::derived(seed, c);
    rng.shuffle(std::span<std::size_t>(g));
    const std::size_t n_test =
        round_half_down(static_cast<double>(g.size()) * test_fraction);
    out.test.insert(out.test.end(), g.begin(), g.begin() + static_cast<std::ptrdiff_t>(n_test));
    out.train.insert(out.train.end(), g.begin() + static_cast<std::ptrdiff_t>(n_test), g.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

std::pair<Dataset, Dataset> stratified_split(const Dataset& dataset,
                                             double test_fraction,
                                             std::uint64_t seed) {
  const auto labels = labels_of(dataset);
  const auto idx = stratified_split_indices(labels, test_fraction, seed);
  std::pair<Dataset, Dataset> out;
  for (auto i : idx.train) out.first.push_back(dataset[i]);
  for (auto i : idx.test) out.second.push_back(dataset[i]);
  return out;
}

std::vector<Fold> kfold(std::span<const Strategy> labels, int k, std::uint64_t seed) {
  if (k < 2) throw InputError("k must be >= 2", "k");
  auto groups = group_by_class(labels);
  const auto folds_n = static_cast<std::size_t>(k);
  for (std::size_t c = 0; c < kNumStrategies; ++c) {
    if (!groups[c].empty() && groups[c].size() < folds_n) {
      throw InputError("k=" + std::to_string(k) + " exceeds the " +
                           std::to_string(groups[c].size()) + " records of class " +
                           std::string(to_string(static_cast<Strategy>(c))),
                       "k");
    }
  }
  std::vector<Fold> folds(folds_n);
  std::size_t position = 0;
  for (std::size_t c = 0; c < kNumStrategies; ++c) {
    auto& g = groups[c];
    Rng rng = Rng::derived(seed, c);
    rng.shuffle(std::span<std::size_t>(g));
    for (auto i : g) folds[position++ % folds_n].validation.push_back(i);
  }
  for (auto& f : folds) {
    std::sort(f.validation.begin(), f.validation.end());
    std::size_t v = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (v < f.validation.size() && f.validation[v] == i) {
        ++v;
      } else {
        f.train.push_back(i);
      }
    }
  }
  return folds;
}

std::vector<Fold> kfold(const Dataset& dataset, int k, std::uint64_t seed) {
  const auto labels = labels_of(dataset);
  return kfold(std::span<const Strategy>(labels), k, seed);
}

}  // namespace pqmigrate
