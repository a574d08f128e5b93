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

#include "pqmigrate/advisor.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "pqmigrate/error.hpp"

namespace pqmigrate {
namespace {

using nlohmann::json;

void check_fingerprint(const DecisionTree& tree, const FeatureSchema& schema,
                       const std::string& expected, const char* what) {
  if (tree.schema_fingerprint() != expected || tree.n_features() != schema.size()) {
    throw LoadError(std::string(what) + " does not match the embedded feature schema");
  }
}

}  // namespace

json ModelMetadata::to_json() const {
  json j = {{"format_version", format_version},
            {"created_at", created_at},
            {"generator_seed", generator_seed},
            {"split_seed", split_seed},
            {"test_fraction", test_fraction},
            {"dataset_fingerprint", dataset_fingerprint},
            {"training_rows", training_rows},
            {"cv_folds", cv_folds}};
  j["forest_cv"] = forest_cv ? forest_cv->to_json() : json(nullptr);
  j["tree_cv"] = tree_cv ? tree_cv->to_json() : json(nullptr);
  return j;
}

ModelMetadata ModelMetadata::from_json(const json& j) {
  ModelMetadata m;
  m.format_version = j.at("format_version").get<int>();
  m.created_at = j.at("created_at").get<std::string>();
  m.generator_seed = j.at("generator_seed").get<std::uint64_t>();
  m.split_seed = j.at("split_seed").get<std::uint64_t>();
  m.test_fraction = j.at("test_fraction").get<double>();
  m.dataset_fingerprint = j.at("dataset_fingerprint").get<std::string>();
  m.training_rows = j.at("training_rows").get<std::size_t>();
  m.cv_folds = j.at("cv_folds").get<int>();
  if (!j.at("forest_cv").is_null()) m.forest_cv = CvScore::from_json(j.at("forest_cv"));
  if (!j.at("tree_cv").is_null()) m.tree_cv = CvScore::from_json(j.at("tree_cv"));
  return m;
}

json Recommendation::to_json() const {
  json alts = json::array();
  for (const auto& a : alternatives) {
    alts.push_back({{"strategy", to_string(a.strategy)}, {"probability", a.probability}});
  }
  json probs = json::object();
  for (auto s : kAllStrategies) probs[std::string(to_string(s))] = probabilities[index_of(s)];
  return {{"strategy", to_string(strategy)},
          {"urgency_index", urgency_index(strategy)},
          {"confidence", confidence},
          {"alternatives", alts},
          {"probabilities", probs}};
}

Recommendation rank_probabilities(const Probabilities& p) {
  std::array<std::size_t, kNumStrategies> order;
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&p](std::size_t a, std::size_t b) { return p[a] > p[b]; });
  Recommendation r;
  r.probabilities = p;
  r.strategy = kAllStrategies[order[0]];
  r.confidence = p[order[0]];
  for (std::size_t i = 0; i < r.alternatives.size(); ++i) {
    r.alternatives[i] = {kAllStrategies[order[i + 1]], p[order[i + 1]]};
  }
  return r;
}

Recommendation recommend(const TrainedModel& model, const SystemRecord& record) {
  const auto problems = validate_record(record);
  if (!problems.empty()) throw InputError(problems.front().message, problems.front().field);
  const auto x = encode(record, model.schema);
  return rank_probabilities(predict_proba(model.forest, x));
}

json model_to_json(const TrainedModel& model) {
  return {{"format_version", kModelFormatVersion},
          {"metadata", model.metadata.to_json()},
          {"schema", model.schema.to_json()},
          {"forest", model.forest.to_json()},
          {"interpretable_tree", model.tree.to_json()}};
}

TrainedModel model_from_json(const json& j) {
  if (!j.is_object() || !j.contains("format_version")) {
    throw LoadError("model document has no format_version");
  }
  const auto& version = j.at("format_version");
  if (!version.is_number_integer() || version.get<long long>() != kModelFormatVersion) {
    throw LoadError("unsupported version " + version.dump() + " (expected " +
                    std::to_string(kModelFormatVersion) + ")");
  }
  try {
    TrainedModel m;
    m.metadata = ModelMetadata::from_json(j.at("metadata"));
    m.schema = FeatureSchema::from_json(j.at("schema"));
    m.forest = Forest::from_json(j.at("forest"));
    m.tree = DecisionTree::from_json(j.at("interpretable_tree"));
    const auto fp = m.schema.fingerprint();
    for (const auto& t : m.forest.trees()) check_fingerprint(t, m.schema, fp, "forest");
    check_fingerprint(m.tree, m.schema, fp, "interpretable tree");
    return m;
  } catch (const json::exception& e) {
    throw LoadError(std::string("corrupted model document: ") + e.what());
  } catch (const InputError& e) {
    throw LoadError(std::string("corrupted model document: ") + e.what());
  }
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write model to " + path.string(), "path");
  out << model_to_json(model).dump() << '\n';
  if (!out) throw InputError("failed writing model to " + path.string(), "path");
}

TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open model " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  json j;
  try {
    j = json::parse(buf.str());
  } catch (const json::exception& e) {
    throw LoadError("model " + path.string() + " is not valid JSON: " + e.what());
  }
  return model_from_json(j);
}

}  // namespace pqmigrate
