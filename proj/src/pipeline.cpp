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

#include "pqmigrate/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "pqmigrate/error.hpp"
#include "pqmigrate/hash.hpp"
#include "pqmigrate/record_io.hpp"

namespace pqmigrate {
namespace {

using nlohmann::json;

template <typename Predict>
std::vector<Strategy> predict_all(const Dataset& rows, const FeatureSchema& schema,
                                  Predict&& predict) {
  std::vector<Strategy> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(argmax(predict(encode(r, schema))));
  return out;
}

std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * v);
  return buf;
}

std::string cv_line(const char* name, const std::optional<CvScore>& cv) {
  if (!cv) return std::string(name) + ": not computed\n";
  return std::string(name) + ": " + percent(cv->mean) + " +/- " + percent(cv->std) +
         " over " + std::to_string(cv->fold_accuracies.size()) + " folds\n";
}

}  // namespace

void TrainingConfig::validate() const {
  tree.validate();
  forest.validate();
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw InputError("test_fraction must be within (0, 1)", "test_fraction");
  }
  if (cv_folds < 2) throw InputError("cv_folds must be >= 2", "cv_folds");
}

std::string dataset_fingerprint(const Dataset& dataset) {
  std::ostringstream out;
  write_csv(out, dataset);
  return fnv1a_hex(out.str());
}

TrainedModel fit_models(const Dataset& train, const TreeParams& tree,
                        const ForestParams& forest) {
  TrainedModel m;
  m.schema = build_schema(train);
  const auto fingerprint = m.schema.fingerprint();
  const FeatureMatrix x = encode_dataset(train, m.schema);
  if (!x.labeled()) throw InputError("training data must be labeled", "recommended_strategy");
  FitOptions options;
  options.schema_fingerprint = fingerprint;
  m.tree = fit_tree(x, tree, options);
  m.forest = fit_forest(x, forest, fingerprint);
  m.metadata.training_rows = train.size();
  return m;
}

FoldModel tree_fold_model(const TreeParams& params) {
  return [params](const Dataset& train, const Dataset& validation) {
    const auto schema = build_schema(train);
    const auto tree = fit_tree(encode_dataset(train, schema), params);
    return predict_all(validation, schema,
                       [&](const std::vector<double>& x) { return predict_tree(tree, x); });
  };
}

FoldModel forest_fold_model(const ForestParams& params) {
  return [params](const Dataset& train, const Dataset& validation) {
    const auto schema = build_schema(train);
    const auto forest = fit_forest(encode_dataset(train, schema), params);
    return predict_all(validation, schema,
                       [&](const std::vector<double>& x) { return predict_proba(forest, x); });
  };
}

TrainingRun train_pipeline(const Dataset& dataset, const TrainingConfig& config) {
  config.validate();
  auto [train, test] = stratified_split(dataset, config.test_fraction, config.split_seed);
  TrainingRun run{fit_models(train, config.tree, config.forest), std::move(train),
                  std::move(test)};
  auto& meta = run.model.metadata;
  meta.created_at = config.created_at;
  meta.generator_seed = config.generator_seed;
  meta.split_seed = config.split_seed;
  meta.test_fraction = config.test_fraction;
  meta.dataset_fingerprint = dataset_fingerprint(dataset);
  meta.cv_folds = config.cv_folds;
  if (config.cross_validate) {
    meta.tree_cv = cross_validate(dataset, tree_fold_model(config.tree), config.cv_folds,
                                  config.split_seed);
    meta.forest_cv = cross_validate(dataset, forest_fold_model(config.forest),
                                    config.cv_folds, config.split_seed);
  }
  return run;
}

std::pair<Dataset, std::string> evaluation_rows(const TrainedModel& model,
                                                const Dataset& dataset) {
  if (dataset_fingerprint(dataset) == model.metadata.dataset_fingerprint) {
    auto [train, test] =
        stratified_split(dataset, model.metadata.test_fraction, model.metadata.split_seed);
    return {std::move(test), "held_out_split"};
  }
  return {dataset, "full_dataset"};
}

std::vector<std::pair<std::string, double>> ranked_importances(const TrainedModel& model) {
  const auto& imp = model.forest.importances();
  std::vector<std::size_t> order(imp.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&imp](std::size_t a, std::size_t b) { return imp[a] > imp[b]; });
  std::vector<std::pair<std::string, double>> out;
  for (auto f : order) out.emplace_back(model.schema.feature_names[f], imp[f]);
  return out;
}

EvaluationResult evaluate_pipeline(const TrainedModel& model, const Dataset& dataset) {
  auto [rows, scope] = evaluation_rows(model, dataset);
  if (rows.empty()) throw InputError("no rows to evaluate");
  const auto truths = labels_of(rows);
  const auto forest_pred = predict_all(rows, model.schema, [&](const std::vector<double>& x) {
    return predict_proba(model.forest, x);
  });
  const auto tree_pred = predict_all(rows, model.schema, [&](const std::vector<double>& x) {
    return predict_tree(model.tree, x);
  });
  EvaluationResult r;
  r.evaluated_on = scope;
  r.rows = rows.size();
  r.forest_report = classification_report(forest_pred, truths);
  r.tree_report = classification_report(tree_pred, truths);
  r.forest_confusion = confusion_matrix(forest_pred, truths);
  r.tree_confusion = confusion_matrix(tree_pred, truths);
  r.forest_cv = model.metadata.forest_cv;
  r.tree_cv = model.metadata.tree_cv;
  r.importances = ranked_importances(model);
  r.method_heatmap = method_strategy_heatmap(dataset);
  r.type_heatmap = type_strategy_heatmap(dataset);
  r.vulnerability = system_vulnerability_scores(dataset);
  r.rules = extract_rules(model.tree, model.schema);
  return r;
}

json EvaluationResult::to_json() const {
  json imp = json::array();
  for (const auto& [name, v] : importances) imp.push_back({{"feature", name}, {"importance", v}});
  const auto pair = tree_confusion.most_confused_pair();
  return {
      {"evaluated_on", evaluated_on},
      {"rows", rows},
      {"random_forest",
       {{"report", forest_report.to_json()},
        {"confusion_matrix", forest_confusion.to_json()},
        {"cross_validation", forest_cv ? forest_cv->to_json() : json(nullptr)}}},
      {"decision_tree",
       {{"report", tree_report.to_json()},
        {"confusion_matrix", tree_confusion.to_json()},
        {"most_confused_pair", {to_string(pair.first), to_string(pair.second)}},
        {"cross_validation", tree_cv ? tree_cv->to_json() : json(nullptr)},
        {"rules", rules}}},
      {"feature_importance", imp},
      {"method_strategy_heatmap", method_heatmap.to_json()},
      {"type_strategy_heatmap", type_heatmap.to_json()},
      {"system_vulnerability", vulnerability.to_json()},
  };
}

std::string EvaluationResult::to_text() const {
  std::string out = "Evaluated on " + evaluated_on + " (" + std::to_string(rows) + " rows)\n\n";
  out += "Random forest\n" + forest_report.to_text() + "\n" + forest_confusion.to_text() + "\n";
  out += "Decision tree\n" + tree_report.to_text() + "\n" + tree_confusion.to_text() + "\n";
  out += "Cross-validation\n" + cv_line("  random forest", forest_cv) +
         cv_line("  decision tree", tree_cv) + "\n";
  out += "Feature importance\n";
  for (const auto& [name, v] : importances) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "  %-40s %6.2f%%\n", name.c_str(), 100.0 * v);
    out += buf;
  }
  out += "\n" + method_heatmap.to_text() + "\n" + type_heatmap.to_text() + "\n" +
         vulnerability.to_text() + "\nDecision tree rules\n";
  for (const auto& rule : rules) out += "  " + rule + "\n";
  return out;
}

}  // namespace pqmigrate
