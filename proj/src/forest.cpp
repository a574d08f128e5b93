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

#include "pqmigrate/forest.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <optional>
#include <numeric>
#include <thread>

#include "pqmigrate/error.hpp"
#include "pqmigrate/rng.hpp"

namespace pqmigrate {
namespace {

using nlohmann::json;

struct TreeFit {
  DecisionTree tree;
  std::vector<std::size_t> oob;
};

TreeFit fit_one(const FeatureMatrix& train, const ForestParams& params,
                const std::string& fingerprint, std::size_t index) {
  Rng rng = Rng::derived(params.seed, index);
  const std::size_t n = train.rows();
  std::vector<std::size_t> rows(n);
  std::vector<std::size_t> oob;
  if (params.bootstrap) {
    std::vector<bool> drawn(n, false);
    for (auto& r : rows) {
      r = static_cast<std::size_t>(rng.uniform_index(n));
      drawn[r] = true;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!drawn[i]) oob.push_back(i);
    }
  } else {
    std::iota(rows.begin(), rows.end(), std::size_t{0});
  }

  const std::size_t m = params.features_per_split.resolve(train.cols());
  FitOptions options;
  options.rows = rows;
  options.schema_fingerprint = fingerprint;
  if (m < train.cols()) {
    options.sampler = [&rng, m](std::span<const std::size_t> varying) {
      std::vector<std::size_t> pool(varying.begin(), varying.end());
      if (pool.size() <= m) return pool;
      // Partial Fisher-Yates: the first m slots become a uniform subset.
      for (std::size_t i = 0; i < m; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.uniform_index(pool.size() - i));
        std::swap(pool[i], pool[j]);
      }
      pool.resize(m);
      return pool;
    };
  }
  return {fit_tree(train, params.tree_params, options), std::move(oob)};
}

}  // namespace

std::size_t FeaturesPerSplit::resolve(std::size_t total) const {
  switch (kind) {
    case Kind::kAll:
      return total;
    case Kind::kFixed:
      return std::clamp<std::size_t>(count, 1, std::max<std::size_t>(total, 1));
    case Kind::kSqrt:
      break;
  }
  auto m = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(total))));
  return std::max<std::size_t>(m, 1);
}

std::string FeaturesPerSplit::to_string() const {
  switch (kind) {
    case Kind::kAll:
      return "all";
    case Kind::kFixed:
      return std::to_string(count);
    case Kind::kSqrt:
      break;
  }
  return "sqrt";
}

FeaturesPerSplit FeaturesPerSplit::parse(const std::string& text) {
  if (text == "sqrt") return {};
  if (text == "all") return {Kind::kAll, 0};
  std::size_t pos = 0;
  long long n = 0;
  try {
    n = std::stoll(text, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != text.size() || pos == 0 || n < 1) {
    throw InputError("features_per_split must be 'sqrt', 'all' or a positive integer",
                     "features_per_split");
  }
  return {Kind::kFixed, static_cast<std::size_t>(n)};
}

void ForestParams::validate() const {
  if (n_trees < 1) throw InputError("n_trees must be >= 1", "n_trees");
  tree_params.validate();
  if (features_per_split.kind == FeaturesPerSplit::Kind::kFixed &&
      features_per_split.count < 1) {
    throw InputError("features_per_split must be >= 1", "features_per_split");
  }
}

json ForestParams::to_json() const {
  return {{"n_trees", n_trees},
          {"tree_params", tree_params.to_json()},
          {"features_per_split", features_per_split.to_string()},
          {"bootstrap", bootstrap},
          {"seed", seed}};
}

ForestParams ForestParams::from_json(const json& j) {
  ForestParams p;
  p.n_trees = j.at("n_trees").get<int>();
  p.tree_params = TreeParams::from_json(j.at("tree_params"));
  p.features_per_split = FeaturesPerSplit::parse(j.at("features_per_split").get<std::string>());
  p.bootstrap = j.at("bootstrap").get<bool>();
  p.seed = j.at("seed").get<std::uint64_t>();
  p.validate();
  return p;
}

Forest::Forest(std::vector<DecisionTree> trees, ForestParams params,
               std::vector<std::vector<std::size_t>> oob_rows)
    : trees_(std::move(trees)), params_(params), oob_rows_(std::move(oob_rows)) {
  if (trees_.empty()) throw InputError("a forest needs at least one tree");
  if (oob_rows_.empty()) oob_rows_.resize(trees_.size());
  if (oob_rows_.size() != trees_.size()) {
    throw InputError("out-of-bag rows must be given per tree");
  }
  for (const auto& t : trees_) {
    if (t.n_features() != trees_.front().n_features() ||
        t.schema_fingerprint() != trees_.front().schema_fingerprint()) {
      throw InputError("forest trees disagree on the feature layout");
    }
  }
  importances_ = feature_importance(trees_, trees_.front().n_features());
}

std::size_t Forest::n_features() const {
  return trees_.empty() ? 0 : trees_.front().n_features();
}

json Forest::to_json() const {
  json trees = json::array();
  for (const auto& t : trees_) trees.push_back(t.to_json());
  return {{"params", params_.to_json()}, {"trees", trees}, {"oob_rows", oob_rows_}};
}

Forest Forest::from_json(const json& j) {
  try {
    std::vector<DecisionTree> trees;
    for (const auto& t : j.at("trees")) trees.push_back(DecisionTree::from_json(t));
    auto params = ForestParams::from_json(j.at("params"));
    if (static_cast<std::size_t>(params.n_trees) != trees.size()) {
      throw InputError("forest tree count does not match n_trees");
    }
    return Forest(std::move(trees), params,
                  j.at("oob_rows").get<std::vector<std::vector<std::size_t>>>());
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed forest: ") + e.what());
  }
}

Forest fit_forest(const FeatureMatrix& train, const ForestParams& params,
                  const std::string& schema_fingerprint) {
  params.validate();
  if (!train.labeled()) throw InputError("training matrix has no labels");
  if (train.rows() == 0) throw InputError("training matrix is empty");

  const auto n = static_cast<std::size_t>(params.n_trees);
  std::vector<std::optional<TreeFit>> fits(n);
  unsigned workers = params.threads ? params.threads : std::thread::hardware_concurrency();
  workers = std::clamp<unsigned>(workers, 1, static_cast<unsigned>(n));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t t = next++; t < n; t = next++) {
      try {
        fits[t] = fit_one(train, params, schema_fingerprint, t);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<DecisionTree> trees;
  std::vector<std::vector<std::size_t>> oob;
  trees.reserve(n);
  oob.reserve(n);
  for (auto& f : fits) {
    trees.push_back(std::move(f->tree));
    oob.push_back(std::move(f->oob));
  }
  return Forest(std::move(trees), params, std::move(oob));
}

Probabilities predict_proba(const Forest& forest, std::span<const double> x) {
  if (forest.trees().empty()) throw InputError("forest is not fitted");
  Probabilities sum{};
  for (const auto& t : forest.trees()) {
    const auto p = predict_tree(t, x);
    for (std::size_t c = 0; c < kNumStrategies; ++c) sum[c] += p[c];
  }
  const double n = static_cast<double>(forest.trees().size());
  for (auto& v : sum) v /= n;
  return sum;
}

std::vector<double> feature_importance(const std::vector<DecisionTree>& trees,
                                       std::size_t n_features) {
  std::vector<double> total(n_features, 0.0);
  for (const auto& t : trees) {
    const auto imp = impurity_importance(t);
    for (std::size_t f = 0; f < n_features; ++f) total[f] += imp[f];
  }
  if (trees.empty()) return total;
  for (auto& v : total) v /= static_cast<double>(trees.size());
  const double sum = std::accumulate(total.begin(), total.end(), 0.0);
  if (sum > 0.0) {
    for (auto& v : total) v /= sum;
  }
  return total;
}

double oob_accuracy(const Forest& forest, const FeatureMatrix& train) {
  if (!train.labeled()) throw InputError("out-of-bag scoring needs labels");
  std::vector<Probabilities> votes(train.rows(), Probabilities{});
  std::vector<int> seen(train.rows(), 0);
  for (std::size_t t = 0; t < forest.trees().size(); ++t) {
    for (auto r : forest.oob_rows()[t]) {
      if (r >= train.rows()) throw InputError("out-of-bag row outside the matrix");
      const auto p = predict_tree(forest.trees()[t], train.row(r));
      for (std::size_t c = 0; c < kNumStrategies; ++c) votes[r][c] += p[c];
      ++seen[r];
    }
  }
  std::size_t scored = 0;
  std::size_t correct = 0;
  for (std::size_t r = 0; r < train.rows(); ++r) {
    if (!seen[r]) continue;
    ++scored;
    if (argmax(votes[r]) == train.label(r)) ++correct;
  }
  return scored ? static_cast<double>(correct) / static_cast<double>(scored) : 0.0;
}

}  // namespace pqmigrate
