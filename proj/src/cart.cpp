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

#include "pqmigrate/cart.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <utility>

#include "pqmigrate/error.hpp"

namespace pqmigrate {
namespace {

using nlohmann::json;
using Int128 = __int128;

std::int64_t total_of(const ClassCounts& c) {
  return std::accumulate(c.begin(), c.end(), std::int64_t{0});
}

std::int64_t sum_squares(const ClassCounts& c) {
  std::int64_t s = 0;
  for (auto v : c) s += v * v;
  return s;
}

bool is_pure(const ClassCounts& c) {
  return std::count_if(c.begin(), c.end(), [](auto v) { return v > 0; }) <= 1;
}

// A partition scored by Q = ssL/nL + ssR/nR, which is exactly what the
// weighted child impurity subtracts from 1; larger Q means a better split.
struct Score {
  Int128 num = 0;
  Int128 den = 1;

  bool better_than(const Score& o) const { return num * o.den > o.num * den; }
};

Score partition_score(const ClassCounts& left, const ClassCounts& right) {
  const std::int64_t nl = total_of(left);
  const std::int64_t nr = total_of(right);
  return {Int128(sum_squares(left)) * nr + Int128(sum_squares(right)) * nl,
          Int128(nl) * nr};
}

// Parent impurity minus weighted child impurity, from exact integers.
double decrease_of(const Score& s, const ClassCounts& parent) {
  const std::int64_t n = total_of(parent);
  const Int128 num = s.num * n - Int128(sum_squares(parent)) * s.den;
  const long double den = static_cast<long double>(s.den) * n * n;
  return static_cast<double>(static_cast<long double>(num) / den);
}

double midpoint(double a, double b) {
  const double m = a + (b - a) / 2.0;
  return m < b ? m : a;
}

class TreeBuilder {
 public:
  TreeBuilder(const FeatureMatrix& data, const TreeParams& params,
              const FeatureSampler& sampler)
      : data_(data), params_(params), sampler_(sampler) {}

  std::vector<TreeNode> build(std::vector<std::size_t> rows) {
    grow(rows, 0);
    return std::move(nodes_);
  }

 private:
  std::int32_t grow(const std::vector<std::size_t>& rows, int depth) {
    const auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.emplace_back();
    ClassCounts counts{};
    for (auto r : rows) ++counts[index_of(data_.label(r))];
    nodes_[id].counts = counts;

    if (depth >= params_.max_depth || is_pure(counts) ||
        static_cast<std::int64_t>(rows.size()) < params_.min_samples_split) {
      return id;
    }
    std::vector<std::size_t> varying;
    for (std::size_t f = 0; f < data_.cols(); ++f) {
      const double first = data_.at(rows.front(), f);
      for (auto r : rows) {
        if (data_.at(r, f) != first) {
          varying.push_back(f);
          break;
        }
      }
    }
    if (varying.empty()) return id;
    std::vector<std::size_t> candidates = sampler_ ? sampler_(varying) : varying;
    std::sort(candidates.begin(), candidates.end());
    const auto split =
        best_split(data_, rows, candidates, params_.min_impurity_decrease);
    if (!split) return id;

    std::vector<std::size_t> left, right;
    for (auto r : rows) {
      (data_.at(r, split->feature) <= split->threshold ? left : right).push_back(r);
    }
    nodes_[id].feature = static_cast<int>(split->feature);
    nodes_[id].threshold = split->threshold;
    const auto l = grow(left, depth + 1);
    nodes_[id].left = l;
    const auto r = grow(right, depth + 1);
    nodes_[id].right = r;
    return id;
  }

  const FeatureMatrix& data_;
  const TreeParams& params_;
  const FeatureSampler& sampler_;
  std::vector<TreeNode> nodes_;
};

json node_to_json(const std::vector<TreeNode>& nodes, std::size_t i) {
  const auto& n = nodes[i];
  json j = {{"counts", n.counts}};
  if (!n.is_leaf()) {
    j["feature"] = n.feature;
    j["threshold"] = n.threshold;
    j["left"] = node_to_json(nodes, static_cast<std::size_t>(n.left));
    j["right"] = node_to_json(nodes, static_cast<std::size_t>(n.right));
  }
  return j;
}

std::int32_t node_from_json(const json& j, std::vector<TreeNode>& nodes,
                            int depth) {
  if (depth > 64) throw InputError("tree nesting too deep");
  const auto id = static_cast<std::int32_t>(nodes.size());
  nodes.emplace_back();
  nodes[id].counts = j.at("counts").get<ClassCounts>();
  for (auto c : nodes[id].counts) {
    if (c < 0) throw InputError("negative class count in tree node");
  }
  if (total_of(nodes[id].counts) == 0) throw InputError("empty tree node");
  if (j.contains("feature")) {
    nodes[id].feature = j.at("feature").get<int>();
    nodes[id].threshold = j.at("threshold").get<double>();
    const auto l = node_from_json(j.at("left"), nodes, depth + 1);
    nodes[id].left = l;
    const auto r = node_from_json(j.at("right"), nodes, depth + 1);
    nodes[id].right = r;
  }
  return id;
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

}  // namespace

double gini(std::span<const std::int64_t> class_counts) {
  std::int64_t n = 0;
  for (auto c : class_counts) {
    if (c < 0) throw InputError("class counts must be nonnegative");
    n += c;
  }
  if (n == 0) throw InputError("gini of an empty node is undefined");
  double acc = 0.0;
  for (auto c : class_counts) {
    const double p = static_cast<double>(c) / static_cast<double>(n);
    acc += p * p;
  }
  return 1.0 - acc;
}

void TreeParams::validate() const {
  if (max_depth < 1) throw InputError("max_depth must be >= 1", "max_depth");
  if (min_samples_split < 2) {
    throw InputError("min_samples_split must be >= 2", "min_samples_split");
  }
  if (!(min_impurity_decrease >= 0.0)) {
    throw InputError("min_impurity_decrease must be >= 0", "min_impurity_decrease");
  }
}

json TreeParams::to_json() const {
  return {{"max_depth", max_depth},
          {"min_samples_split", min_samples_split},
          {"min_impurity_decrease", min_impurity_decrease}};
}

TreeParams TreeParams::from_json(const json& j) {
  TreeParams p;
  p.max_depth = j.at("max_depth").get<int>();
  p.min_samples_split = j.at("min_samples_split").get<int>();
  p.min_impurity_decrease = j.at("min_impurity_decrease").get<double>();
  p.validate();
  return p;
}

std::int64_t TreeNode::samples() const { return total_of(counts); }

DecisionTree::DecisionTree(std::vector<TreeNode> nodes, TreeParams params,
                           std::size_t n_features, std::string schema_fingerprint)
    : nodes_(std::move(nodes)),
      params_(params),
      n_features_(n_features),
      schema_fingerprint_(std::move(schema_fingerprint)) {
  if (nodes_.empty()) throw InputError("a tree needs at least one node");
  for (const auto& n : nodes_) {
    if (n.is_leaf()) continue;
    const auto size = static_cast<std::int32_t>(nodes_.size());
    if (n.feature >= static_cast<int>(n_features_) || n.left <= 0 ||
        n.right <= 0 || n.left >= size || n.right >= size) {
      throw InputError("tree node references an invalid feature or child");
    }
  }
}

int DecisionTree::depth() const {
  std::vector<int> d(nodes_.size(), 0);
  int best = 0;
  // Children always have larger indices than their parent.
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    best = std::max(best, d[i]);
    if (!nodes_[i].is_leaf()) {
      d[static_cast<std::size_t>(nodes_[i].left)] = d[i] + 1;
      d[static_cast<std::size_t>(nodes_[i].right)] = d[i] + 1;
    }
  }
  return best;
}

std::size_t DecisionTree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const auto& n) { return n.is_leaf(); }));
}

std::size_t DecisionTree::leaf_index(std::span<const double> x) const {
  if (x.size() != n_features_) {
    throw InputError("feature vector has " + std::to_string(x.size()) +
                     " entries, tree expects " + std::to_string(n_features_));
  }
  std::size_t i = 0;
  while (!nodes_[i].is_leaf()) {
    const auto& n = nodes_[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold
                                     ? n.left
                                     : n.right);
  }
  return i;
}

json DecisionTree::to_json() const {
  return {{"n_features", n_features_},
          {"schema_fingerprint", schema_fingerprint_},
          {"params", params_.to_json()},
          {"root", node_to_json(nodes_, 0)}};
}

DecisionTree DecisionTree::from_json(const json& j) {
  try {
    std::vector<TreeNode> nodes;
    node_from_json(j.at("root"), nodes, 0);
    return DecisionTree(std::move(nodes), TreeParams::from_json(j.at("params")),
                        j.at("n_features").get<std::size_t>(),
                        j.at("schema_fingerprint").get<std::string>());
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed tree: ") + e.what());
  }
}

std::optional<SplitCandidate> best_split(const FeatureMatrix& data,
                                         std::span<const std::size_t> rows,
                                         std::span<const std::size_t> features,
                                         double min_impurity_decrease) {
  if (rows.size() < 2) return std::nullopt;
  ClassCounts parent{};
  for (auto r : rows) ++parent[index_of(data.label(r))];

  std::optional<SplitCandidate> best;
  Score best_score;
  std::vector<std::pair<double, std::size_t>> column(rows.size());
  for (auto f : features) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      column[i] = {data.at(rows[i], f), index_of(data.label(rows[i]))};
    }
    std::sort(column.begin(), column.end());
    ClassCounts left{};
    ClassCounts right = parent;
    for (std::size_t i = 0; i + 1 < column.size(); ++i) {
      ++left[column[i].second];
      --right[column[i].second];
      if (column[i].first == column[i + 1].first) continue;
      const Score s = partition_score(left, right);
      if (!best || s.better_than(best_score)) {
        best_score = s;
        best = SplitCandidate{f, midpoint(column[i].first, column[i + 1].first), 0.0};
      }
    }
  }
  if (!best) return std::nullopt;
  best->impurity_decrease = decrease_of(best_score, parent);
  if (best->impurity_decrease <= min_impurity_decrease) return std::nullopt;
  return best;
}

DecisionTree fit_tree(const FeatureMatrix& train, const TreeParams& params,
                      const FitOptions& options) {
  params.validate();
  if (!train.labeled()) throw InputError("training matrix has no labels");
  if (train.rows() == 0) throw InputError("training matrix is empty");
  std::vector<std::size_t> rows(options.rows.begin(), options.rows.end());
  if (rows.empty()) {
    rows.resize(train.rows());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
  }
  TreeBuilder builder(train, params, options.sampler);
  return DecisionTree(builder.build(std::move(rows)), params, train.cols(),
                      options.schema_fingerprint);
}

Strategy majority(const ClassCounts& counts) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < kNumStrategies; ++c) {
    if (counts[c] > counts[best]) best = c;
  }
  return static_cast<Strategy>(best);
}

Strategy argmax(const Probabilities& p) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < kNumStrategies; ++c) {
    if (p[c] > p[best]) best = c;
  }
  return static_cast<Strategy>(best);
}

Probabilities predict_tree(const DecisionTree& tree, std::span<const double> x) {
  const auto& leaf = tree.nodes()[tree.leaf_index(x)];
  const double n = static_cast<double>(leaf.samples());
  Probabilities p{};
  for (std::size_t c = 0; c < kNumStrategies; ++c) {
    p[c] = static_cast<double>(leaf.counts[c]) / n;
  }
  return p;
}

std::vector<double> impurity_importance(const DecisionTree& tree) {
  std::vector<double> imp(tree.n_features(), 0.0);
  const auto& nodes = tree.nodes();
  const double root_n = static_cast<double>(nodes[0].samples());
  for (const auto& n : nodes) {
    if (n.is_leaf()) continue;
    const auto& l = nodes[static_cast<std::size_t>(n.left)];
    const auto& r = nodes[static_cast<std::size_t>(n.right)];
    const double nn = static_cast<double>(n.samples());
    const double weighted = (static_cast<double>(l.samples()) * gini(l.counts) +
                             static_cast<double>(r.samples()) * gini(r.counts)) /
                            nn;
    imp[static_cast<std::size_t>(n.feature)] +=
        (nn / root_n) * std::max(0.0, gini(n.counts) - weighted);
  }
  return imp;
}

std::vector<TreeRule> tree_rules(const DecisionTree& tree) {
  std::vector<TreeRule> rules;
  std::vector<RuleCondition> path;
  const auto& nodes = tree.nodes();
  auto walk = [&](auto&& self, std::size_t i) -> void {
    const auto& n = nodes[i];
    if (n.is_leaf()) {
      const Strategy s = majority(n.counts);
      rules.push_back({path, s,
                       static_cast<double>(n.counts[index_of(s)]) /
                           static_cast<double>(n.samples()),
                       i});
      return;
    }
    const auto f = static_cast<std::size_t>(n.feature);
    path.push_back({f, n.threshold, false});
    self(self, static_cast<std::size_t>(n.left));
    path.back().greater = true;
    self(self, static_cast<std::size_t>(n.right));
    path.pop_back();
  };
  walk(walk, 0);
  return rules;
}

std::vector<std::string> extract_rules(const DecisionTree& tree,
                                       const FeatureSchema& schema) {
  if (schema.size() != tree.n_features() ||
      (!tree.schema_fingerprint().empty() &&
       tree.schema_fingerprint() != schema.fingerprint())) {
    throw InputError("schema does not match the tree's fingerprint");
  }
  std::vector<std::string> out;
  for (const auto& rule : tree_rules(tree)) {
    std::string text;
    for (const auto& c : rule.conditions) {
      text += text.empty() ? "IF " : " AND ";
      if (const auto block = schema.block_of(c.feature)) {
        const auto& spec = schema.categorical[*block];
        const auto [first, last] = schema.block(*block);
        text += spec.field + (c.greater ? " = " : " ≠ ") +
                spec.categories[c.feature - first];
      } else {
        const auto& spec = schema.numeric[*schema.numeric_of(c.feature)];
        const double raw = spec.min + c.threshold * (spec.max - spec.min);
        text += spec.field + (c.greater ? " > " : " ≤ ") + format_number(raw);
      }
    }
    if (text.empty()) text = "ALWAYS";
    char purity[32];
    std::snprintf(purity, sizeof purity, "%.2f", rule.purity);
    text += " → " + std::string(to_string(rule.outcome)) + " (purity " + purity + ")";
    out.push_back(std::move(text));
  }
  return out;
}

}  // namespace pqmigrate
