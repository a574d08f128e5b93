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

// Brute-force reference for greedy CART growth. Deliberately naive: every
// candidate threshold re-partitions the rows from scratch and impurities are
// compared as exact fractions of weighted Gini, not via the production
// scoring identity.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "pqmigrate/cart.hpp"
#include "pqmigrate/features.hpp"

namespace pqmigrate::testing {

struct OracleSplit {
  std::size_t feature = 0;
  double threshold = 0.0;
};

struct Fraction {
  __int128 num = 0;
  __int128 den = 1;
  bool operator<(const Fraction& o) const { return num * o.den < o.num * den; }
};

inline ClassCounts count_rows(const FeatureMatrix& m, const std::vector<std::size_t>& rows) {
  ClassCounts c{};
  for (auto r : rows) ++c[index_of(m.label(r))];
  return c;
}

// n * Gini(counts) as a fraction: (n^2 - sum c^2) / n.
inline Fraction scaled_gini(const ClassCounts& c) {
  std::int64_t n = 0, ss = 0;
  for (auto v : c) {
    n += v;
    ss += v * v;
  }
  return {__int128(n) * n - ss, n};
}

inline Fraction add(const Fraction& a, const Fraction& b) {
  return {a.num * b.den + b.num * a.den, a.den * b.den};
}

// Lowest weighted child Gini over all midpoints, ties to the lowest feature
// then the lowest threshold; nullopt unless it is strictly below the parent.
inline std::optional<OracleSplit> oracle_split(const FeatureMatrix& m,
                                               const std::vector<std::size_t>& rows) {
  std::optional<OracleSplit> best;
  Fraction best_w;
  for (std::size_t f = 0; f < m.cols(); ++f) {
    std::set<double> values;
    for (auto r : rows) values.insert(m.at(r, f));
    std::vector<double> v(values.begin(), values.end());
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
      const double t = (v[i] + v[i + 1]) / 2.0;
      std::vector<std::size_t> left, right;
      for (auto r : rows) (m.at(r, f) <= t ? left : right).push_back(r);
      const Fraction w = add(scaled_gini(count_rows(m, left)), scaled_gini(count_rows(m, right)));
      if (!best || w < best_w) {
        best = OracleSplit{f, t};
        best_w = w;
      }
    }
  }
  if (best && best_w < scaled_gini(count_rows(m, rows))) return best;
  return std::nullopt;
}

inline void oracle_grow(const FeatureMatrix& m, const std::vector<std::size_t>& rows,
                        int depth, int max_depth, std::vector<TreeNode>& out) {
  const auto id = out.size();
  out.emplace_back();
  out[id].counts = count_rows(m, rows);
  int classes = 0;
  for (auto v : out[id].counts) classes += v > 0;
  if (depth >= max_depth || classes <= 1 || rows.size() < 2) return;
  const auto s = oracle_split(m, rows);
  if (!s) return;
  std::vector<std::size_t> left, right;
  for (auto r : rows) (m.at(r, s->feature) <= s->threshold ? left : right).push_back(r);
  out[id].feature = static_cast<int>(s->feature);
  out[id].threshold = s->threshold;
  out[id].left = static_cast<std::int32_t>(out.size());
  oracle_grow(m, left, depth + 1, max_depth, out);
  out[id].right = static_cast<std::int32_t>(out.size());
  oracle_grow(m, right, depth + 1, max_depth, out);
}

// Preorder node list of the greedy tree on every row.
inline std::vector<TreeNode> oracle_tree(const FeatureMatrix& m, int max_depth) {
  std::vector<std::size_t> rows(m.rows());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  std::vector<TreeNode> out;
  oracle_grow(m, rows, 0, max_depth, out);
  return out;
}

inline bool same_nodes(const std::vector<TreeNode>& a, const std::vector<TreeNode>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].feature != b[i].feature || a[i].left != b[i].left ||
        a[i].right != b[i].right || a[i].counts != b[i].counts) {
      return false;
    }
    if (!a[i].is_leaf() && a[i].threshold != b[i].threshold) return false;
  }
  return true;
}

}  // namespace pqmigrate::testing
