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

#include <cmath>

#include "doctest.h"
#include "oracle.hpp"
#include "pqmigrate/cart.hpp"
#include "pqmigrate/error.hpp"
#include "support.hpp"

using namespace pqmigrate;

namespace {

FeatureSchema tiny_schema() {
  FeatureSchema s;
  s.categorical = {{"system_type", {"iot_device"}}, {"crypto_method", {"AES", "RSA"}}};
  s.numeric = {{"security_lifetime", 1, 29},
               {"key_size", 128, 4096},
               {"system_complexity", 1, 5},
               {"integration_complexity", 1, 5},
               {"data_sensitivity", 1, 5}};
  for (const auto& c : s.categorical) {
    for (const auto& v : c.categories) s.feature_names.push_back(c.field + "=" + v);
  }
  for (const auto& n : s.numeric) s.feature_names.push_back(n.field);
  return s;
}

TreeNode leaf(ClassCounts c) {
  TreeNode n;
  n.counts = c;
  return n;
}

TreeNode split(int feature, double t, std::int32_t l, std::int32_t r, ClassCounts c) {
  TreeNode n;
  n.feature = feature;
  n.threshold = t;
  n.left = l;
  n.right = r;
  n.counts = c;
  return n;
}

}  // namespace

TEST_SUITE("cart") {
  TEST_CASE("gini known values and bounds") {
    CHECK(gini(std::vector<std::int64_t>{10, 0, 0, 0, 0}) == 0.0);
    CHECK(gini(std::vector<std::int64_t>{1, 1, 1, 1, 1}) == doctest::Approx(0.8));
    CHECK(gini(std::vector<std::int64_t>{3, 1}) == doctest::Approx(0.375));
    CHECK(gini(std::vector<std::int64_t>{1, 1}) == doctest::Approx(0.5));
    CHECK(gini(std::vector<std::int64_t>{241, 241, 241, 241, 241}) == doctest::Approx(0.8));
    CHECK_THROWS_AS(gini(std::vector<std::int64_t>{0, 0, 0}), InputError);
    CHECK_THROWS_AS(gini(std::vector<std::int64_t>{2, -1}), InputError);
    Rng rng(99);
    for (int i = 0; i < 1000; ++i) {
      std::vector<std::int64_t> c(kNumStrategies);
      std::int64_t n = 0;
      while (n == 0) {
        n = 0;
        for (auto& v : c) n += (v = static_cast<std::int64_t>(rng.uniform_index(50)));
      }
      const double g = gini(c);
      CHECK(g >= 0.0);
      CHECK(g <= 1.0 - 1.0 / kNumStrategies + 1e-12);
    }
  }

  TEST_CASE("best_split agrees with the brute-force oracle") {
    Rng rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
      const auto rows = 2 + rng.uniform_index(60);
      const auto cols = 1 + rng.uniform_index(5);
      const auto m = testing::grid_matrix(rng, rows, cols, 1 + rng.uniform_int(1, 8),
                                          rng.uniform_int(1, 5));
      std::vector<std::size_t> all(m.rows()), features(m.cols());
      for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
      for (std::size_t i = 0; i < features.size(); ++i) features[i] = i;
      const auto got = best_split(m, all, features);
      const auto want = testing::oracle_split(m, all);
      REQUIRE(got.has_value() == want.has_value());
      if (got) {
        CHECK(got->feature == want->feature);
        CHECK(got->threshold == want->threshold);
        CHECK(got->impurity_decrease > 0.0);
      }
    }
  }

  TEST_CASE("shallow trees match the oracle exactly") {
    Rng rng(7);
    for (int trial = 0; trial < 100; ++trial) {
      const auto m = testing::grid_matrix(rng, 5 + rng.uniform_index(196),
                                          1 + rng.uniform_index(6), 8, 5);
      for (int depth : {1, 2, 3}) {
        TreeParams p;
        p.max_depth = depth;
        const auto tree = fit_tree(m, p);
        CHECK(testing::same_nodes(tree.nodes(), testing::oracle_tree(m, depth)));
        CHECK(tree.depth() <= depth);
      }
    }
  }

  TEST_CASE("ties go to the lowest feature, then the lowest threshold") {
    // Features 0 and 1 are identical; two thresholds on each are equally good.
    FeatureMatrix m(2, {0, 0, 0.25, 0.25, 0.5, 0.5, 0.75, 0.75},
                    {Strategy::kNoActionNeeded, Strategy::kImmediateHybrid,
                     Strategy::kNoActionNeeded, Strategy::kImmediateHybrid});
    const std::vector<std::size_t> rows{0, 1, 2, 3};
    const std::vector<std::size_t> features{0, 1};
    const auto s = best_split(m, rows, features);
    REQUIRE(s);
    CHECK(s->feature == 0);
    CHECK(s->threshold == 0.125);
  }

  TEST_CASE("small split examples") {
    FeatureMatrix toy(1, {0.1, 0.2, 0.8},
                      {Strategy::kNoActionNeeded, Strategy::kNoActionNeeded,
                       Strategy::kMonitorAndPrepare});
    const std::vector<std::size_t> rows{0, 1, 2}, one{0};
    auto s = best_split(toy, rows, one);
    REQUIRE(s);
    CHECK(s->feature == 0);
    CHECK(s->threshold == doctest::Approx(0.5));

    FeatureMatrix same(2, {0.3, 0.6, 0.3, 0.6, 0.3, 0.6},
                       {Strategy::kNoActionNeeded, Strategy::kMonitorAndPrepare,
                        Strategy::kImmediateHybrid});
    const std::vector<std::size_t> both{0, 1};
    CHECK_FALSE(best_split(same, rows, both).has_value());

    FeatureMatrix pure(1, {0.1, 0.5, 0.9},
                       {Strategy::kImmediateHybrid, Strategy::kImmediateHybrid,
                        Strategy::kImmediateHybrid});
    const auto t = fit_tree(pure, TreeParams{});
    CHECK(t.nodes().size() == 1);
    CHECK(t.depth() == 0);
    const std::vector<double> x{0.5};
    CHECK(predict_tree(t, x)[index_of(Strategy::kImmediateHybrid)] == 1.0);
  }

  TEST_CASE("leaf probabilities are normalized counts") {
    const DecisionTree t({leaf({8, 2, 0, 0, 0})}, TreeParams{}, 1, "");
    const std::vector<double> x{0.0};
    const auto p = predict_tree(t, x);
    CHECK(p == Probabilities{0.8, 0.2, 0.0, 0.0, 0.0});
  }

  TEST_CASE("a perfect separator yields a pure stump") {
    FeatureMatrix m(1, {0.1, 0.2, 0.8, 0.9},
                    {Strategy::kMonitorAndPrepare, Strategy::kMonitorAndPrepare,
                     Strategy::kImmediateReplacement, Strategy::kImmediateReplacement});
    const auto t = fit_tree(m, TreeParams{});
    REQUIRE(t.nodes().size() == 3);
    CHECK(t.nodes()[0].threshold == doctest::Approx(0.5));
    CHECK(t.depth() == 1);
    CHECK(t.leaf_count() == 2);
    const std::vector<double> x{0.15};
    const auto p = predict_tree(t, x);
    CHECK(p[index_of(Strategy::kMonitorAndPrepare)] == 1.0);
    CHECK(impurity_importance(t)[0] == doctest::Approx(0.5));
  }

  TEST_CASE("stopping rules") {
    Rng rng(3);
    const auto m = testing::grid_matrix(rng, 120, 4, 8, 5);
    TreeParams p;
    p.max_depth = 8;
    p.min_samples_split = 30;
    const auto t = fit_tree(m, p);
    for (const auto& n : t.nodes()) {
      if (!n.is_leaf()) CHECK(n.samples() >= 30);
    }
    p.min_samples_split = 2;
    p.min_impurity_decrease = 10.0;
    CHECK(fit_tree(m, p).nodes().size() == 1);
    // Constant features cannot be split.
    FeatureMatrix flat(1, {0.5, 0.5, 0.5},
                       {Strategy::kNoActionNeeded, Strategy::kImmediateHybrid,
                        Strategy::kNoActionNeeded});
    CHECK(fit_tree(flat, TreeParams{}).leaf_count() == 1);
    p.max_depth = 0;
    CHECK_THROWS_AS(fit_tree(m, p), InputError);
  }

  TEST_CASE("bootstrap rows count with multiplicity") {
    FeatureMatrix m(1, {0.0, 1.0},
                    {Strategy::kNoActionNeeded, Strategy::kImmediateHybrid});
    const std::vector<std::size_t> rows{0, 0, 0, 1};
    FitOptions opt;
    opt.rows = rows;
    const auto t = fit_tree(m, TreeParams{}, opt);
    CHECK(t.nodes()[0].counts[0] == 3);
    CHECK(t.nodes()[0].counts[index_of(Strategy::kImmediateHybrid)] == 1);
  }

  TEST_CASE("the sampler restricts the candidate features") {
    Rng rng(8);
    const auto m = testing::grid_matrix(rng, 100, 5, 8, 5);
    FitOptions opt;
    opt.sampler = [](std::span<const std::size_t> varying) {
      std::vector<std::size_t> out;
      for (auto f : varying) {
        if (f == 3) out.push_back(f);
      }
      return out;
    };
    const auto t = fit_tree(m, TreeParams{}, opt);
    CHECK(t.nodes().size() > 1);
    for (const auto& n : t.nodes()) {
      if (!n.is_leaf()) CHECK(n.feature == 3);
    }
  }

  TEST_CASE("JSON round-trip and structural validation") {
    Rng rng(4);
    const auto m = testing::grid_matrix(rng, 150, 4, 8, 5);
    const auto t = fit_tree(m, TreeParams{});
    const auto back = DecisionTree::from_json(t.to_json());
    CHECK(back.to_json() == t.to_json());
    CHECK(testing::same_nodes(back.nodes(), t.nodes()));

    auto neg = t.to_json();
    neg["root"]["counts"][0] = -1;
    CHECK_THROWS_AS(DecisionTree::from_json(neg), InputError);
    auto missing = t.to_json();
    missing.erase("params");
    CHECK_THROWS_AS(DecisionTree::from_json(missing), InputError);
    auto bad_feature = t.to_json();
    bad_feature["root"]["feature"] = 99;
    CHECK_THROWS_AS(DecisionTree::from_json(bad_feature), InputError);

    nlohmann::json deep = {{"counts", {1, 0, 0, 0, 0}}};
    for (int i = 0; i < 70; ++i) {
      deep = {{"counts", {1, 0, 0, 0, 0}}, {"feature", 0}, {"threshold", 0.5},
              {"left", deep}, {"right", {{"counts", {1, 0, 0, 0, 0}}}}};
    }
    auto doc = t.to_json();
    doc["root"] = deep;
    CHECK_THROWS_AS(DecisionTree::from_json(doc), InputError);

    const std::vector<double> short_row{0.1};
    CHECK_THROWS_AS(t.leaf_index(short_row), InputError);
  }

  TEST_CASE("argmax and majority break ties toward less urgency") {
    CHECK(majority({0, 3, 3, 0, 0}) == Strategy::kMonitorAndPrepare);
    CHECK(argmax({0.2, 0.2, 0.2, 0.2, 0.2}) == Strategy::kNoActionNeeded);
    CHECK(argmax({0.0, 0.1, 0.0, 0.0, 0.9}) == Strategy::kImmediateReplacement);
  }

  TEST_CASE("rules render raw thresholds and categorical tests") {
    const auto schema = tiny_schema();
    // life is feature 3, crypto_method=AES is feature 1.
    std::vector<TreeNode> nodes{
        split(3, 0.5, 1, 2, {5, 0, 5, 0, 0}),
        leaf({5, 0, 0, 0, 0}),
        split(1, 0.5, 3, 4, {0, 0, 5, 0, 0}),
        leaf({0, 0, 4, 0, 0}),
        leaf({0, 0, 1, 0, 0})};
    const DecisionTree t(nodes, TreeParams{}, schema.size(), "");
    const auto rules = extract_rules(t, schema);
    REQUIRE(rules.size() == 3);
    CHECK(rules[0] == "IF security_lifetime ≤ 15.0 → no_action_needed (purity 1.00)");
    CHECK(rules[1] ==
          "IF security_lifetime > 15.0 AND crypto_method ≠ AES → scheduled_transition "
          "(purity 1.00)");
    CHECK(rules[2] ==
          "IF security_lifetime > 15.0 AND crypto_method = AES → scheduled_transition "
          "(purity 1.00)");

    const DecisionTree single({leaf({1, 2, 0, 0, 0})}, TreeParams{}, schema.size(), "");
    CHECK(extract_rules(single, schema)[0] == "ALWAYS → monitor_and_prepare (purity 0.67)");

    const DecisionTree pinned(nodes, TreeParams{}, schema.size(), "0000000000000000");
    CHECK_THROWS_AS(extract_rules(pinned, schema), InputError);
  }

  TEST_CASE("every rule routes exactly the rows its leaf receives") {
    const auto& f = testing::fixture();
    const auto m = encode_dataset(f.test, f.model.schema);
    const auto rules = tree_rules(f.model.tree);
    CHECK(rules.size() == f.model.tree.leaf_count());
    for (std::size_t i = 0; i < m.rows(); ++i) {
      const auto x = m.row(i);
      std::size_t matches = 0;
      for (const auto& rule : rules) {
        bool ok = true;
        for (const auto& c : rule.conditions) {
          ok = ok && ((x[c.feature] > c.threshold) == c.greater);
        }
        if (ok) {
          ++matches;
          CHECK(rule.leaf == f.model.tree.leaf_index(x));
          CHECK(rule.outcome == argmax(predict_tree(f.model.tree, x)));
        }
      }
      CHECK(matches == 1);
    }
  }
}
