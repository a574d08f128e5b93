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

#include <array>
#include <sstream>

#include "doctest.h"
#include "pqmigrate/datagen.hpp"
#include "pqmigrate/error.hpp"
#include "pqmigrate/record_io.hpp"
#include "support.hpp"

using namespace pqmigrate;

namespace {

std::array<std::size_t, kNumStrategies> class_counts(const std::vector<Strategy>& labels) {
  std::array<std::size_t, kNumStrategies> out{};
  for (auto s : labels) ++out[index_of(s)];
  return out;
}

}  // namespace

TEST_SUITE("datagen") {
  TEST_CASE("default corpus is balanced and sized") {
    const auto g = generate_dataset(GeneratorConfig{});
    CHECK(g.records.size() == 1205);
    for (auto c : class_counts(g.clean_labels)) CHECK(c == 241);
    for (std::size_t i = 0; i < g.records.size(); ++i) {
      CHECK(validate_record(g.records[i]).empty());
      CHECK(label_strategy(g.records[i]) == g.clean_labels[i]);
    }
  }

  TEST_CASE("noise flips exactly round(rate * total) labels to another class") {
    const auto g = generate_dataset(GeneratorConfig{});
    REQUIRE(g.flipped.size() == 7);
    std::size_t changed = 0;
    for (std::size_t i = 0; i < g.records.size(); ++i) {
      if (*g.records[i].recommended_strategy != g.clean_labels[i]) ++changed;
    }
    CHECK(changed == 7);
    for (auto i : g.flipped) CHECK(*g.records[i].recommended_strategy != g.clean_labels[i]);
    const auto report = validate_consistency(g.records);
    CHECK(report.consistent == 1198);
    CHECK(report.consistency_ratio == doctest::Approx(1198.0 / 1205.0));
    CHECK(report.violations.size() == 7);
  }

  TEST_CASE("noise free corpus is fully consistent") {
    GeneratorConfig cfg;
    cfg.label_noise_rate = 0.0;
    const auto g = generate_dataset(cfg);
    CHECK(g.flipped.empty());
    CHECK(validate_consistency(g.records).consistency_ratio == 1.0);
  }

  TEST_CASE("generation is deterministic per seed") {
    GeneratorConfig cfg;
    cfg.records_per_class = 60;
    const auto a = generate_dataset(cfg);
    const auto b = generate_dataset(cfg);
    CHECK(a.records == b.records);
    cfg.seed = 43;
    CHECK(generate_dataset(cfg).records != a.records);
  }

  TEST_CASE("records honour their type's profile") {
    const auto g = generate_dataset(GeneratorConfig{});
    for (const auto& r : g.records) {
      const auto& p = constraint_profile(r.system_type);
      CHECK(p.sensitivity.contains(r.data_sensitivity));
      CHECK(p.lifetime.contains(r.security_lifetime));
      CHECK(p.system_complexity.contains(r.system_complexity));
      CHECK(p.integration_complexity.contains(r.integration_complexity));
      CHECK(std::find(p.allowed_methods.begin(), p.allowed_methods.end(),
                      r.crypto_method) != p.allowed_methods.end());
      if (r.system_type == SystemType::kHealthcareRecords) CHECK(r.data_sensitivity >= 4);
      if (r.system_type == SystemType::kIotDevice) CHECK(r.system_complexity <= 3);
    }
  }

  TEST_CASE("sample_record is deterministic under a fixed seed") {
    for (auto t : kAllSystemTypes) {
      Rng a(77), b(77);
      CHECK(sample_record(t, constraint_profile(t), a) ==
            sample_record(t, constraint_profile(t), b));
    }
  }

  TEST_CASE("noise count matches a diff against the noise-free run") {
    GeneratorConfig clean;
    clean.label_noise_rate = 0.0;
    const auto a = generate_dataset(clean).records;
    const auto b = generate_dataset(GeneratorConfig{}).records;
    REQUIRE(a.size() == b.size());
    int diff = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      SystemRecord x = a[i], y = b[i];
      CHECK(x.recommended_strategy.has_value());
      x.recommended_strategy.reset();
      y.recommended_strategy.reset();
      CHECK(x == y);
      diff += a[i].recommended_strategy != b[i].recommended_strategy;
    }
    CHECK(diff >= 4);
    CHECK(diff <= 10);
    CHECK(diff == 7);
  }

  TEST_CASE("sample_record stays inside an arbitrary profile") {
    DomainConstraint p{{2, 3}, {4, 4}, {1, 2}, {7, 9},
                       {CryptoMethod::kEcc, CryptoMethod::kFalcon}};
    Rng rng(11);
    for (int i = 0; i < 500; ++i) {
      const auto r = sample_record(SystemType::kCloudService, p, rng);
      CHECK(r.system_type == SystemType::kCloudService);
      CHECK(p.sensitivity.contains(r.data_sensitivity));
      CHECK(r.system_complexity == 4);
      CHECK(p.lifetime.contains(r.security_lifetime));
      CHECK(is_valid_key_size(r.crypto_method, r.key_size));
      CHECK((r.crypto_method == CryptoMethod::kEcc || r.crypto_method == CryptoMethod::kFalcon));
    }
  }

  TEST_CASE("a starving class raises GenerationError naming it") {
    ProfileTable only_pq;
    for (auto& p : only_pq) p = {{1, 5}, {1, 5}, {1, 5}, {1, 30}, {CryptoMethod::kFalcon}};
    GeneratorConfig cfg;
    cfg.records_per_class = 5;
    cfg.max_attempts = 2000;
    try {
      generate_dataset(cfg, RiskConfig::defaults(), only_pq);
      FAIL("expected GenerationError");
    } catch (const GenerationError& e) {
      CHECK(std::string(e.what()).find("monitor_and_prepare") != std::string::npos);
    }
  }

  TEST_CASE("invalid configuration is rejected") {
    GeneratorConfig cfg;
    cfg.label_noise_rate = 0.5;
    CHECK_THROWS_AS(generate_dataset(cfg), InputError);
    cfg = {};
    cfg.records_per_class = 0;
    CHECK_THROWS_AS(generate_dataset(cfg), InputError);
  }

  TEST_CASE("profile JSON round-trips and is checked") {
    const auto doc = profiles_to_json(default_profiles());
    const auto back = profiles_from_json(doc);
    CHECK(profiles_to_json(back) == doc);
    auto bad = doc;
    bad["iot_device"]["data_sensitivity"] = {0, 2};
    try {
      profiles_from_json(bad);
      FAIL("expected InputError");
    } catch (const InputError& e) {
      CHECK(e.field() == "data_sensitivity");
    }
    auto missing = doc;
    missing.erase("e_commerce");
    CHECK_THROWS_AS(profiles_from_json(missing), InputError);
    auto unknown = doc;
    unknown["iot_device"]["crypto_methods"] = {"ROT13"};
    CHECK_THROWS_AS(profiles_from_json(unknown), InputError);
  }

  TEST_CASE("validator rejects empty or unlabeled input") {
    CHECK_THROWS_AS(validate_consistency({}), InputError);
    Dataset d(1);
    CHECK_THROWS_AS(validate_consistency(d), InputError);
  }
}

TEST_SUITE("record_io") {
  TEST_CASE("CSV and JSONL round-trip a generated corpus") {
    GeneratorConfig cfg;
    cfg.records_per_class = 20;
    const auto d = generate_dataset(cfg).records;
    std::stringstream csv;
    write_csv(csv, d);
    CHECK(read_csv(csv) == d);
    std::stringstream jl;
    write_jsonl(jl, d);
    CHECK(read_jsonl(jl) == d);
  }

  TEST_CASE("CSV header follows the record field order") {
    std::stringstream out;
    write_csv(out, {});
    std::string header;
    std::getline(out, header);
    CHECK(header ==
          "system_type,security_lifetime,crypto_method,key_size,system_complexity,"
          "integration_complexity,data_sensitivity,recommended_strategy");
  }

  TEST_CASE("record_from_json names bad fields") {
    SystemRecord r;
    auto j = record_to_json(r);
    CHECK_FALSE(j.contains("recommended_strategy"));
    CHECK(record_from_json(j) == r);
    j["crypto_method"] = "ENIGMA";
    try {
      record_from_json(j);
      FAIL("expected InputError");
    } catch (const InputError& e) {
      CHECK(e.field() == "crypto_method");
    }
    auto k = record_to_json(r);
    k.erase("key_size");
    try {
      record_from_json(k);
      FAIL("expected InputError");
    } catch (const InputError& e) {
      CHECK(e.field() == "key_size");
    }
  }

  TEST_CASE("missing files name the path") {
    try {
      load_dataset("/nonexistent/missing.csv");
      FAIL("expected InputError");
    } catch (const InputError& e) {
      CHECK(std::string(e.what()).find("missing.csv") != std::string::npos);
    }
  }
}
