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

#include <set>

#include "doctest.h"
#include "pqmigrate/domain.hpp"
#include "pqmigrate/error.hpp"
#include "support.hpp"

using namespace pqmigrate;

TEST_SUITE("domain") {
  TEST_CASE("strategy urgency mapping is a bijection") {
    std::set<int> seen;
    for (auto s : kAllStrategies) {
      const int u = urgency_index(s);
      CHECK(u >= 1);
      CHECK(u <= 5);
      CHECK(strategy_from_urgency(u) == s);
      CHECK(strategy_from_string(to_string(s)) == s);
      seen.insert(u);
    }
    CHECK(seen.size() == 5);
    CHECK(urgency_index(Strategy::kNoActionNeeded) == 1);
    CHECK(urgency_index(Strategy::kScheduledTransition) == 3);
    CHECK(urgency_index(Strategy::kImmediateReplacement) == 5);
    CHECK_THROWS_AS(strategy_from_urgency(0), InputError);
    CHECK_THROWS_AS(strategy_from_urgency(6), InputError);
  }

  TEST_CASE("names round-trip") {
    for (auto m : kAllMethods) CHECK(method_from_string(to_string(m)) == m);
    for (auto t : kAllSystemTypes) CHECK(system_type_from_string(to_string(t)) == t);
    CHECK_FALSE(method_from_string("rsa").has_value());
    CHECK_FALSE(system_type_from_string("toaster").has_value());
    CHECK(to_string(Strategy::kImmediateHybrid) == "immediate_hybrid");
  }

  TEST_CASE("quantum classes cover every method") {
    CHECK(quantum_class(CryptoMethod::kRsa) == QuantumClass::kVulnerable);
    CHECK(quantum_class(CryptoMethod::kTripleDes) == QuantumClass::kVulnerable);
    CHECK(quantum_class(CryptoMethod::kAes) == QuantumClass::kNeutral);
    CHECK(quantum_class(CryptoMethod::kHybridEccPqc) == QuantumClass::kHybrid);
    CHECK(quantum_class(CryptoMethod::kSphincsPlus) == QuantumClass::kResistant);
    for (auto m : kAllMethods) {
      CHECK(quantum_class_from_string(to_string(quantum_class(m))).has_value());
      CHECK_FALSE(valid_key_sizes(m).empty());
    }
  }

  TEST_CASE("validate_record accepts a plain RSA record") {
    SystemRecord r;
    r.crypto_method = CryptoMethod::kRsa;
    r.key_size = 2048;
    r.security_lifetime = 12;
    r.system_complexity = r.integration_complexity = r.data_sensitivity = 3;
    CHECK(validate_record(r).empty());
  }

  TEST_CASE("validate_record names the offending field and bound") {
    SystemRecord r;
    r.data_sensitivity = 6;
    auto v = validate_record(r);
    REQUIRE(v.size() == 1);
    CHECK(v[0].field == "data_sensitivity");
    CHECK(v[0].message == "data_sensitivity out of [1,5]");

    SystemRecord k;
    k.crypto_method = CryptoMethod::kCrystalsKyber;
    k.key_size = 2048;
    v = validate_record(k);
    REQUIRE(v.size() == 1);
    CHECK(v[0].field == "key_size");
    CHECK(v[0].message == "key_size not in {512,768,1024} for CRYSTALS_KYBER");

    SystemRecord l;
    l.security_lifetime = 31;
    l.system_complexity = 0;
    CHECK(validate_record(l).size() == 2);
  }

  TEST_CASE("every default profile is valid and carries the anchored ranges") {
    for (auto t : kAllSystemTypes) CHECK(validate_profile(constraint_profile(t)).empty());
    const auto& health = constraint_profile(SystemType::kHealthcareRecords);
    CHECK(health.sensitivity.lo >= 4);
    const auto& military = constraint_profile(SystemType::kMilitaryCommunications);
    CHECK(military.sensitivity.lo >= 4);
    CHECK(military.lifetime.lo >= 10);
    CHECK(constraint_profile(SystemType::kIotDevice).system_complexity.hi <= 3);
    CHECK(constraint_profile(SystemType::kEmbeddedSystem).integration_complexity.lo >= 3);
    CHECK(constraint_profile(SystemType::kCertificateAuthority).lifetime.lo >= 10);
    const auto& weather = constraint_profile(SystemType::kWeatherForecasting);
    CHECK(weather.sensitivity.hi <= 2);
    CHECK(weather.lifetime.hi <= 10);
    CHECK(constraint_profile(SystemType::kWirelessNetwork).sensitivity.hi <= 3);
    std::set<CryptoMethod> used;
    for (auto t : kAllSystemTypes) {
      for (auto m : constraint_profile(t).allowed_methods) used.insert(m);
    }
    CHECK(used.size() == kNumMethods);
  }

  TEST_CASE("validate_profile rejects out-of-range and empty profiles") {
    DomainConstraint p{{1, 6}, {1, 5}, {1, 5}, {1, 30}, {CryptoMethod::kAes}};
    auto v = validate_profile(p);
    REQUIRE(v.size() == 1);
    CHECK(v[0].field == "data_sensitivity");
    p.sensitivity = {3, 2};
    CHECK(validate_profile(p).size() == 1);
    p.sensitivity = {1, 5};
    p.allowed_methods.clear();
    CHECK(validate_profile(p).size() == 1);
  }
}
