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

#include <string>

#include "pqmigrate/domain.hpp"

namespace pqmigrate {
namespace {

using M = CryptoMethod;

ProfileTable build_defaults() {
  ProfileTable t;
  auto set = [&t](SystemType type, IntRange sensitivity, IntRange lifetime,
                  IntRange system_complexity, IntRange integration_complexity,
                  std::vector<CryptoMethod> methods) {
    t[static_cast<std::size_t>(type)] = {sensitivity, system_complexity,
                                         integration_complexity, lifetime,
                                         std::move(methods)};
  };
  // type, sensitivity, lifetime, system complexity, integration complexity,
  // methods (a method listed twice is drawn twice as often)
  set(SystemType::kPaymentProcessing, {4, 4}, {8, 25}, {5, 5}, {3, 3},
      {M::kRsa, M::kTripleDes, M::kEcc, M::kAes, M::kCrystalsKyber, M::kHybridRsaPqc});
  set(SystemType::kSecureMessaging, {2, 3}, {3, 18}, {4, 5}, {4, 5},
      {M::kRsa, M::kDh, M::kAes, M::kHybridEccPqc, M::kCrystalsKyber});
  set(SystemType::kCertificateAuthority, {2, 4}, {10, 30}, {3, 5}, {5, 5},
      {M::kRsa, M::kRsa, M::kCrystalsKyber, M::kCrystalsDilithium, M::kFalcon,
       M::kSphincsPlus});
  set(SystemType::kHealthcareRecords, {5, 5}, {8, 30}, {1, 3}, {2, 4},
      {M::kRsa, M::kAes, M::kTripleDes, M::kCrystalsDilithium, M::kHybridRsaPqc});
  set(SystemType::kMilitaryCommunications, {4, 5}, {10, 30}, {3, 4}, {1, 5},
      {M::kRsa, M::kEcc, M::kDh, M::kFalcon, M::kCrystalsKyber});
  set(SystemType::kGovernmentInfrastructure, {1, 3}, {5, 20}, {1, 5}, {4, 5},
      {M::kRsa, M::kDh, M::kAes, M::kCrystalsDilithium, M::kSphincsPlus, M::kHybridRsaPqc,
       M::kHybridEccPqc});
  set(SystemType::kInternetBanking, {2, 3}, {3, 16}, {3, 4}, {4, 4},
      {M::kRsa, M::kDh, M::kAes, M::kCrystalsKyber, M::kHybridEccPqc});
  set(SystemType::kECommerce, {1, 3}, {1, 15}, {2, 3}, {4, 4},
      {M::kRsa, M::kAes, M::kHybridRsaPqc});
  set(SystemType::kCloudService, {1, 3}, {3, 15}, {2, 5}, {3, 3},
      {M::kRsa, M::kDh, M::kAes, M::kCrystalsKyber, M::kFalcon, M::kHybridEccPqc});
  set(SystemType::kIotDevice, {1, 3}, {1, 15}, {2, 2}, {1, 1},
      {M::kEcc, M::kEcc, M::kAes, M::kCrystalsKyber, M::kFalcon});
  set(SystemType::kEmbeddedSystem, {1, 3}, {5, 20}, {1, 1}, {3, 3},
      {M::kEcc, M::kEcc, M::kAes, M::kTripleDes});
  set(SystemType::kWeatherForecasting, {1, 2}, {6, 6}, {1, 1}, {1, 1},
      {M::kAes, M::kEcc, M::kCrystalsKyber, M::kSphincsPlus});
  set(SystemType::kWirelessNetwork, {1, 3}, {1, 12}, {1, 2}, {2, 3},
      {M::kEcc, M::kAes, M::kHybridEccPqc});
  return t;
}

void check_range(std::vector<Violation>& out, const char* field, IntRange r,
                 int lo, int hi) {
  if (r.empty() || r.lo < lo || r.hi > hi) {
    out.push_back({field, std::string(field) + " range must lie within [" +
                              std::to_string(lo) + "," + std::to_string(hi) +
                              "] with lo <= hi"});
  }
}

}  // namespace

const ProfileTable& default_profiles() {
  static const ProfileTable table = build_defaults();
  return table;
}

const DomainConstraint& constraint_profile(SystemType type) {
  return default_profiles()[static_cast<std::size_t>(type)];
}

std::vector<Violation> validate_profile(const DomainConstraint& p) {
  std::vector<Violation> out;
  check_range(out, "data_sensitivity", p.sensitivity, kMinScale, kMaxScale);
  check_range(out, "system_complexity", p.system_complexity, kMinScale, kMaxScale);
  check_range(out, "integration_complexity", p.integration_complexity, kMinScale, kMaxScale);
  check_range(out, "security_lifetime", p.lifetime, kMinLifetime, kMaxLifetime);
  if (p.allowed_methods.empty()) {
    out.push_back({"crypto_methods", "at least one crypto method must be allowed"});
  }
  return out;
}

}  // namespace pqmigrate
