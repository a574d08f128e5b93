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

#include "pqmigrate/domain.hpp"

#include <algorithm>
#include <array>
#include <string>

#include "pqmigrate/error.hpp"

namespace pqmigrate {
namespace {

constexpr std::array<std::string_view, kNumMethods> kMethodNames = {
    "RSA",
    "ECC",
    "DH",
    "TRIPLE_DES",
    "AES",
    "CRYSTALS_KYBER",
    "CRYSTALS_DILITHIUM",
    "FALCON",
    "SPHINCS_PLUS",
    "HYBRID_RSA_PQC",
    "HYBRID_ECC_PQC",
};

constexpr std::array<std::string_view, 4> kQuantumClassNames = {
    "Vulnerable", "Neutral", "Hybrid", "Resistant"};

constexpr std::array<std::string_view, kNumStrategies> kStrategyNames = {
    "no_action_needed", "monitor_and_prepare", "scheduled_transition",
    "immediate_hybrid", "immediate_replacement"};

constexpr std::array<std::string_view, kNumSystemTypes> kSystemTypeNames = {
    "payment_processing",
    "secure_messaging",
    "certificate_authority",
    "healthcare_records",
    "military_communications",
    "government_infrastructure",
    "internet_banking",
    "e_commerce",
    "cloud_service",
    "iot_device",
    "embedded_system",
    "weather_forecasting",
    "wireless_network",
};

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(const std::array<std::string_view, N>& names,
                           std::string_view name) {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) return std::nullopt;
  return static_cast<Enum>(it - names.begin());
}

constexpr std::array<int, 4> kRsaKeys = {1024, 2048, 3072, 4096};
constexpr std::array<int, 5> kEccKeys = {160, 224, 256, 384, 521};
constexpr std::array<int, 2> kTripleDesKeys = {112, 168};
constexpr std::array<int, 3> kAesKeys = {128, 192, 256};
constexpr std::array<int, 3> kKyberKeys = {512, 768, 1024};
constexpr std::array<int, 3> kDilithiumLevels = {2, 3, 5};
constexpr std::array<int, 2> kFalconKeys = {512, 1024};
constexpr std::array<int, 3> kSphincsKeys = {128, 192, 256};
constexpr std::array<int, 3> kHybridRsaKeys = {2048, 3072, 4096};
constexpr std::array<int, 3> kHybridEccKeys = {256, 384, 521};

}  // namespace

std::string_view to_string(CryptoMethod method) {
  return kMethodNames[static_cast<std::size_t>(method)];
}
std::string_view to_string(QuantumClass qclass) {
  return kQuantumClassNames[static_cast<std::size_t>(qclass)];
}
std::string_view to_string(Strategy strategy) {
  return kStrategyNames[static_cast<std::size_t>(strategy)];
}
std::string_view to_string(SystemType type) {
  return kSystemTypeNames[static_cast<std::size_t>(type)];
}

std::optional<CryptoMethod> method_from_string(std::string_view name) {
  return lookup<CryptoMethod>(kMethodNames, name);
}
std::optional<QuantumClass> quantum_class_from_string(std::string_view name) {
  return lookup<QuantumClass>(kQuantumClassNames, name);
}
std::optional<Strategy> strategy_from_string(std::string_view name) {
  return lookup<Strategy>(kStrategyNames, name);
}
std::optional<SystemType> system_type_from_string(std::string_view name) {
  return lookup<SystemType>(kSystemTypeNames, name);
}

QuantumClass quantum_class(CryptoMethod method) {
  switch (method) {
    case CryptoMethod::kRsa:
    case CryptoMethod::kEcc:
    case CryptoMethod::kDh:
    case CryptoMethod::kTripleDes:
      return QuantumClass::kVulnerable;
    case CryptoMethod::kAes:
      return QuantumClass::kNeutral;
    case CryptoMethod::kHybridRsaPqc:
    case CryptoMethod::kHybridEccPqc:
      return QuantumClass::kHybrid;
    case CryptoMethod::kCrystalsKyber:
    case CryptoMethod::kCrystalsDilithium:
    case CryptoMethod::kFalcon:
    case CryptoMethod::kSphincsPlus:
      return QuantumClass::kResistant;
  }
  return QuantumClass::kVulnerable;
}

std::span<const int> valid_key_sizes(CryptoMethod method) {
  switch (method) {
    case CryptoMethod::kRsa:
    case CryptoMethod::kDh:
      return kRsaKeys;
    case CryptoMethod::kEcc:
      return kEccKeys;
    case CryptoMethod::kTripleDes:
      return kTripleDesKeys;
    case CryptoMethod::kAes:
      return kAesKeys;
    case CryptoMethod::kCrystalsKyber:
      return kKyberKeys;
    case CryptoMethod::kCrystalsDilithium:
      return kDilithiumLevels;
    case CryptoMethod::kFalcon:
      return kFalconKeys;
    case CryptoMethod::kSphincsPlus:
      return kSphincsKeys;
    case CryptoMethod::kHybridRsaPqc:
      return kHybridRsaKeys;
    case CryptoMethod::kHybridEccPqc:
      return kHybridEccKeys;
  }
  return {};
}

bool is_valid_key_size(CryptoMethod method, int key_size) {
  const auto sizes = valid_key_sizes(method);
  return std::find(sizes.begin(), sizes.end(), key_size) != sizes.end();
}

Strategy strategy_from_urgency(int urgency) {
  if (urgency < 1 || urgency > static_cast<int>(kNumStrategies)) {
    throw InputError("urgency index " + std::to_string(urgency) +
                     " out of [1,5]");
  }
  return static_cast<Strategy>(urgency - 1);
}

std::vector<Violation> validate_record(const SystemRecord& record) {
  std::vector<Violation> out;
  auto check_range = [&out](std::string_view field, int value, int lo,
                            int hi) {
    if (value < lo || value > hi) {
      out.push_back({std::string(field),
                     std::string(field) + " out of [" + std::to_string(lo) +
                         "," + std::to_string(hi) + "]"});
    }
  };
  check_range("security_lifetime", record.security_lifetime, kMinLifetime,
              kMaxLifetime);
  if (!is_valid_key_size(record.crypto_method, record.key_size)) {
    std::string allowed;
    for (int k : valid_key_sizes(record.crypto_method)) {
      if (!allowed.empty()) allowed += ',';
      allowed += std::to_string(k);
    }
    out.push_back({"key_size", "key_size not in {" + allowed + "} for " +
                                   std::string(to_string(record.crypto_method))});
  }
  check_range("system_complexity", record.system_complexity, kMinScale,
              kMaxScale);
  check_range("integration_complexity", record.integration_complexity,
              kMinScale, kMaxScale);
  check_range("data_sensitivity", record.data_sensitivity, kMinScale,
              kMaxScale);
  return out;
}

}  // namespace pqmigrate
