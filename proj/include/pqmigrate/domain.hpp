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

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pqmigrate {

enum class CryptoMethod : std::uint8_t {
  kRsa,
  kEcc,
  kDh,
  kTripleDes,
  kAes,
  kCrystalsKyber,
  kCrystalsDilithium,
  kFalcon,
  kSphincsPlus,
  kHybridRsaPqc,
  kHybridEccPqc,
};

enum class QuantumClass : std::uint8_t {
  kVulnerable,
  kNeutral,
  kHybrid,
  kResistant,
};

// Declared in ascending urgency; the enumerator value is urgency - 1 and is
// the fixed column order of every matrix and table.
enum class Strategy : std::uint8_t {
  kNoActionNeeded,
  kMonitorAndPrepare,
  kScheduledTransition,
  kImmediateHybrid,
  kImmediateReplacement,
};

enum class SystemType : std::uint8_t {
  kPaymentProcessing,
  kSecureMessaging,
  kCertificateAuthority,
  kHealthcareRecords,
  kMilitaryCommunications,
  kGovernmentInfrastructure,
  kInternetBanking,
  kECommerce,
  kCloudService,
  kIotDevice,
  kEmbeddedSystem,
  kWeatherForecasting,
  kWirelessNetwork,
};

inline constexpr std::size_t kNumStrategies = 5;
inline constexpr std::size_t kNumMethods = 11;
inline constexpr std::size_t kNumSystemTypes = 13;

inline constexpr int kMinScale = 1;
inline constexpr int kMaxScale = 5;
inline constexpr int kMinLifetime = 1;
inline constexpr int kMaxLifetime = 30;

inline constexpr std::array<CryptoMethod, kNumMethods> kAllMethods = {
    CryptoMethod::kRsa,          CryptoMethod::kEcc,
    CryptoMethod::kDh,           CryptoMethod::kTripleDes,
    CryptoMethod::kAes,          CryptoMethod::kCrystalsKyber,
    CryptoMethod::kCrystalsDilithium, CryptoMethod::kFalcon,
    CryptoMethod::kSphincsPlus,  CryptoMethod::kHybridRsaPqc,
    CryptoMethod::kHybridEccPqc,
};

inline constexpr std::array<Strategy, kNumStrategies> kAllStrategies = {
    Strategy::kNoActionNeeded,      Strategy::kMonitorAndPrepare,
    Strategy::kScheduledTransition, Strategy::kImmediateHybrid,
    Strategy::kImmediateReplacement,
};

inline constexpr std::array<SystemType, kNumSystemTypes> kAllSystemTypes = {
    SystemType::kPaymentProcessing,       SystemType::kSecureMessaging,
    SystemType::kCertificateAuthority,    SystemType::kHealthcareRecords,
    SystemType::kMilitaryCommunications,  SystemType::kGovernmentInfrastructure,
    SystemType::kInternetBanking,         SystemType::kECommerce,
    SystemType::kCloudService,            SystemType::kIotDevice,
    SystemType::kEmbeddedSystem,          SystemType::kWeatherForecasting,
    SystemType::kWirelessNetwork,
};

// Canonical external names ("RSA", "CRYSTALS_KYBER", "immediate_hybrid",
// "payment_processing", "Vulnerable").
std::string_view to_string(CryptoMethod method);
std::string_view to_string(QuantumClass qclass);
std::string_view to_string(Strategy strategy);
std::string_view to_string(SystemType type);

std::optional<CryptoMethod> method_from_string(std::string_view name);
std::optional<QuantumClass> quantum_class_from_string(std::string_view name);
std::optional<Strategy> strategy_from_string(std::string_view name);
std::optional<SystemType> system_type_from_string(std::string_view name);

QuantumClass quantum_class(CryptoMethod method);

// Standard parameter sets. CRYSTALS_DILITHIUM carries its security level
// (2, 3, 5) in the key_size field.
std::span<const int> valid_key_sizes(CryptoMethod method);
bool is_valid_key_size(CryptoMethod method, int key_size);

constexpr int urgency_index(Strategy strategy) {
  return static_cast<int>(strategy) + 1;
}
// Throws InputError outside [1,5].
Strategy strategy_from_urgency(int urgency);

constexpr std::size_t index_of(Strategy s) { return static_cast<std::size_t>(s); }

struct IntRange {
  int lo = 0;
  int hi = 0;

  constexpr bool contains(int v) const { return lo <= v && v <= hi; }
  constexpr bool empty() const { return hi < lo; }
};

struct Violation {
  std::string field;
  std::string message;

  bool operator==(const Violation&) const = default;
};

// Attribute ranges a system type draws from during synthesis.
struct DomainConstraint {
  IntRange sensitivity;
  IntRange system_complexity;
  IntRange integration_complexity;
  IntRange lifetime;
  std::vector<CryptoMethod> allowed_methods;
};

using ProfileTable = std::array<DomainConstraint, kNumSystemTypes>;

// Built-in profiles, indexed by SystemType.
const ProfileTable& default_profiles();
const DomainConstraint& constraint_profile(SystemType type);

// Empty result means every range lies within the field bounds and at least
// one method is allowed.
std::vector<Violation> validate_profile(const DomainConstraint& profile);

struct SystemRecord {
  SystemType system_type = SystemType::kPaymentProcessing;
  int security_lifetime = 1;
  CryptoMethod crypto_method = CryptoMethod::kRsa;
  int key_size = 2048;
  int system_complexity = 1;
  int integration_complexity = 1;
  int data_sensitivity = 1;
  std::optional<Strategy> recommended_strategy;

  bool operator==(const SystemRecord&) const = default;
};

using Dataset = std::vector<SystemRecord>;

// Column order of the tabular formats.
inline constexpr std::array<std::string_view, 8> kRecordFields = {
    "system_type",       "security_lifetime",      "crypto_method",
    "key_size",          "system_complexity",      "integration_complexity",
    "data_sensitivity",  "recommended_strategy",
};

// Empty result means the record is valid.
std::vector<Violation> validate_record(const SystemRecord& record);

}  // namespace pqmigrate
