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

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "pqmigrate/domain.hpp"

namespace pqmigrate {

// One row of the vulnerability table: applies to `method` for key sizes up
// to and including `max_key_size` (no bound when absent). Rows for the same
// method are searched in order.
struct VulnerabilityBand {
  CryptoMethod method = CryptoMethod::kRsa;
  std::optional<int> max_key_size;
  double value = 0.0;
};

struct RiskParams {
  std::vector<VulnerabilityBand> vulnerability_table;
  double sensitivity_divisor = 5.0;
  double threat_midpoint_years = 15.0;
  double threat_scale_years = 3.0;
  int lifetime_threshold_years = 10;

  // Throws InputError naming the first broken invariant.
  void validate() const;
};

struct RiskScore {
  double v = 0.0;
  double s = 0.0;
  double p = 0.0;
  double r = 0.0;
};

// Without an explicit RiskParams the embedded defaults are used.
double vulnerability(CryptoMethod method, int key_size);
double sensitivity_scale(int data_sensitivity);
double threat_probability(double years);
RiskScore risk(const SystemRecord& record, double horizon_years);

double vulnerability(const RiskParams& params, CryptoMethod method,
                     int key_size);
double sensitivity_scale(const RiskParams& params, int data_sensitivity);
double threat_probability(const RiskParams& params, double years);
RiskScore risk(const RiskParams& params, const SystemRecord& record,
               double horizon_years);

// ---------------------------------------------------------------------------
// Labeling rules.
//
// Rules are data: an ordered list of (id, condition, decision). The first
// rule whose condition holds decides the label. A decision is either a
// strategy or an if/then/else over further decisions.

enum class RecordField {
  kSecurityLifetime,
  kKeySize,
  kSystemComplexity,
  kIntegrationComplexity,
  kDataSensitivity,
};

enum class Comparison { kLess, kLessEqual, kGreater, kGreaterEqual, kEqual };

struct Condition;
using ConditionPtr = std::shared_ptr<const Condition>;

struct Condition {
  struct All {
    std::vector<ConditionPtr> terms;
  };
  struct Any {
    std::vector<ConditionPtr> terms;
  };
  struct Not {
    ConditionPtr term;
  };
  struct MethodIn {
    std::vector<CryptoMethod> methods;
  };
  struct ClassIn {
    std::vector<QuantumClass> classes;
  };
  // Compares a numeric field against a literal, or against the configured
  // lifetime threshold when `use_lifetime_threshold` is set.
  struct Compare {
    RecordField field = RecordField::kSecurityLifetime;
    Comparison op = Comparison::kGreater;
    int value = 0;
    bool use_lifetime_threshold = false;
  };

  std::variant<All, Any, Not, MethodIn, ClassIn, Compare> node;
};

struct Decision;
using DecisionPtr = std::shared_ptr<const Decision>;

struct Decision {
  struct Branch {
    ConditionPtr when;
    DecisionPtr then;
    DecisionPtr otherwise;
  };
  std::variant<Strategy, Branch> node;
};

struct LabelRule {
  std::string id;
  ConditionPtr when;
  DecisionPtr decide;
};

struct RuleTable {
  std::vector<LabelRule> rules;
};

// Parameters plus rules; loaded from one JSON document.
struct RiskConfig {
  RiskParams params;
  RuleTable rules;

  // Shared immutable instance of the embedded defaults.
  static const RiskConfig& defaults();
  static RiskConfig from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;
};

struct LabelOutcome {
  Strategy strategy = Strategy::kNoActionNeeded;
  std::string rule_id;
};

bool evaluate(const Condition& condition, const SystemRecord& record,
              const RiskParams& params);

// Throws InputError when no rule matches (impossible with the default
// table) or the record is invalid.
LabelOutcome classify(const SystemRecord& record, const RiskConfig& config);

Strategy label_strategy(const SystemRecord& record, const RiskConfig& config);
Strategy label_strategy(const SystemRecord& record);

// The embedded default configuration document.
const char* default_risk_config_json();

}  // namespace pqmigrate
