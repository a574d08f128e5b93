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

#include "pqmigrate/risk.hpp"

#include <array>
#include <cmath>
#include <string>
#include <utility>

#include "pqmigrate/error.hpp"

namespace pqmigrate {
namespace {

using nlohmann::json;

constexpr const char* kDefaultConfig = R"json({
  "risk_params": {
    "sensitivity_divisor": 5.0,
    "threat_midpoint_years": 15.0,
    "threat_scale_years": 3.0,
    "lifetime_threshold_years": 10,
    "vulnerability_table": [
      {"method": "RSA", "max_key_size": 1024, "value": 0.95},
      {"method": "RSA", "max_key_size": 2048, "value": 0.85},
      {"method": "RSA", "value": 0.75},
      {"method": "DH", "max_key_size": 1024, "value": 0.95},
      {"method": "DH", "max_key_size": 2048, "value": 0.85},
      {"method": "DH", "value": 0.75},
      {"method": "ECC", "max_key_size": 160, "value": 0.95},
      {"method": "ECC", "max_key_size": 256, "value": 0.85},
      {"method": "ECC", "value": 0.75},
      {"method": "TRIPLE_DES", "value": 0.95},
      {"method": "AES", "max_key_size": 255, "value": 0.40},
      {"method": "AES", "value": 0.10},
      {"method": "HYBRID_RSA_PQC", "value": 0.30},
      {"method": "HYBRID_ECC_PQC", "value": 0.30},
      {"method": "CRYSTALS_KYBER", "value": 0.05},
      {"method": "CRYSTALS_DILITHIUM", "value": 0.05},
      {"method": "FALCON", "value": 0.05},
      {"method": "SPHINCS_PLUS", "value": 0.05}
    ]
  },
  "rules": [
    {"id": "R1", "when": {"class_in": ["Resistant"]}, "then": "no_action_needed"},
    {"id": "R2", "when": {"class_in": ["Hybrid"]}, "then": "monitor_and_prepare"},
    {"id": "R3",
     "when": {"any": [
       {"method_in": ["TRIPLE_DES"]},
       {"all": [{"method_in": ["RSA", "DH"]}, {"field": "key_size", "op": "<=", "value": 1024}]},
       {"all": [{"method_in": ["ECC"]}, {"field": "key_size", "op": "<=", "value": 160}]}
     ]},
     "then": "immediate_replacement"},
    {"id": "R4", "when": {"class_in": ["Neutral"]},
     "then": {"if": {"field": "key_size", "op": ">=", "value": 256},
              "then": "no_action_needed",
              "else": {"if": {"field": "security_lifetime", "op": ">", "value": "lifetime_threshold"},
                       "then": "scheduled_transition",
                       "else": "monitor_and_prepare"}}},
    {"id": "R5",
     "when": {"all": [
       {"class_in": ["Vulnerable"]},
       {"any": [
         {"all": [{"method_in": ["RSA", "DH"]}, {"field": "key_size", "op": "<=", "value": 2048}]},
         {"all": [{"method_in": ["ECC"]}, {"field": "key_size", "op": "<=", "value": 256}]}
       ]},
       {"any": [
         {"field": "integration_complexity", "op": ">=", "value": 4},
         {"field": "system_complexity", "op": ">=", "value": 3}
       ]}
     ]},
     "then": "immediate_hybrid"},
    {"id": "R6",
     "when": {"all": [
       {"class_in": ["Vulnerable"]},
       {"field": "data_sensitivity", "op": ">=", "value": 4},
       {"field": "security_lifetime", "op": ">", "value": "lifetime_threshold"}
     ]},
     "then": {"if": {"any": [
                {"field": "integration_complexity", "op": ">=", "value": 4},
                {"field": "system_complexity", "op": ">=", "value": 3}
              ]},
              "then": "immediate_hybrid",
              "else": "immediate_replacement"}},
    {"id": "R7",
     "when": {"all": [
       {"class_in": ["Vulnerable"]},
       {"field": "security_lifetime", "op": ">", "value": "lifetime_threshold"}
     ]},
     "then": "scheduled_transition"},
    {"id": "R8", "when": {"class_in": ["Vulnerable"]},
     "then": {"if": {"field": "data_sensitivity", "op": ">=", "value": 3},
              "then": "scheduled_transition",
              "else": "monitor_and_prepare"}}
  ]
})json";

constexpr std::array<std::pair<RecordField, std::string_view>, 5> kFieldNames = {{
    {RecordField::kSecurityLifetime, "security_lifetime"},
    {RecordField::kKeySize, "key_size"},
    {RecordField::kSystemComplexity, "system_complexity"},
    {RecordField::kIntegrationComplexity, "integration_complexity"},
    {RecordField::kDataSensitivity, "data_sensitivity"},
}};

constexpr std::array<std::pair<Comparison, std::string_view>, 5> kOps = {{
    {Comparison::kLess, "<"},
    {Comparison::kLessEqual, "<="},
    {Comparison::kGreater, ">"},
    {Comparison::kGreaterEqual, ">="},
    {Comparison::kEqual, "=="},
}};

constexpr std::string_view kThresholdRef = "lifetime_threshold";

int field_value(const SystemRecord& r, RecordField f) {
  switch (f) {
    case RecordField::kSecurityLifetime:
      return r.security_lifetime;
    case RecordField::kKeySize:
      return r.key_size;
    case RecordField::kSystemComplexity:
      return r.system_complexity;
    case RecordField::kIntegrationComplexity:
      return r.integration_complexity;
    case RecordField::kDataSensitivity:
      return r.data_sensitivity;
  }
  return 0;
}

bool compare(int lhs, Comparison op, int rhs) {
  switch (op) {
    case Comparison::kLess:
      return lhs < rhs;
    case Comparison::kLessEqual:
      return lhs <= rhs;
    case Comparison::kGreater:
      return lhs > rhs;
    case Comparison::kGreaterEqual:
      return lhs >= rhs;
    case Comparison::kEqual:
      return lhs == rhs;
  }
  return false;
}

[[noreturn]] void config_error(const std::string& what) {
  throw InputError("risk config: " + what);
}

CryptoMethod parse_method(const json& j) {
  if (!j.is_string()) config_error("method must be a string");
  auto m = method_from_string(j.get<std::string>());
  if (!m) config_error("unknown crypto method '" + j.get<std::string>() + "'");
  return *m;
}

ConditionPtr parse_condition(const json& j);

std::vector<ConditionPtr> parse_terms(const json& j) {
  if (!j.is_array() || j.empty()) config_error("all/any needs a nonempty list");
  std::vector<ConditionPtr> terms;
  for (const auto& t : j) terms.push_back(parse_condition(t));
  return terms;
}

ConditionPtr parse_condition(const json& j) {
  if (!j.is_object() || j.size() == 0) config_error("condition must be an object");
  Condition c;
  if (j.contains("all")) {
    c.node = Condition::All{parse_terms(j.at("all"))};
  } else if (j.contains("any")) {
    c.node = Condition::Any{parse_terms(j.at("any"))};
  } else if (j.contains("not")) {
    c.node = Condition::Not{parse_condition(j.at("not"))};
  } else if (j.contains("method_in")) {
    Condition::MethodIn in;
    for (const auto& m : j.at("method_in")) in.methods.push_back(parse_method(m));
    c.node = std::move(in);
  } else if (j.contains("class_in")) {
    Condition::ClassIn in;
    for (const auto& q : j.at("class_in")) {
      auto qc = q.is_string() ? quantum_class_from_string(q.get<std::string>())
                              : std::nullopt;
      if (!qc) config_error("unknown quantum class " + q.dump());
      in.classes.push_back(*qc);
    }
    c.node = std::move(in);
  } else if (j.contains("field")) {
    Condition::Compare cmp;
    const auto fname = j.at("field").get<std::string>();
    bool found = false;
    for (const auto& [f, n] : kFieldNames) {
      if (n == fname) {
        cmp.field = f;
        found = true;
      }
    }
    if (!found) config_error("unknown field '" + fname + "'");
    const auto op = j.value("op", std::string{});
    found = false;
    for (const auto& [o, n] : kOps) {
      if (n == op) {
        cmp.op = o;
        found = true;
      }
    }
    if (!found) config_error("unknown comparison '" + op + "'");
    const auto& v = j.at("value");
    if (v.is_string() && v.get<std::string>() == kThresholdRef) {
      cmp.use_lifetime_threshold = true;
    } else if (v.is_number_integer()) {
      cmp.value = v.get<int>();
    } else {
      config_error("comparison value must be an integer or \"lifetime_threshold\"");
    }
    c.node = cmp;
  } else {
    config_error("unrecognized condition " + j.dump());
  }
  return std::make_shared<const Condition>(std::move(c));
}

DecisionPtr parse_decision(const json& j) {
  Decision d;
  if (j.is_string()) {
    auto s = strategy_from_string(j.get<std::string>());
    if (!s) config_error("unknown strategy '" + j.get<std::string>() + "'");
    d.node = *s;
  } else if (j.is_object() && j.contains("if")) {
    if (!j.contains("then") || !j.contains("else")) {
      config_error("if-decision needs both then and else");
    }
    d.node = Decision::Branch{parse_condition(j.at("if")),
                              parse_decision(j.at("then")),
                              parse_decision(j.at("else"))};
  } else {
    config_error("decision must be a strategy name or an if/then/else object");
  }
  return std::make_shared<const Decision>(std::move(d));
}

json condition_to_json(const Condition& c) {
  return std::visit(
      [](const auto& n) -> json {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Condition::All> ||
                      std::is_same_v<T, Condition::Any>) {
          json terms = json::array();
          for (const auto& t : n.terms) terms.push_back(condition_to_json(*t));
          return {{std::is_same_v<T, Condition::All> ? "all" : "any", terms}};
        } else if constexpr (std::is_same_v<T, Condition::Not>) {
          return {{"not", condition_to_json(*n.term)}};
        } else if constexpr (std::is_same_v<T, Condition::MethodIn>) {
          json ms = json::array();
          for (auto m : n.methods) ms.push_back(to_string(m));
          return {{"method_in", ms}};
        } else if constexpr (std::is_same_v<T, Condition::ClassIn>) {
          json qs = json::array();
          for (auto q : n.classes) qs.push_back(to_string(q));
          return {{"class_in", qs}};
        } else {
          json out;
          for (const auto& [f, name] : kFieldNames) {
            if (f == n.field) out["field"] = name;
          }
          for (const auto& [o, name] : kOps) {
            if (o == n.op) out["op"] = name;
          }
          if (n.use_lifetime_threshold) {
            out["value"] = kThresholdRef;
          } else {
            out["value"] = n.value;
          }
          return out;
        }
      },
      c.node);
}

json decision_to_json(const Decision& d) {
  if (const auto* s = std::get_if<Strategy>(&d.node)) return to_string(*s);
  const auto& b = std::get<Decision::Branch>(d.node);
  return {{"if", condition_to_json(*b.when)},
          {"then", decision_to_json(*b.then)},
          {"else", decision_to_json(*b.otherwise)}};
}

Strategy decide(const Decision& d, const SystemRecord& record,
                const RiskParams& params) {
  const Decision* cur = &d;
  while (const auto* b = std::get_if<Decision::Branch>(&cur->node)) {
    cur = evaluate(*b->when, record, params) ? b->then.get() : b->otherwise.get();
  }
  return std::get<Strategy>(cur->node);
}

}  // namespace

const char* default_risk_config_json() { return kDefaultConfig; }

void RiskParams::validate() const {
  for (const auto& band : vulnerability_table) {
    if (!(band.value >= 0.0 && band.value <= 1.0)) {
      config_error("vulnerability value for " +
                   std::string(to_string(band.method)) + " outside [0,1]");
    }
  }
  for (auto m : kAllMethods) {
    for (int k : valid_key_sizes(m)) {
      bool covered = false;
      for (const auto& band : vulnerability_table) {
        if (band.method == m && (!band.max_key_size || k <= *band.max_key_size)) {
          covered = true;
          break;
        }
      }
      if (!covered) {
        config_error("vulnerability table has no entry for " +
                     std::string(to_string(m)) + "-" + std::to_string(k));
      }
    }
  }
  if (!(sensitivity_divisor > 0.0)) config_error("sensitivity_divisor must be > 0");
  if (!(threat_scale_years > 0.0)) config_error("threat_scale_years must be > 0");
  if (lifetime_threshold_years < 1) config_error("lifetime_threshold_years must be >= 1");
}

RiskConfig RiskConfig::from_json(const json& doc) {
  RiskConfig cfg;
  try {
    const auto& p = doc.at("risk_params");
    cfg.params.sensitivity_divisor = p.at("sensitivity_divisor").get<double>();
    cfg.params.threat_midpoint_years = p.at("threat_midpoint_years").get<double>();
    cfg.params.threat_scale_years = p.at("threat_scale_years").get<double>();
    cfg.params.lifetime_threshold_years = p.at("lifetime_threshold_years").get<int>();
    for (const auto& row : p.at("vulnerability_table")) {
      VulnerabilityBand band;
      band.method = parse_method(row.at("method"));
      if (row.contains("max_key_size")) band.max_key_size = row.at("max_key_size").get<int>();
      band.value = row.at("value").get<double>();
      cfg.params.vulnerability_table.push_back(band);
    }
    for (const auto& r : doc.at("rules")) {
      LabelRule rule;
      rule.id = r.at("id").get<std::string>();
      rule.when = parse_condition(r.at("when"));
      rule.decide = parse_decision(r.at("then"));
      cfg.rules.rules.push_back(std::move(rule));
    }
  } catch (const json::exception& e) {
    config_error(e.what());
  }
  if (cfg.rules.rules.empty()) config_error("rule table is empty");
  cfg.params.validate();
  return cfg;
}

json RiskConfig::to_json() const {
  json table = json::array();
  for (const auto& band : params.vulnerability_table) {
    json row = {{"method", to_string(band.method)}};
    if (band.max_key_size) row["max_key_size"] = *band.max_key_size;
    row["value"] = band.value;
    table.push_back(std::move(row));
  }
  json rules_json = json::array();
  for (const auto& r : rules.rules) {
    rules_json.push_back({{"id", r.id},
                          {"when", condition_to_json(*r.when)},
                          {"then", decision_to_json(*r.decide)}});
  }
  return {{"risk_params",
           {{"sensitivity_divisor", params.sensitivity_divisor},
            {"threat_midpoint_years", params.threat_midpoint_years},
            {"threat_scale_years", params.threat_scale_years},
            {"lifetime_threshold_years", params.lifetime_threshold_years},
            {"vulnerability_table", table}}},
          {"rules", rules_json}};
}

const RiskConfig& RiskConfig::defaults() {
  static const RiskConfig config = from_json(json::parse(kDefaultConfig));
  return config;
}

double vulnerability(const RiskParams& params, CryptoMethod method,
                     int key_size) {
  if (!is_valid_key_size(method, key_size)) {
    throw InputError("key_size " + std::to_string(key_size) +
                         " is not valid for " + std::string(to_string(method)),
                     "key_size");
  }
  for (const auto& band : params.vulnerability_table) {
    if (band.method == method &&
        (!band.max_key_size || key_size <= *band.max_key_size)) {
      return band.value;
    }
  }
  throw InputError("no vulnerability entry for " +
                       std::string(to_string(method)) + "-" +
                       std::to_string(key_size),
                   "crypto_method");
}

double sensitivity_scale(const RiskParams& params, int data_sensitivity) {
  if (data_sensitivity < kMinScale || data_sensitivity > kMaxScale) {
    throw InputError("data_sensitivity out of [1,5]", "data_sensitivity");
  }
  return data_sensitivity / params.sensitivity_divisor;
}

double threat_probability(const RiskParams& params, double years) {
  if (!(years >= 0.0)) {
    throw InputError("threat horizon must be >= 0 years", "horizon");
  }
  return 1.0 / (1.0 + std::exp(-(years - params.threat_midpoint_years) /
                               params.threat_scale_years));
}

RiskScore risk(const RiskParams& params, const SystemRecord& record,
               double horizon_years) {
  RiskScore score;
  score.v = vulnerability(params, record.crypto_method, record.key_size);
  score.s = sensitivity_scale(params, record.data_sensitivity);
  score.p = threat_probability(params, horizon_years);
  score.r = score.v * score.s * score.p;
  return score;
}

double vulnerability(CryptoMethod method, int key_size) {
  return vulnerability(RiskConfig::defaults().params, method, key_size);
}
double sensitivity_scale(int data_sensitivity) {
  return sensitivity_scale(RiskConfig::defaults().params, data_sensitivity);
}
double threat_probability(double years) {
  return threat_probability(RiskConfig::defaults().params, years);
}
RiskScore risk(const SystemRecord& record, double horizon_years) {
  return risk(RiskConfig::defaults().params, record, horizon_years);
}

bool evaluate(const Condition& condition, const SystemRecord& record,
              const RiskParams& params) {
  return std::visit(
      [&](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Condition::All>) {
          for (const auto& t : n.terms) {
            if (!evaluate(*t, record, params)) return false;
          }
          return true;
        } else if constexpr (std::is_same_v<T, Condition::Any>) {
          for (const auto& t : n.terms) {
            if (evaluate(*t, record, params)) return true;
          }
          return false;
        } else if constexpr (std::is_same_v<T, Condition::Not>) {
          return !evaluate(*n.term, record, params);
        } else if constexpr (std::is_same_v<T, Condition::MethodIn>) {
          for (auto m : n.methods) {
            if (m == record.crypto_method) return true;
          }
          return false;
        } else if constexpr (std::is_same_v<T, Condition::ClassIn>) {
          const auto q = quantum_class(record.crypto_method);
          for (auto c : n.classes) {
            if (c == q) return true;
          }
          return false;
        } else {
          const int rhs = n.use_lifetime_threshold
                              ? params.lifetime_threshold_years
                              : n.value;
          return compare(field_value(record, n.field), n.op, rhs);
        }
      },
      condition.node);
}

LabelOutcome classify(const SystemRecord& record, const RiskConfig& config) {
  if (const auto v = validate_record(record); !v.empty()) {
    throw InputError(v.front().message, v.front().field);
  }
  for (const auto& rule : config.rules.rules) {
    if (evaluate(*rule.when, record, config.params)) {
      return {decide(*rule.decide, record, config.params), rule.id};
    }
  }
  throw InputError("no labeling rule matches the record");
}

Strategy label_strategy(const SystemRecord& record, const RiskConfig& config) {
  return classify(record, config).strategy;
}

Strategy label_strategy(const SystemRecord& record) {
  return classify(record, RiskConfig::defaults()).strategy;
}

}  // namespace pqmigrate
