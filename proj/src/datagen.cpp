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

#include "pqmigrate/datagen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <numeric>
#include <string>
#include <thread>
#include <utility>

#include "pqmigrate/error.hpp"

namespace pqmigrate {
namespace {

// Substream numbering under the master seed.
constexpr std::uint64_t kShuffleStream = 0;
constexpr std::uint64_t kBucketStreamBase = 1;
constexpr std::uint64_t kNoiseStream = 100;

int draw(Rng& rng, IntRange range) { return rng.uniform_int(range.lo, range.hi); }

}  // namespace

void GeneratorConfig::validate() const {
  if (records_per_class < 1) {
    throw InputError("records_per_class must be >= 1", "records_per_class");
  }
  if (!(label_noise_rate >= 0.0 && label_noise_rate <= 0.05)) {
    throw InputError("label_noise_rate must be within [0, 0.05]",
                     "label_noise_rate");
  }
  if (max_attempts == 0) {
    throw InputError("max_attempts must be >= 1", "max_attempts");
  }
}

SystemRecord sample_record(SystemType type, const DomainConstraint& c, Rng& rng) {
  SystemRecord r;
  r.system_type = type;
  r.crypto_method = rng.pick(std::span<const CryptoMethod>(c.allowed_methods));
  r.key_size = rng.pick(valid_key_sizes(r.crypto_method));
  r.security_lifetime = draw(rng, c.lifetime);
  r.system_complexity = draw(rng, c.system_complexity);
  r.integration_complexity = draw(rng, c.integration_complexity);
  r.data_sensitivity = draw(rng, c.sensitivity);
  return r;
}

GeneratedDataset generate_dataset(const GeneratorConfig& config,
                                  const RiskConfig& risk,
                                  const ProfileTable& profiles) {
  config.validate();
  for (auto type : kAllSystemTypes) {
    const auto problems = validate_profile(profiles[static_cast<std::size_t>(type)]);
    if (!problems.empty()) {
      throw InputError("profile " + std::string(to_string(type)) + ": " +
                           problems.front().message,
                       problems.front().field);
    }
  }
  const auto per_class = static_cast<std::size_t>(config.records_per_class);

  std::array<Dataset, kNumStrategies> buckets;
  std::array<std::exception_ptr, kNumStrategies> failures;
  {
    std::vector<std::jthread> workers;
    for (std::size_t c = 0; c < kNumStrategies; ++c) {
      workers.emplace_back([&, c] {
        try {
          const auto target = static_cast<Strategy>(c);
          Rng rng = Rng::derived(config.seed, kBucketStreamBase + c);
          Dataset& bucket = buckets[c];
          bucket.reserve(per_class);
          std::uint64_t attempts = 0;
          while (bucket.size() < per_class) {
            if (attempts++ >= config.max_attempts) {
              throw GenerationError(
                  "could not fill class " + std::string(to_string(target)) +
                  " after " + std::to_string(config.max_attempts) +
                  " attempts (" + std::to_string(bucket.size()) + "/" +
                  std::to_string(per_class) + " records)");
            }
            const SystemType type =
                kAllSystemTypes[rng.uniform_index(kNumSystemTypes)];
            SystemRecord r =
                sample_record(type, profiles[static_cast<std::size_t>(type)], rng);
            if (label_strategy(r, risk) == target) {
              r.recommended_strategy = target;
              bucket.push_back(r);
            }
          }
        } catch (...) {
          failures[c] = std::current_exception();
        }
      });
    }
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  GeneratedDataset out;
  out.records.reserve(per_class * kNumStrategies);
  for (auto& b : buckets) {
    out.records.insert(out.records.end(), b.begin(), b.end());
  }
  Rng shuffle_rng = Rng::derived(config.seed, kShuffleStream);
  shuffle_rng.shuffle(std::span<SystemRecord>(out.records));

  out.clean_labels.reserve(out.records.size());
  for (const auto& r : out.records) out.clean_labels.push_back(*r.recommended_strategy);

  // Exactly round(rate * total) labels move to a uniformly chosen other class.
  const std::size_t total = out.records.size();
  const auto n_flip = static_cast<std::size_t>(
      std::llround(config.label_noise_rate * static_cast<double>(total)));
  if (n_flip > 0) {
    Rng noise_rng = Rng::derived(config.seed, kNoiseStream);
    std::vector<std::size_t> order(total);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = 0; i < n_flip; ++i) {
      const auto j = i + static_cast<std::size_t>(noise_rng.uniform_index(total - i));
      std::swap(order[i], order[j]);
      auto& label = *out.records[order[i]].recommended_strategy;
      auto shift = 1 + noise_rng.uniform_index(kNumStrategies - 1);
      label = static_cast<Strategy>((index_of(label) + shift) % kNumStrategies);
    }
    out.flipped.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_flip));
    std::sort(out.flipped.begin(), out.flipped.end());
  }
  return out;
}

namespace {

constexpr std::array<std::pair<const char*, IntRange DomainConstraint::*>, 4> kRangeFields = {{
    {"data_sensitivity", &DomainConstraint::sensitivity},
    {"system_complexity", &DomainConstraint::system_complexity},
    {"integration_complexity", &DomainConstraint::integration_complexity},
    {"security_lifetime", &DomainConstraint::lifetime},
}};

}  // namespace

ProfileTable profiles_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InputError("profiles must be a JSON object");
  ProfileTable table;
  for (auto type : kAllSystemTypes) {
    const std::string name(to_string(type));
    if (!j.contains(name)) throw InputError("missing profile for " + name, name);
    const auto& p = j.at(name);
    DomainConstraint c;
    try {
      for (const auto& [field, member] : kRangeFields) {
        const auto range = p.at(field).get<std::array<int, 2>>();
        c.*member = {range[0], range[1]};
      }
      for (const auto& m : p.at("crypto_methods")) {
        const auto method = method_from_string(m.get<std::string>());
        if (!method) {
          throw InputError(name + ": unknown crypto_method '" + m.get<std::string>() + "'",
                           "crypto_methods");
        }
        c.allowed_methods.push_back(*method);
      }
    } catch (const nlohmann::json::exception& e) {
      throw InputError(name + ": " + e.what(), name);
    }
    const auto problems = validate_profile(c);
    if (!problems.empty()) {
      throw InputError(name + ": " + problems.front().message, problems.front().field);
    }
    table[static_cast<std::size_t>(type)] = std::move(c);
  }
  for (const auto& [key, value] : j.items()) {
    if (!system_type_from_string(key)) throw InputError("unknown system_type '" + key + "'", key);
  }
  return table;
}

nlohmann::json profiles_to_json(const ProfileTable& profiles) {
  nlohmann::json out = nlohmann::json::object();
  for (auto type : kAllSystemTypes) {
    const auto& c = profiles[static_cast<std::size_t>(type)];
    nlohmann::json p;
    for (const auto& [field, member] : kRangeFields) {
      p[field] = {(c.*member).lo, (c.*member).hi};
    }
    p["crypto_methods"] = nlohmann::json::array();
    for (auto m : c.allowed_methods) p["crypto_methods"].push_back(to_string(m));
    out[std::string(to_string(type))] = std::move(p);
  }
  return out;
}

nlohmann::json ValidationReport::to_json() const {
  nlohmann::json v = nlohmann::json::array();
  for (const auto& x : violations) {
    v.push_back({{"index", x.index},
                 {"rule", x.rule_id},
                 {"expected", to_string(x.expected)},
                 {"actual", to_string(x.actual)}});
  }
  return {{"total", total},
          {"consistent", consistent},
          {"consistency_ratio", consistency_ratio},
          {"violations", v}};
}

ValidationReport validate_consistency(const Dataset& dataset,
                                      const RiskConfig& risk) {
  if (dataset.empty()) throw InputError("cannot validate an empty dataset");
  ValidationReport report;
  report.total = dataset.size();
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& r = dataset[i];
    if (!r.recommended_strategy) {
      throw InputError("record " + std::to_string(i) + " has no label",
                       "recommended_strategy");
    }
    const LabelOutcome expected = classify(r, risk);
    if (expected.strategy == *r.recommended_strategy) {
      ++report.consistent;
    } else {
      report.violations.push_back(
          {i, expected.rule_id, expected.strategy, *r.recommended_strategy});
    }
  }
  report.consistency_ratio = static_cast<double>(report.consistent) /
                             static_cast<double>(report.total);
  return report;
}

}  // namespace pqmigrate
