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

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "pqmigrate/domain.hpp"
#include "pqmigrate/risk.hpp"
#include "pqmigrate/rng.hpp"

namespace pqmigrate {

struct GeneratorConfig {
  int records_per_class = 241;
  double label_noise_rate = 0.006;
  std::uint64_t seed = 42;
  std::uint64_t max_attempts = 10'000'000;

  void validate() const;
};

// Draws every attribute uniformly from the profile; methods listed more than
// once are proportionally more likely.
SystemRecord sample_record(SystemType type, const DomainConstraint& profile, Rng& rng);

// {"<system_type>": {"data_sensitivity": [lo, hi], "system_complexity": ...,
// "integration_complexity": ..., "security_lifetime": ..., "crypto_methods":
// [...]}, ...}; every type must be present. Throws InputError naming the
// offending type and field.
ProfileTable profiles_from_json(const nlohmann::json& j);
nlohmann::json profiles_to_json(const ProfileTable& profiles);

struct GeneratedDataset {
  Dataset records;
  // Labels as produced by the rule table, before noise.
  std::vector<Strategy> clean_labels;
  // Indices whose label was replaced by noise, ascending.
  std::vector<std::size_t> flipped;
};

// Balanced corpus: exactly records_per_class records per strategy before
// noise, each bucket filled by rejection sampling on its own substream.
// Throws GenerationError naming the starving class.
GeneratedDataset generate_dataset(const GeneratorConfig& config,
                                  const RiskConfig& risk = RiskConfig::defaults(),
                                  const ProfileTable& profiles = default_profiles());

struct ValidationViolation {
  std::size_t index = 0;
  std::string rule_id;
  Strategy expected = Strategy::kNoActionNeeded;
  Strategy actual = Strategy::kNoActionNeeded;
};

struct ValidationReport {
  std::size_t total = 0;
  std::size_t consistent = 0;
  double consistency_ratio = 0.0;
  std::vector<ValidationViolation> violations;

  nlohmann::json to_json() const;
};

// A record is consistent iff its label equals the rule-table label. Throws
// InputError on an empty dataset or an unlabeled record.
ValidationReport validate_consistency(
    const Dataset& dataset, const RiskConfig& risk = RiskConfig::defaults());

}  // namespace pqmigrate
