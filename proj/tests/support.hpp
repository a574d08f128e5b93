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

#include <cstdint>
#include <string>
#include <vector>

#include "pqmigrate/advisor.hpp"
#include "pqmigrate/datagen.hpp"
#include "pqmigrate/domain.hpp"
#include "pqmigrate/features.hpp"
#include "pqmigrate/rng.hpp"

namespace pqmigrate::testing {

// A valid record with every field drawn uniformly from its full domain.
inline SystemRecord fuzz_record(Rng& rng) {
  SystemRecord r;
  r.system_type = kAllSystemTypes[rng.uniform_index(kNumSystemTypes)];
  r.crypto_method = kAllMethods[rng.uniform_index(kNumMethods)];
  r.key_size = rng.pick(valid_key_sizes(r.crypto_method));
  r.security_lifetime = rng.uniform_int(kMinLifetime, kMaxLifetime);
  r.system_complexity = rng.uniform_int(kMinScale, kMaxScale);
  r.integration_complexity = rng.uniform_int(kMinScale, kMaxScale);
  r.data_sensitivity = rng.uniform_int(kMinScale, kMaxScale);
  return r;
}

// Random labeled matrix whose cells sit on a 1/8 grid so midpoints are exact.
inline FeatureMatrix grid_matrix(Rng& rng, std::size_t rows, std::size_t cols,
                                 int levels, int classes) {
  std::vector<double> values(rows * cols);
  for (auto& v : values) v = static_cast<double>(rng.uniform_int(0, levels - 1)) / 8.0;
  std::vector<Strategy> labels(rows);
  for (auto& l : labels) l = kAllStrategies[rng.uniform_index(static_cast<std::uint64_t>(classes))];
  return FeatureMatrix(cols, std::move(values), std::move(labels));
}

// Default dataset and a model trained on its 70% split; built once per process.
struct Fixture {
  Dataset dataset;
  TrainedModel model;
  Dataset train;
  Dataset test;
};
const Fixture& fixture();

}  // namespace pqmigrate::testing
