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

#include "support.hpp"

#include "pqmigrate/pipeline.hpp"

namespace pqmigrate::testing {

const Fixture& fixture() {
  static const Fixture f = [] {
    Fixture out;
    out.dataset = generate_dataset(GeneratorConfig{}).records;
    TrainingConfig config;
    config.cross_validate = false;
    auto run = train_pipeline(out.dataset, config);
    out.model = std::move(run.model);
    out.train = std::move(run.train);
    out.test = std::move(run.test);
    return out;
  }();
  return f;
}

}  // namespace pqmigrate::testing
