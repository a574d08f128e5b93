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

#include <filesystem>
#include <iosfwd>
#include <string>

#include "json.hpp"
#include "pqmigrate/domain.hpp"

namespace pqmigrate {

// Flat object keyed by the dataset column names; "recommended_strategy" is
// written only when present.
nlohmann::json record_to_json(const SystemRecord& record);

// Throws InputError naming the offending field for missing keys, wrong
// types, or unknown enumeration names. Range checks are left to
// validate_record.
SystemRecord record_from_json(const nlohmann::json& j);

// Header row is kRecordFields in order.
void write_csv(std::ostream& out, const Dataset& dataset);
Dataset read_csv(std::istream& in);

void write_jsonl(std::ostream& out, const Dataset& dataset);
Dataset read_jsonl(std::istream& in);

// Picks the format from the extension (".jsonl" or anything else = CSV).
// Throws InputError naming the path when it cannot be opened.
void save_dataset(const std::filesystem::path& path, const Dataset& dataset);
Dataset load_dataset(const std::filesystem::path& path);

}  // namespace pqmigrate
