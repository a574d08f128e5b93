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

#include "pqmigrate/record_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>
#include <vector>

#include "pqmigrate/error.hpp"

namespace pqmigrate {
namespace {

using nlohmann::json;

template <typename Enum>
Enum parse_enum(std::string_view field, const std::string& text,
                std::optional<Enum> (*parse)(std::string_view)) {
  auto v = parse(text);
  if (!v) {
    throw InputError("unknown " + std::string(field) + " '" + text + "'",
                     std::string(field));
  }
  return *v;
}

const json& require(const json& j, std::string_view field) {
  const auto it = j.find(std::string(field));
  if (it == j.end()) {
    throw InputError("missing field " + std::string(field), std::string(field));
  }
  return *it;
}

std::string require_string(const json& j, std::string_view field) {
  const auto& v = require(j, field);
  if (!v.is_string()) {
    throw InputError(std::string(field) + " must be a string", std::string(field));
  }
  return v.get<std::string>();
}

int require_int(const json& j, std::string_view field) {
  const auto& v = require(j, field);
  if (v.is_number_integer()) {
    const auto n = v.get<long long>();
    if (n < INT32_MIN || n > INT32_MAX) {
      throw InputError(std::string(field) + " out of integer range",
                       std::string(field));
    }
    return static_cast<int>(n);
  }
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d == static_cast<double>(static_cast<long long>(d)) &&
        d >= INT32_MIN && d <= INT32_MAX) {
      return static_cast<int>(d);
    }
  }
  throw InputError(std::string(field) + " must be an integer", std::string(field));
}

int parse_int_cell(std::string_view field, const std::string& cell) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(cell, &pos);
    if (pos == cell.size()) return v;
  } catch (const std::exception&) {
  }
  throw InputError(std::string(field) + " must be an integer, got '" + cell + "'",
                   std::string(field));
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  cells.push_back(cur);
  return cells;
}

}  // namespace

json record_to_json(const SystemRecord& r) {
  json j = {
      {"system_type", to_string(r.system_type)},
      {"security_lifetime", r.security_lifetime},
      {"crypto_method", to_string(r.crypto_method)},
      {"key_size", r.key_size},
      {"system_complexity", r.system_complexity},
      {"integration_complexity", r.integration_complexity},
      {"data_sensitivity", r.data_sensitivity},
  };
  if (r.recommended_strategy) {
    j["recommended_strategy"] = to_string(*r.recommended_strategy);
  }
  return j;
}

SystemRecord record_from_json(const json& j) {
  if (!j.is_object()) throw InputError("record must be a JSON object");
  SystemRecord r;
  r.system_type = parse_enum<SystemType>(
      "system_type", require_string(j, "system_type"), system_type_from_string);
  r.security_lifetime = require_int(j, "security_lifetime");
  r.crypto_method = parse_enum<CryptoMethod>(
      "crypto_method", require_string(j, "crypto_method"), method_from_string);
  r.key_size = require_int(j, "key_size");
  r.system_complexity = require_int(j, "system_complexity");
  r.integration_complexity = require_int(j, "integration_complexity");
  r.data_sensitivity = require_int(j, "data_sensitivity");
  if (const auto it = j.find("recommended_strategy");
      it != j.end() && !it->is_null()) {
    if (!it->is_string()) {
      throw InputError("recommended_strategy must be a string",
                       "recommended_strategy");
    }
    r.recommended_strategy = parse_enum<Strategy>(
        "recommended_strategy", it->get<std::string>(), strategy_from_string);
  }
  return r;
}

void write_csv(std::ostream& out, const Dataset& dataset) {
  for (std::size_t i = 0; i < kRecordFields.size(); ++i) {
    out << (i ? "," : "") << kRecordFields[i];
  }
  out << '\n';
  for (const auto& r : dataset) {
    out << to_string(r.system_type) << ',' << r.security_lifetime << ','
        << to_string(r.crypto_method) << ',' << r.key_size << ','
        << r.system_complexity << ',' << r.integration_complexity << ','
        << r.data_sensitivity << ','
        << (r.recommended_strategy ? to_string(*r.recommended_strategy) : "")
        << '\n';
  }
}

Dataset read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("CSV input is empty");
  const auto header = split_csv_line(line);
  const bool has_label = header.size() == kRecordFields.size();
  if (header.size() + (has_label ? 0 : 1) != kRecordFields.size()) {
    throw InputError("CSV header has " + std::to_string(header.size()) +
                     " columns, expected " + std::to_string(kRecordFields.size()));
  }
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] != kRecordFields[i]) {
      throw InputError("CSV column " + std::to_string(i + 1) + " is '" +
                       header[i] + "', expected '" +
                       std::string(kRecordFields[i]) + "'");
    }
  }
  Dataset out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw InputError("CSV line " + std::to_string(line_no) + " has " +
                       std::to_string(cells.size()) + " cells");
    }
    try {
      SystemRecord r;
      r.system_type = parse_enum<SystemType>("system_type", cells[0],
                                             system_type_from_string);
      r.security_lifetime = parse_int_cell("security_lifetime", cells[1]);
      r.crypto_method = parse_enum<CryptoMethod>("crypto_method", cells[2],
                                                 method_from_string);
      r.key_size = parse_int_cell("key_size", cells[3]);
      r.system_complexity = parse_int_cell("system_complexity", cells[4]);
      r.integration_complexity = parse_int_cell("integration_complexity", cells[5]);
      r.data_sensitivity = parse_int_cell("data_sensitivity", cells[6]);
      if (has_label && !cells[7].empty()) {
        r.recommended_strategy = parse_enum<Strategy>(
            "recommended_strategy", cells[7], strategy_from_string);
      }
      out.push_back(r);
    } catch (const InputError& e) {
      throw InputError("CSV line " + std::to_string(line_no) + ": " + e.what(),
                       e.field());
    }
  }
  return out;
}

void write_jsonl(std::ostream& out, const Dataset& dataset) {
  for (const auto& r : dataset) out << record_to_json(r).dump() << '\n';
}

Dataset read_jsonl(std::istream& in) {
  Dataset out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(record_from_json(json::parse(line)));
    } catch (const json::parse_error& e) {
      throw InputError("JSONL line " + std::to_string(line_no) + ": " + e.what());
    } catch (const InputError& e) {
      throw InputError("JSONL line " + std::to_string(line_no) + ": " + e.what(),
                       e.field());
    }
  }
  return out;
}

void save_dataset(const std::filesystem::path& path, const Dataset& dataset) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string(), "path");
  if (path.extension() == ".jsonl") {
    write_jsonl(out, dataset);
  } else {
    write_csv(out, dataset);
  }
  if (!out) throw InputError("failed writing " + path.string(), "path");
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string(), "path");
  return path.extension() == ".jsonl" ? read_jsonl(in) : read_csv(in);
}

}  // namespace pqmigrate
