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

#include <stdexcept>
#include <string>
#include <utility>

namespace pqmigrate {

// Caller supplied something invalid: bad record, bad argument, unknown
// category. Maps to CLI exit code 1 and HTTP 400.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& message, std::string field = {})
      : std::runtime_error(message), field_(std::move(field)) {}

  // Offending field name, empty when the error is not tied to one field.
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// A record references a category the feature schema never saw.
class EncodingError : public InputError {
 public:
  using InputError::InputError;
};

// The synthetic generator could not fill a class bucket.
class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Model document unreadable, corrupted, or of an unsupported version.
class LoadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pqmigrate
