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
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"
#include "pqmigrate/advisor.hpp"
#include "pqmigrate/domain.hpp"

namespace pqmigrate {

struct ApiResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

// Transport-independent request handling over an immutable model snapshot.
// Safe for concurrent use.
class ApiService {
 public:
  explicit ApiService(std::shared_ptr<const TrainedModel> model,
                      std::optional<Dataset> dataset = std::nullopt);

  ApiResponse handle(std::string_view method, std::string_view path,
                     std::string_view body) const;

  const TrainedModel& model() const { return *model_; }

 private:
  ApiResponse health() const;
  ApiResponse predict(std::string_view body) const;
  ApiResponse whatif(std::string_view body) const;
  ApiResponse importances() const;
  ApiResponse dataset_summary() const;

  std::shared_ptr<const TrainedModel> model_;
  std::optional<nlohmann::json> summary_;
};

// Largest accepted `values` list for /whatif.
inline constexpr std::size_t kMaxWhatIfValues = 1000;

struct ServeOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  // Served under "/" when the directory exists.
  std::optional<std::filesystem::path> static_dir;
};

// HTTP binding of an ApiService. The service must outlive the server.
class HttpServer {
 public:
  HttpServer(const ApiService& service, ServeOptions options);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Port 0 picks a free port. Returns the bound port, or -1 on failure.
  int bind();
  // Blocks until stop() is called.
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// bind() then run(). Returns false when the socket cannot be bound.
bool serve(const ApiService& service, const ServeOptions& options);

}  // namespace pqmigrate
