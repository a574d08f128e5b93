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

#include "pqmigrate/api.hpp"

#include <map>

#include "httplib.h"
#include "pqmigrate/error.hpp"
#include "pqmigrate/evaluation.hpp"
#include "pqmigrate/pipeline.hpp"
#include "pqmigrate/record_io.hpp"

namespace pqmigrate {
namespace {

using nlohmann::json;

ApiResponse json_response(int status, const json& body) {
  return {status, body.dump(), "application/json"};
}

ApiResponse error_response(int status, const std::string& message,
                           const std::string& field = {}) {
  json body = {{"error", message}};
  if (!field.empty()) body["field"] = field;
  return json_response(status, body);
}

json parse_body(std::string_view body) {
  try {
    return json::parse(body);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("malformed JSON body: ") + e.what());
  }
}

SystemRecord parse_record(const json& j) {
  if (!j.is_object()) throw InputError("record must be a JSON object");
  return record_from_json(j);
}

}  // namespace

ApiService::ApiService(std::shared_ptr<const TrainedModel> model,
                       std::optional<Dataset> dataset)
    : model_(std::move(model)) {
  if (!model_) throw InputError("the API needs a loaded model");
  if (dataset) {
    std::map<std::string, std::int64_t> counts;
    for (auto s : kAllStrategies) counts[std::string(to_string(s))] = 0;
    for (const auto& r : *dataset) {
      if (r.recommended_strategy) ++counts[std::string(to_string(*r.recommended_strategy))];
    }
    summary_ = json{{"total", dataset->size()},
                    {"class_counts", counts},
                    {"method_strategy_heatmap", method_strategy_heatmap(*dataset).to_json()},
                    {"type_strategy_heatmap", type_strategy_heatmap(*dataset).to_json()},
                    {"system_vulnerability", system_vulnerability_scores(*dataset).to_json()}};
  }
}

ApiResponse ApiService::handle(std::string_view method, std::string_view path,
                               std::string_view body) const {
  struct Route {
    std::string_view path;
    std::string_view method;
  };
  static constexpr Route kRoutes[] = {
      {"/health", "GET"},           {"/predict", "POST"},
      {"/whatif", "POST"},          {"/model/importances", "GET"},
      {"/dataset/summary", "GET"},
  };
  const Route* route = nullptr;
  for (const auto& r : kRoutes) {
    if (r.path == path) route = &r;
  }
  if (!route) return error_response(404, "no route for " + std::string(path));
  if (route->method != method) {
    return error_response(405, std::string(path) + " expects " + std::string(route->method));
  }
  try {
    if (path == "/health") return health();
    if (path == "/predict") return predict(body);
    if (path == "/whatif") return whatif(body);
    if (path == "/model/importances") return importances();
    return dataset_summary();
  } catch (const InputError& e) {
    return error_response(400, e.what(), e.field());
  } catch (const std::exception& e) {
    return error_response(500, e.what());
  }
}

ApiResponse ApiService::health() const {
  return json_response(200, {{"status", "ok"},
                             {"model_version", model_->metadata.format_version},
                             {"created_at", model_->metadata.created_at},
                             {"n_trees", model_->forest.trees().size()},
                             {"n_features", model_->schema.size()}});
}

ApiResponse ApiService::predict(std::string_view body) const {
  const SystemRecord record = parse_record(parse_body(body));
  return json_response(200, recommend(*model_, record).to_json());
}

ApiResponse ApiService::whatif(std::string_view body) const {
  const json request = parse_body(body);
  if (!request.is_object()) throw InputError("request must be a JSON object");
  if (!request.contains("base")) throw InputError("missing field base", "base");
  if (!request.contains("vary") || !request.at("vary").is_string()) {
    throw InputError("vary must name a record field", "vary");
  }
  if (!request.contains("values") || !request.at("values").is_array()) {
    throw InputError("values must be a list", "values");
  }
  const auto vary = request.at("vary").get<std::string>();
  bool known = false;
  for (std::size_t i = 0; i + 1 < kRecordFields.size(); ++i) {
    if (kRecordFields[i] == vary) known = true;
  }
  if (!known) throw InputError("cannot vary '" + vary + "'", "vary");
  const auto& values = request.at("values");
  if (values.size() > kMaxWhatIfValues) {
    throw InputError("at most " + std::to_string(kMaxWhatIfValues) + " values", "values");
  }
  json base = record_to_json(parse_record(request.at("base")));
  base.erase("recommended_strategy");
  json results = json::array();
  for (const auto& value : values) {
    base[vary] = value;
    const auto rec = recommend(*model_, parse_record(base));
    results.push_back({{"value", value}, {"recommendation", rec.to_json()}});
  }
  return json_response(200, {{"vary", vary}, {"results", results}});
}

ApiResponse ApiService::importances() const {
  json list = json::array();
  for (const auto& [name, v] : ranked_importances(*model_)) {
    list.push_back({{"feature", name}, {"importance", v}});
  }
  return json_response(200, {{"importances", list}});
}

ApiResponse ApiService::dataset_summary() const {
  if (!summary_) return error_response(404, "server was started without a dataset");
  return json_response(200, *summary_);
}

struct HttpServer::Impl {
  httplib::Server server;
  ServeOptions options;
};

HttpServer::HttpServer(const ApiService& service, ServeOptions options)
    : impl_(std::make_unique<Impl>()) {
  impl_->options = std::move(options);
  auto& server = impl_->server;
  const auto& dir = impl_->options.static_dir;
  if (dir && std::filesystem::is_directory(*dir)) server.set_mount_point("/", dir->string());
  auto forward = [&service](const httplib::Request& req, httplib::Response& res) {
    const auto out = service.handle(req.method, req.path, req.body);
    res.status = out.status;
    res.set_content(out.body, out.content_type);
  };
  for (const char* path :
       {"/health", "/predict", "/whatif", "/model/importances", "/dataset/summary"}) {
    server.Get(path, forward);
    server.Post(path, forward);
  }
  server.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (!res.body.empty()) return;
    res.set_content(json{{"error", "no route for " + req.path}}.dump(), "application/json");
  });
}

HttpServer::~HttpServer() = default;

int HttpServer::bind() {
  auto& o = impl_->options;
  if (o.port == 0) return impl_->server.bind_to_any_port(o.host);
  return impl_->server.bind_to_port(o.host, o.port) ? o.port : -1;
}

void HttpServer::run() { impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

bool serve(const ApiService& service, const ServeOptions& options) {
  HttpServer server(service, options);
  if (server.bind() < 0) return false;
  server.run();
  return true;
}

}  // namespace pqmigrate
