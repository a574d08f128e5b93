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

#include "cli.hpp"

#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "pqmigrate/advisor.hpp"
#include "pqmigrate/api.hpp"
#include "pqmigrate/datagen.hpp"
#include "pqmigrate/error.hpp"
#include "pqmigrate/pipeline.hpp"
#include "pqmigrate/record_io.hpp"
#include "pqmigrate/risk.hpp"

namespace pqmigrate::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path, "path");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path + " is not valid JSON: " + e.what(), "path");
  }
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string(), "path");
  out << content;
  if (!out) throw InputError("failed writing " + path.string(), "path");
}

RiskConfig load_risk(const std::string& path) {
  return path.empty() ? RiskConfig::defaults() : RiskConfig::from_json(read_json_file(path));
}

struct GenerateArgs {
  std::uint64_t seed = 42;
  int per_class = 241;
  double noise = 0.006;
  std::string out;
  std::string report;
  std::string profiles;
  std::string rules;
};

struct TrainArgs {
  std::string data;
  std::string out;
  std::string rules_out;
  std::string created_at;
  std::uint64_t seed = 42;
  std::optional<std::uint64_t> generator_seed;
  int trees = 100;
  int depth = 5;
  int forest_depth = 32;
  std::string features = "sqrt";
  double test_fraction = 0.3;
  int folds = 5;
  bool no_cv = false;
  unsigned threads = 0;
};

struct PredictArgs {
  std::string model;
  std::string in;
  std::string system_type;
  std::string method;
  std::optional<int> lifetime, key_size, system_complexity, integration_complexity,
      sensitivity;
};

int do_generate(const GenerateArgs& a, std::ostream& out) {
  GeneratorConfig config;
  config.seed = a.seed;
  config.records_per_class = a.per_class;
  config.label_noise_rate = a.noise;
  const RiskConfig risk = load_risk(a.rules);
  const ProfileTable profiles =
      a.profiles.empty() ? default_profiles() : profiles_from_json(read_json_file(a.profiles));
  const auto generated = generate_dataset(config, risk, profiles);
  save_dataset(a.out, generated.records);
  const auto report = validate_consistency(generated.records, risk).to_json();
  if (!a.report.empty()) write_file(a.report, report.dump(2) + "\n");
  out << json{{"records", generated.records.size()},
              {"output", a.out},
              {"consistency_ratio", report.at("consistency_ratio")},
              {"flipped", generated.flipped.size()}}
             .dump(2)
      << "\n";
  return kExitOk;
}

int do_validate(const std::string& data, const std::string& rules, std::ostream& out) {
  const auto report = validate_consistency(load_dataset(data), load_risk(rules));
  out << report.to_json().dump(2) << "\n";
  return kExitOk;
}

int do_train(const TrainArgs& a, std::ostream& out) {
  const Dataset dataset = load_dataset(a.data);
  TrainingConfig config;
  config.tree.max_depth = a.depth;
  config.forest.n_trees = a.trees;
  config.forest.tree_params.max_depth = a.forest_depth;
  config.forest.features_per_split = FeaturesPerSplit::parse(a.features);
  config.forest.seed = a.seed;
  config.forest.threads = a.threads;
  config.split_seed = a.seed;
  config.test_fraction = a.test_fraction;
  config.cv_folds = a.folds;
  config.cross_validate = !a.no_cv;
  config.generator_seed = a.generator_seed.value_or(a.seed);
  config.created_at = resolve_created_at(a.created_at);
  const auto run = train_pipeline(dataset, config);
  save_model(run.model, a.out);

  const auto rules = extract_rules(run.model.tree, run.model.schema);
  std::string rule_text;
  for (const auto& r : rules) rule_text += r + "\n";
  if (!a.rules_out.empty()) write_file(a.rules_out, rule_text);

  out << "Model written to " << a.out << " (" << run.train.size() << " training rows, "
      << run.test.size() << " held out)\n";
  const auto& meta = run.model.metadata;
  if (meta.forest_cv && meta.tree_cv) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "Cross-validation (%d folds): random forest %.4f +/- %.4f, decision "
                  "tree %.4f +/- %.4f\n",
                  meta.cv_folds, meta.forest_cv->mean, meta.forest_cv->std,
                  meta.tree_cv->mean, meta.tree_cv->std);
    out << buf;
  }
  out << "\nDecision tree rules\n";
  for (const auto& r : rules) out << "  " << r << "\n";
  out << "\nFeature importance\n";
  for (const auto& [name, v] : ranked_importances(run.model)) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "  %-40s %6.2f%%\n", name.c_str(), 100.0 * v);
    out << buf;
  }
  return kExitOk;
}

int do_evaluate(const std::string& data, const std::string& model_path,
                const std::string& out_dir, bool as_json, std::ostream& out) {
  const auto model = load_model(model_path);
  const auto result = evaluate_pipeline(model, load_dataset(data));
  if (!out_dir.empty()) {
    const fs::path dir(out_dir);
    write_file(dir / "evaluation.json", result.to_json().dump(2) + "\n");
    write_file(dir / "evaluation.txt", result.to_text());
    write_file(dir / "method_strategy.csv", result.method_heatmap.to_csv());
    write_file(dir / "type_strategy.csv", result.type_heatmap.to_csv());
    write_file(dir / "system_vulnerability.csv", result.vulnerability.to_csv());
  }
  out << (as_json ? result.to_json().dump(2) + "\n" : result.to_text());
  return kExitOk;
}

int do_predict(const PredictArgs& a, std::ostream& out) {
  const auto model = load_model(a.model);
  SystemRecord record;
  if (!a.in.empty()) {
    record = record_from_json(read_json_file(a.in));
  } else {
    json j;
    const auto need = [](const auto& v, const char* flag) {
      if (!v) throw InputError(std::string("missing ") + flag + " (or use --in)", flag);
      return *v;
    };
    if (a.system_type.empty()) throw InputError("missing --system-type (or use --in)", "system_type");
    if (a.method.empty()) throw InputError("missing --crypto-method (or use --in)", "crypto_method");
    j["system_type"] = a.system_type;
    j["crypto_method"] = a.method;
    j["security_lifetime"] = need(a.lifetime, "--security-lifetime");
    j["key_size"] = need(a.key_size, "--key-size");
    j["system_complexity"] = need(a.system_complexity, "--system-complexity");
    j["integration_complexity"] = need(a.integration_complexity, "--integration-complexity");
    j["data_sensitivity"] = need(a.sensitivity, "--data-sensitivity");
    record = record_from_json(j);
  }
  out << recommend(model, record).to_json().dump(2) << "\n";
  return kExitOk;
}

int do_report(const std::string& data, const std::string& out_dir, std::ostream& out) {
  const Dataset dataset = load_dataset(data);
  const fs::path dir(out_dir);
  const auto methods = method_strategy_heatmap(dataset);
  const auto types = type_strategy_heatmap(dataset);
  const auto vuln = system_vulnerability_scores(dataset);
  write_file(dir / "method_strategy.csv", methods.to_csv());
  write_file(dir / "type_strategy.csv", types.to_csv());
  write_file(dir / "system_vulnerability.csv", vuln.to_csv());
  out << methods.to_text() << "\n" << types.to_text() << "\n" << vuln.to_text();
  return kExitOk;
}

int do_serve(const std::string& model_path, const std::string& data, std::string host,
             std::optional<int> port, const std::string& static_dir, std::ostream& out,
             std::ostream& err) {
  ServeOptions options;
  if (const char* env = std::getenv("PQMIGRATE_HOST"); env && *env) options.host = env;
  if (const char* env = std::getenv("PQMIGRATE_PORT"); env && *env) {
    try {
      options.port = std::stoi(env);
    } catch (const std::exception&) {
      throw InputError(std::string("PQMIGRATE_PORT is not a port number: ") + env, "port");
    }
  }
  if (!host.empty()) options.host = std::move(host);
  if (port) options.port = *port;
  if (options.port < 0 || options.port > 65535) throw InputError("port out of range", "port");
  if (!static_dir.empty()) options.static_dir = static_dir;

  auto model = std::make_shared<const TrainedModel>(load_model(model_path));
  std::optional<Dataset> dataset;
  if (!data.empty()) dataset = load_dataset(data);
  ApiService service(model, std::move(dataset));
  HttpServer server(service, options);
  const int bound = server.bind();
  if (bound < 0) {
    err << "cannot bind " << options.host << ":" << options.port << "\n";
    return kExitInput;
  }
  out << "Listening on http://" << options.host << ":" << bound << std::endl;
  server.run();
  return kExitOk;
}

}  // namespace

std::string resolve_created_at(const std::string& explicit_value) {
  if (!explicit_value.empty()) return explicit_value;
  std::time_t t = 0;
  if (const char* env = std::getenv("SOURCE_DATE_EPOCH"); env && *env) {
    try {
      t = static_cast<std::time_t>(std::stoll(env));
    } catch (const std::exception&) {
      throw InputError(std::string("SOURCE_DATE_EPOCH is not an integer: ") + env,
                       "SOURCE_DATE_EPOCH");
    }
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Post-quantum migration strategy advisor", "pqmigrate"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Generate a labeled synthetic dataset");
  generate->add_option("--seed", gen.seed, "Master seed")->capture_default_str();
  generate->add_option("--per-class", gen.per_class, "Records per strategy before noise")
      ->capture_default_str();
  generate->add_option("--noise", gen.noise, "Label noise rate")->capture_default_str();
  generate->add_option("--out", gen.out, "Output path (.csv or .jsonl)")->required();
  generate->add_option("--report", gen.report, "Write the consistency report here");
  generate->add_option("--profiles", gen.profiles, "Domain profile JSON");
  generate->add_option("--rules", gen.rules, "Risk rule-table JSON");

  std::string data, rules, model_path, out_dir;
  auto* validate = app.add_subcommand("validate", "Check labels against the rule table");
  validate->add_option("--data", data, "Dataset path")->required();
  validate->add_option("--rules", rules, "Risk rule-table JSON");

  TrainArgs tr;
  auto* train = app.add_subcommand("train", "Train the forest and the interpretable tree");
  train->add_option("--data", tr.data, "Dataset path")->required();
  train->add_option("--out", tr.out, "Model document path")->required();
  train->add_option("--seed", tr.seed, "Split, fold and forest seed")->capture_default_str();
  train->add_option("--generator-seed", tr.generator_seed, "Recorded in the metadata");
  train->add_option("--trees", tr.trees, "Forest size")->capture_default_str();
  train->add_option("--depth", tr.depth, "Interpretable tree depth")->capture_default_str();
  train->add_option("--forest-depth", tr.forest_depth, "Forest tree depth cap")
      ->capture_default_str();
  train->add_option("--features", tr.features, "Features per split: sqrt, all or N")
      ->capture_default_str();
  train->add_option("--test-fraction", tr.test_fraction, "Held-out fraction")
      ->capture_default_str();
  train->add_option("--folds", tr.folds, "Cross-validation folds")->capture_default_str();
  train->add_flag("--no-cv", tr.no_cv, "Skip cross-validation");
  train->add_option("--threads", tr.threads, "Worker threads (0 = all cores)");
  train->add_option("--rules-out", tr.rules_out, "Write the tree's rules here");
  train->add_option("--created-at", tr.created_at, "Creation timestamp for the metadata");

  bool as_json = false;
  auto* evaluate = app.add_subcommand("evaluate", "Reports, matrices, CV and heatmaps");
  evaluate->add_option("--data", data, "Dataset path")->required();
  evaluate->add_option("--model", model_path, "Model document")->required();
  evaluate->add_option("--out-dir", out_dir, "Write JSON, text and CSV artifacts here");
  evaluate->add_flag("--json", as_json, "Print JSON instead of text");

  PredictArgs pr;
  auto* predict = app.add_subcommand("predict", "Recommend a strategy for one system");
  predict->add_option("--model", pr.model, "Model document")->required();
  predict->add_option("--in", pr.in, "Record JSON file");
  predict->add_option("--system-type", pr.system_type);
  predict->add_option("--crypto-method", pr.method);
  predict->add_option("--security-lifetime", pr.lifetime);
  predict->add_option("--key-size", pr.key_size);
  predict->add_option("--system-complexity", pr.system_complexity);
  predict->add_option("--integration-complexity", pr.integration_complexity);
  predict->add_option("--data-sensitivity", pr.sensitivity);

  auto* report = app.add_subcommand("report", "Write heatmap CSVs for a dataset");
  report->add_option("--data", data, "Dataset path")->required();
  report->add_option("--out-dir", out_dir, "Output directory")->required();

  std::string host, static_dir;
  std::optional<int> port;
  auto* serve_cmd = app.add_subcommand("serve", "Serve the JSON API");
  serve_cmd->add_option("--model", model_path, "Model document")->required();
  serve_cmd->add_option("--data", data, "Dataset for /dataset/summary");
  serve_cmd->add_option("--host", host, "Bind address (env PQMIGRATE_HOST)");
  serve_cmd->add_option("--port", port, "Port (env PQMIGRATE_PORT)");
  serve_cmd->add_option("--static", static_dir, "Directory of UI assets to host");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitInput;
  }

  try {
    if (*generate) return do_generate(gen, out);
    if (*validate) return do_validate(data, rules, out);
    if (*train) return do_train(tr, out);
    if (*evaluate) return do_evaluate(data, model_path, out_dir, as_json, out);
    if (*predict) return do_predict(pr, out);
    if (*report) return do_report(data, out_dir, out);
    if (*serve_cmd) return do_serve(model_path, data, host, port, static_dir, out, err);
  } catch (const InputError& e) {
    err << "error: " << e.what();
    if (!e.field().empty()) err << " [" << e.field() << "]";
    err << "\n";
    return kExitInput;
  } catch (const LoadError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const GenerationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace pqmigrate::cli
