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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using pqmigrate::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / "pqmigrate_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string p(const std::string& name) { return (scratch() / name).string(); }

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("usage errors exit with 1") {
    CHECK(invoke({}).code == 1);
    CHECK(invoke({"frobnicate"}).code == 1);
    const auto r = invoke({"generate"});
    CHECK(r.code == 1);
    CHECK(r.err.find("--out") != std::string::npos);
    CHECK(invoke({"--help"}).code == 0);
  }

  TEST_CASE("missing input files are named") {
    const auto r = invoke({"validate", "--data", p("missing.csv")});
    CHECK(r.code == 1);
    CHECK(r.err.find("missing.csv") != std::string::npos);
    const auto t = invoke({"train", "--data", p("missing.csv"), "--out", p("never.json")});
    CHECK(t.code == 1);
    CHECK(t.err.find("missing.csv") != std::string::npos);
    const auto m = invoke({"predict", "--model", p("missing_model.json"), "--in", p("x.json")});
    CHECK(m.code == 1);
  }

  TEST_CASE("generate, validate, train, evaluate, predict and report") {
    auto r = invoke({"generate", "--seed", "42", "--per-class", "40", "--out", p("d.csv"),
                     "--report", p("report.json")});
    REQUIRE(r.code == 0);
    const auto report = nlohmann::json::parse(slurp(p("report.json")));
    CHECK(report["total"] == 200);

    r = invoke({"validate", "--data", p("d.csv")});
    CHECK(r.code == 0);
    CHECK(r.out.find("1") != std::string::npos);

    r = invoke({"train", "--data", p("d.csv"), "--out", p("m.json"), "--trees", "15",
                "--folds", "3", "--rules-out", p("rules.txt")});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("→") != std::string::npos);
    CHECK(slurp(p("rules.txt")).find("IF ") != std::string::npos);
    const auto model = nlohmann::json::parse(slurp(p("m.json")));
    CHECK(model["format_version"] == 1);
    CHECK(model["metadata"]["created_at"] == "1970-01-01T00:00:00Z");

    r = invoke({"evaluate", "--data", p("d.csv"), "--model", p("m.json"), "--out-dir",
                p("eval"), "--json"});
    REQUIRE(r.code == 0);
    CHECK(nlohmann::json::parse(r.out)["evaluated_on"] == "held_out_split");
    for (const char* f : {"evaluation.json", "evaluation.txt", "method_strategy.csv",
                          "type_strategy.csv", "system_vulnerability.csv"}) {
      CHECK(fs::exists(scratch() / "eval" / f));
    }

    r = invoke({"predict", "--model", p("m.json"), "--system-type", "iot_device",
                "--crypto-method", "CRYSTALS_KYBER", "--security-lifetime", "5",
                "--key-size", "768", "--system-complexity", "2",
                "--integration-complexity", "2", "--data-sensitivity", "2"});
    REQUIRE(r.code == 0);
    CHECK(nlohmann::json::parse(r.out).contains("confidence"));

    r = invoke({"predict", "--model", p("m.json"), "--system-type", "iot_device"});
    CHECK(r.code == 1);
    CHECK(r.err.find("crypto-method") != std::string::npos);

    r = invoke({"predict", "--model", p("m.json"), "--system-type", "iot_device",
                "--crypto-method", "RSA", "--security-lifetime", "5", "--key-size", "2048",
                "--system-complexity", "2", "--integration-complexity", "2",
                "--data-sensitivity", "6"});
    CHECK(r.code == 1);
    CHECK(r.err.find("data_sensitivity") != std::string::npos);

    r = invoke({"report", "--data", p("d.csv"), "--out-dir", p("rep")});
    CHECK(r.code == 0);
    CHECK(fs::exists(scratch() / "rep" / "method_strategy.csv"));
  }

  TEST_CASE("default generation writes 1205 rows and a 99.4% report") {
    const auto r = invoke({"generate", "--seed", "42", "--out", p("full.csv"), "--report",
                           p("full_report.json")});
    REQUIRE(r.code == 0);
    std::ifstream in(p("full.csv"));
    std::size_t lines = 0;
    for (std::string line; std::getline(in, line);) ++lines;
    CHECK(lines == 1206);
    const auto report = nlohmann::json::parse(slurp(p("full_report.json")));
    CHECK(report["consistency_ratio"].get<double>() == doctest::Approx(0.994).epsilon(0.001));
  }

  TEST_CASE("predict reads a record file") {
    REQUIRE(invoke({"generate", "--per-class", "30", "--out", p("small.csv")}).code == 0);
    REQUIRE(invoke({"train", "--data", p("small.csv"), "--out", p("small.json"), "--trees",
                    "10", "--no-cv"})
                .code == 0);
    std::ofstream(p("system.json"))
        << R"({"system_type": "cloud_service", "crypto_method": "RSA", "key_size": 2048,
               "security_lifetime": 12, "system_complexity": 4,
               "integration_complexity": 3, "data_sensitivity": 3})";
    const auto r = invoke({"predict", "--in", p("system.json"), "--model", p("small.json")});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.contains("strategy"));
    CHECK(j.contains("confidence"));
    CHECK(j["alternatives"].size() == 3);
  }

  TEST_CASE("identical seeds give byte-identical artifacts") {
    for (const char* tag : {"a", "b"}) {
      const std::string t = tag;
      REQUIRE(invoke({"generate", "--per-class", "30", "--out", p("det_" + t + ".csv")}).code == 0);
      REQUIRE(invoke({"train", "--data", p("det_" + t + ".csv"), "--out",
                      p("det_" + t + ".json"), "--trees", "8", "--folds", "3",
                      "--threads", t == "a" ? "1" : "4"})
                  .code == 0);
      REQUIRE(invoke({"evaluate", "--data", p("det_" + t + ".csv"), "--model",
                      p("det_" + t + ".json"), "--out-dir", p("det_eval_" + t)})
                  .code == 0);
    }
    CHECK(slurp(p("det_a.csv")) == slurp(p("det_b.csv")));
    CHECK(slurp(p("det_a.json")) == slurp(p("det_b.json")));
    CHECK(slurp(scratch() / "det_eval_a" / "evaluation.json") ==
          slurp(scratch() / "det_eval_b" / "evaluation.json"));
  }

  TEST_CASE("generation failures and bad rule files exit with 1") {
    std::ofstream(p("bad_rules.json")) << "{\"rules\": []}";
    CHECK(invoke({"generate", "--out", p("x.csv"), "--rules", p("bad_rules.json")}).code == 1);
    CHECK(invoke({"generate", "--out", p("x.csv"), "--noise", "0.9"}).code == 1);
  }

  TEST_CASE("corrupted models exit with 1") {
    std::ofstream(p("broken.json")) << "{\"format_version\": 1, \"schema\": ";
    const auto r = invoke({"evaluate", "--data", p("broken.json"), "--model", p("broken.json")});
    CHECK(r.code == 1);
  }

  TEST_CASE("created_at resolution order") {
    CHECK(pqmigrate::cli::resolve_created_at("2025-01-02T03:04:05Z") == "2025-01-02T03:04:05Z");
    ::setenv("SOURCE_DATE_EPOCH", "86400", 1);
    CHECK(pqmigrate::cli::resolve_created_at("") == "1970-01-02T00:00:00Z");
    ::unsetenv("SOURCE_DATE_EPOCH");
    CHECK(pqmigrate::cli::resolve_created_at("") == "1970-01-01T00:00:00Z");
  }

  TEST_CASE("serve rejects an out of range port before loading anything") {
    const auto r = invoke({"serve", "--model", p("missing_model.json"), "--port", "70000"});
    CHECK(r.code == 1);
  }
}
