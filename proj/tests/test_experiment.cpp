// Copyright 2026 The vcool Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "vcool/experiment.hpp"

namespace vcool {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

json small_density() {
  return {{"kind", "virtual_density"},
          {"model", {{"statistics", "boson"}, {"L", 3}, {"N", 2}, {"U", 1.0}}},
          {"beta", 0.5},
          {"shots", 5000},
          {"seed", 7}};
}

std::string csv_of(const RunResult& r) { return r.files.front().contents; }

TEST(Config, HashIsStableAndKeyOrderFree) {
  const json a = json::parse(R"({"kind":"distill","beta":0.5})");
  const json b = json::parse(R"({"beta":0.5,"kind":"distill"})");
  EXPECT_EQ(config_hash(a), config_hash(b));
  EXPECT_EQ(config_hash(a).size(), 16u);
  EXPECT_NE(config_hash(a), config_hash(small_density()));
}

TEST(Config, ValidationErrors) {
  EXPECT_THROW(validate_config(json::array()), ConfigError);
  EXPECT_THROW(validate_config({{"kind", "nope"}}), ConfigError);
  json c = small_density();
  c.erase("seed");
  EXPECT_THROW(validate_config(c), ConfigError);
  c = small_density();
  c["shots"] = 0;
  EXPECT_THROW(validate_config(c), ConfigError);
  c = small_density();
  c["model"]["L"] = 30;
  EXPECT_THROW(validate_config(c), ConfigError);
  c = small_density();
  c["model"]["L"] = 12;
  c["model"]["N"] = 6;
  try {
    validate_config(c);
    FAIL() << "oversized config accepted";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("exceeds the limit"), std::string::npos);
  }
  json f = {{"kind", "buffered"},
            {"model", {{"L", 8}, {"N", 3}, {"U", 1.0}}},
            {"beta", 1.0},
            {"region", {2, 3, 4}},
            {"site", 3},
            {"buffers", {0, 3}}};
  EXPECT_THROW(validate_config(f), ConfigError);
  EXPECT_NO_THROW(validate_config({{"kind", "appendix2"}}));
}

TEST(Experiment, IdentityChecks) {
  const json c = {{"kind", "identity_checks"}, {"n", 2}, {"model", {{"L", 2}, {"N", 1}}}};
  const RunResult r = execute_experiment(c, {});
  EXPECT_LT(r.manifest["results"]["max_deviation"].get<double>(), 1e-9);
  ASSERT_EQ(r.files.size(), 2u);
  EXPECT_EQ(r.files[0].name, "identity_checks.csv");
  EXPECT_EQ(r.files[1].name, "identity_checks.manifest.json");
}

TEST(Experiment, FermionIdentityChecks) {
  const json c = {{"kind", "identity_checks"},
                  {"model", {{"statistics", "fermion"}, {"L", 4}, {"N", 2}, {"U", 0.5}}}};
  const RunResult r = execute_experiment(c, {});
  EXPECT_LT(r.manifest["results"]["max_deviation"].get<double>(), 1e-10);
}

TEST(Experiment, OutputsEmbedHashAndManifestFields) {
  const json c = small_density();
  const RunResult r = execute_experiment(c, {});
  const std::string hash = config_hash(c);
  EXPECT_EQ(csv_of(r).rfind("# config_hash: " + hash + "\n", 0), 0u);
  EXPECT_EQ(r.manifest["config_hash"], hash);
  EXPECT_EQ(r.manifest["config"], c);
  EXPECT_EQ(r.manifest["seed"], 7);
  for (const char* key : {"version", "eigensolver", "wall_time_seconds", "outputs", "workers"}) {
    EXPECT_TRUE(r.manifest.contains(key)) << key;
  }
  // One row per site.
  std::istringstream in(csv_of(r));
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) ++lines;
  EXPECT_EQ(lines, 2 + 3);
}

TEST(Experiment, DeterministicAndSeedOverride) {
  const json c = small_density();
  EXPECT_EQ(csv_of(execute_experiment(c, {})), csv_of(execute_experiment(c, {})));
  RunOptions o;
  o.seed_override = 8;
  const RunResult other = execute_experiment(c, o);
  EXPECT_NE(csv_of(other), csv_of(execute_experiment(c, {})));
  EXPECT_EQ(other.manifest["seed"], 8);
}

TEST(Experiment, Appendix2GridShape) {
  // Full default grid is covered by the acceptance suite; a reduced chain
  // keeps the row count logic under unit test.
  const json c = {{"kind", "correlator_study"},
                  {"model", {{"L", 8}, {"N", 2}, {"U", 3.0}, {"boundary", "periodic"}}},
                  {"temperatures", {1.0, 0.5, 0.25, 0.2, 0.1}},
                  {"max_distance", 4}};
  std::istringstream in(csv_of(execute_experiment(c, {})));
  std::string line;
  int rows = -2;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 5 * 4);
}

TEST(Experiment, OtherKinds) {
  const json model = {{"L", 4}, {"N", 2}, {"U", 4.0}};
  const RunResult d = execute_experiment({{"kind", "distill"}, {"model", model}, {"beta", 0.5}, {"iterations", 12}}, {});
  EXPECT_GT(d.manifest["results"]["final_fidelity"].get<double>(), 0.99);
  const RunResult a = execute_experiment(
      {{"kind", "ancilla"}, {"model", model}, {"beta", 0.5}, {"site", 1}, {"shots", 20000}, {"seed", 1}}, {});
  EXPECT_GT(a.manifest["results"]["p_plus"].get<double>(), 0.5);
  const RunResult b = execute_experiment({{"kind", "buffered"},
                                          {"model", {{"L", 8}, {"N", 3}, {"U", 1.0}}},
                                          {"beta", 1.0},
                                          {"region", {2, 3, 4}},
                                          {"site", 3},
                                          {"buffers", {0, 1, 2}}},
                                         {});
  const auto errs = b.manifest["results"]["errors"];
  EXPECT_LT(errs[2].get<double>(), errs[0].get<double>());
}

TEST(WriteOutputs, StagesAndRenames) {
  const fs::path dir = fs::temp_directory_path() / "vcool_test_write";
  fs::remove_all(dir);
  RunOptions o;
  o.output_dir = dir;
  const auto paths = write_outputs(execute_experiment(small_density(), o), o);
  ASSERT_EQ(paths.size(), 2u);
  for (const auto& p : paths) EXPECT_TRUE(fs::exists(p));
  for (const auto& e : fs::directory_iterator(dir)) {
    EXPECT_EQ(e.path().string().find(".partial"), std::string::npos);
  }
  fs::remove_all(dir);
}

TEST(LoadConfig, Errors) {
  EXPECT_THROW(load_config("/nonexistent/vcool.json"), ConfigError);
  const fs::path p = fs::temp_directory_path() / "vcool_bad.json";
  std::ofstream(p) << "{ \"kind\": ";
  EXPECT_THROW(load_config(p), ConfigError);
  fs::remove(p);
}

}  // namespace
}  // namespace vcool
