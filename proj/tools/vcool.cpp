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

// vcool: run virtual-cooling experiments from JSON configs, or the
// acceptance suite.

#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <thread>

#include "vcool/acceptance.hpp"
#include "vcool/experiment.hpp"

namespace {

int default_workers() {
  return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

int cmd_run(const std::string& config_path, const vcool::RunOptions& options) {
  try {
    const nlohmann::json config = vcool::load_config(config_path);
    const vcool::RunResult result = vcool::execute_experiment(config, options);
    for (const auto& path : vcool::write_outputs(result, options)) {
      std::cout << path.string() << "\n";
    }
    return 0;
  } catch (const vcool::ConfigError& e) {
    std::cerr << "vcool: config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "vcool: " << e.what() << "\n";
    return 1;
  }
}

int cmd_verify(const vcool::AcceptanceOptions& options) {
  for (int id : options.only) {
    if (id < 1 || id > vcool::criterion_count()) {
      std::cerr << "vcool: no criterion " << id << "\n";
      return 2;
    }
  }
  if (!options.mutate.empty() && options.mutate != "swap") {
    std::cerr << "vcool: unknown mutation '" << options.mutate << "'\n";
    return 2;
  }
  int failed = 0;
  vcool::run_acceptance(options, [&](const vcool::CriterionResult& r) {
    std::cout << vcool::format_result(r) << std::endl;
    failed += !r.passed;
  });
  return failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Virtual cooling of quantum many-body states"};
  app.require_subcommand(1);

  int workers = default_workers();
  app.add_option("--workers", workers, "Worker threads for sampling")
      ->check(CLI::PositiveNumber);

  auto* run = app.add_subcommand("run", "Run the experiment described by a JSON config");
  std::string config_path;
  std::string output_dir = ".";
  std::uint64_t seed = 0;
  run->add_option("config", config_path, "JSON config file")->required();
  run->add_option("-o,--output", output_dir, "Output directory");
  auto* seed_opt = run->add_option("--seed", seed, "Override the config seed");
  run->add_option("--workers", workers, "Worker threads for sampling")
      ->check(CLI::PositiveNumber);

  auto* verify = app.add_subcommand("verify", "Run the acceptance criteria");
  vcool::AcceptanceOptions acc;
  verify->add_option("--only", acc.only, "Criterion ids to run (default: all)")->delimiter(',');
  verify->add_option("--mutate", acc.mutate, "Inject a known defect (swap)");
  verify->add_option("--workers", workers, "Worker threads for sampling")
      ->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  if (*run) {
    vcool::RunOptions options;
    options.output_dir = output_dir;
    options.workers = workers;
    if (*seed_opt) options.seed_override = seed;
    return cmd_run(config_path, options);
  }
  acc.workers = workers;
  return cmd_verify(acc);
}
