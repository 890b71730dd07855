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

#ifndef VCOOL_EXPERIMENT_HPP
#define VCOOL_EXPERIMENT_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace vcool {

// Configuration problem detected before any computation or output.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunOptions {
  std::filesystem::path output_dir = ".";
  int workers = 1;
  std::optional<std::uint64_t> seed_override;
};

struct OutputFile {
  std::string name;
  std::string contents;
};

struct RunResult {
  std::vector<OutputFile> files;  // CSV data, then the manifest
  nlohmann::json manifest;
};

// Reads a JSON config; throws ConfigError on I/O or syntax problems.
nlohmann::json load_config(const std::filesystem::path& path);

// FNV-1a 64 of the canonical (sorted-key, compact) serialization, as hex.
std::string config_hash(const nlohmann::json& config);

// Checks kind-specific fields; throws ConfigError with the offending key.
void validate_config(const nlohmann::json& config);

// Runs the experiment entirely in memory. Nothing is written.
RunResult execute_experiment(nlohmann::json config, const RunOptions& options);

// Writes the results of execute_experiment into options.output_dir. Files
// are staged under temporary names and renamed once all are written.
std::vector<std::filesystem::path> write_outputs(const RunResult& result,
                                                 const RunOptions& options);

// Kinds understood by execute_experiment.
const std::vector<std::string>& experiment_kinds();

}  // namespace vcool

#endif  // VCOOL_EXPERIMENT_HPP
