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

// Prints one PASS/FAIL line per acceptance criterion; exits nonzero if any
// criterion fails. Optional arguments restrict the run to those ids.

#include <cstdlib>
#include <iostream>
#include <string>

#include "vcool/acceptance.hpp"

int main(int argc, char** argv) {
  vcool::AcceptanceOptions options;
  for (int i = 1; i < argc; ++i) options.only.push_back(std::atoi(argv[i]));
  int failed = 0;
  int ran = 0;
  vcool::run_acceptance(options, [&](const vcool::CriterionResult& r) {
    std::cout << vcool::format_result(r) << std::endl;
    failed += !r.passed;
    ++ran;
  });
  std::cout << (ran - failed) << "/" << ran << " criteria passed" << std::endl;
  return failed ? 1 : 0;
}
