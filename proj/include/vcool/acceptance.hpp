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

#ifndef VCOOL_ACCEPTANCE_HPP
#define VCOOL_ACCEPTANCE_HPP

#include <functional>
#include <string>
#include <vector>

namespace vcool {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  std::vector<int> only;  // empty: all criteria
  // Deliberate defect injected to prove the suite can fail. Known: "swap"
  // (compares S_n against F R F^dag instead of F^dag R F).
  std::string mutate;
  int workers = 1;
};

// One line per criterion: "[PASS] 3 master-oracle ... (12.3 s): detail".
std::string format_result(const CriterionResult& r);

int criterion_count();

// Runs the selected criteria in id order. `on_result` is called after each.
std::vector<CriterionResult> run_acceptance(
    const AcceptanceOptions& options,
    const std::function<void(const CriterionResult&)>& on_result = {});

}  // namespace vcool

#endif  // VCOOL_ACCEPTANCE_HPP
