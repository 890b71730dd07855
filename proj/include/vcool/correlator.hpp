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

#ifndef VCOOL_CORRELATOR_HPP
#define VCOOL_CORRELATOR_HPP

#include <string>
#include <vector>

#include "vcool/model.hpp"
#include "vcool/thermal.hpp"

namespace vcool {

// The density-density combination measured by the two-copy protocol,
// C(j, l) = first_term + second_term with
//   first_term  = 1/2 tr{n_j n_l rho^2} / tr{rho^2}
//   second_term = 1/2 tr{n_j rho n_l rho} / tr{rho^2}.
struct CorrelatorTerms {
  double first_term = 0.0;
  double second_term = 0.0;
  bool missing_provenance = false;  // rho carried no thermal provenance
  double total() const { return first_term + second_term; }
};

CorrelatorTerms unconventional_correlator(const DensityMatrix& rho, int j, int l);

// 1/2 tr{n_j(beta) n_l rho(2 beta)} with n_j(tau) = e^{H tau} n_j e^{-H tau},
// evaluated in the eigenbasis of H.
double imaginary_time_correlator(const Operator& h, double beta, int j, int l);

struct CorrelatorRow {
  double t_over_j = 0.0;
  int d = 0;
  double first_term = 0.0;
  double second_term = 0.0;
  double total = 0.0;
};

struct CorrelatorStudyParams {
  int L = 16;
  int N = 4;
  double U = 3.0;
  double J = 1.0;
  Boundary boundary = Boundary::periodic;
  std::vector<double> temperatures{1.0, 0.5, 0.25, 0.2, 0.1};  // T/J
  int max_distance = 8;
  std::size_t max_dim = 20000;
};

struct CorrelatorTable {
  CorrelatorStudyParams params;
  std::vector<CorrelatorRow> rows;  // temperature-major, d ascending
  std::size_t basis_dim = 0;
  double runtime_seconds = 0.0;

  // max - min over d of a column at one temperature.
  double range(double t_over_j, bool second) const;
  static std::string csv_header();
};

// Exact terms of C(0, d) for a Bose-Hubbard chain over a temperature grid.
CorrelatorTable appendix2_study(const CorrelatorStudyParams& params = {});

}  // namespace vcool

#endif  // VCOOL_CORRELATOR_HPP
