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

#ifndef VCOOL_QUENCH_HPP
#define VCOOL_QUENCH_HPP

#include <string>
#include <vector>

#include "vcool/model.hpp"
#include "vcool/protocol.hpp"
#include "vcool/thermal.hpp"

namespace vcool {

// Unit vector on the basis state with the given occupations.
Vector product_state(const BasisPtr& basis, const OccupationVector& pattern);

// e^{-iHt} psi: dense eigendecomposition up to kSparseThreshold, Lanczos
// (Krylov) above.
Vector evolve(const Operator& h, double t, const Vector& psi);
Vector krylov_evolve(const Operator& h, double t, const Vector& psi, int krylov_dim = 40,
                     double tol = 1e-12);

// Reuses one eigendecomposition for many times.
class Propagator {
 public:
  explicit Propagator(const Operator& h);
  Vector evolve(double t, const Vector& psi) const;

 private:
  Eigensystem es_;
};

DensityMatrix subsystem_rdm(const BasisPtr& basis, const Vector& psi, const std::vector<int>& sites);

struct ThermalizationReport {
  std::vector<double> times;
  std::vector<double> renyi2;
  double entropy_bound = 0.0;  // log of the subsystem dimension
  bool saturated = false;      // last two values within 5% relative
};

ThermalizationReport thermalization_diagnostic(const BasisPtr& basis,
                                               const std::vector<Vector>& states,
                                               const std::vector<double>& times,
                                               const std::vector<int>& sites);

struct QuenchConfig {
  std::string label = "A";
  int L = 6;
  OccupationVector pattern{1, 1, 1, 1, 1, 1};
  double U = 1.56;  // in units of J
  double J = 1.0;
  Boundary boundary = Boundary::open;
  std::vector<double> times{1.0, 1.4, 2.2, 4.3, 5.1, 6.4, 8.4};  // hbar/J
  std::vector<int> fit_sites{1, 2, 3, 4};  // region of interest, zero-based
  std::vector<int> entropy_sites{0, 1, 2};  // half chain, for the saturation check
  std::size_t shots = 100000;        // per evolution time
  std::uint64_t seed = 1;
  int workers = 1;
  std::size_t max_joint_dim = 4000000;
  std::size_t max_fit_dim = 4000;  // largest fit-region basis tried
  bool sampled = true;  // false: exact single-copy quantities only
};

// Presets "A", "B", "C" for the three experimental regimes.
QuenchConfig quench_preset(const std::string& label);

struct Fig2SiteRow {
  int site = 0;
  double raw_density = 0.0;       // tr{n_j rho_j}
  double vc_estimate = 0.0;       // sampled, time-averaged
  double vc_se = 0.0;
  double vc_exact = 0.0;          // tr{n_j rho_j^2}/tr{rho_j^2}, time-averaged
  double halfT_prediction = 0.0;  // fitted ensemble at doubled beta
};

struct Fig2Report {
  QuenchConfig config;
  std::vector<Fig2SiteRow> rows;  // non-edge sites
  FitResult fit;                  // effective (beta, mu) of the fit subsystem
  int fit_particle_cap = 0;       // particle cutoff of the final fit basis
  ThermalizationReport thermalization;
  std::size_t joint_dim = 0;
  double raw_average = 0.0;
  double vc_average = 0.0;
  double vc_average_se = 0.0;
  double halfT_average = 0.0;

  static std::string csv_header();
};

// The effective ensemble is grand canonical on the fit region (an open
// sub-chain, particle cutoff raised until the fit converges), matched to the
// energy and particle number that the initial state holds in that region.
// The half-temperature prediction is that ensemble squared.
Fig2Report fig2_experiment(const QuenchConfig& config);

}  // namespace vcool

#endif  // VCOOL_QUENCH_HPP
