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

#ifndef VCOOL_PROTOCOL_HPP
#define VCOOL_PROTOCOL_HPP

#include <optional>
#include <string>
#include <vector>

#include "vcool/replica.hpp"
#include "vcool/sampling.hpp"
#include "vcool/thermal.hpp"

namespace vcool {

// tr{X rho^n} / tr{rho^n} by dense algebra.
double virtual_expectation_exact(const DensityMatrix& rho, const Matrix& x, int n);
double virtual_expectation_exact(const DensityMatrix& rho, const Operator& x, int n);

// One projective number measurement of all copies after the inter-copy
// transform.
struct ShotRecord {
  OccupationVector occupations;  // joint modes, copy-major
  Complex r_value;               // R_n (bosons) or V (fermions) eigenvalue
  double x_value = 0.0;
  double weight = 1.0;
};

// Outcome distribution of the transformed state U rho^{(x)n} U^dagger in the
// joint number basis, with U = F_n (bosons) or the two-copy fermionic
// transform.
struct OutcomeDistribution {
  ReplicaPtr replica;
  RealVector probabilities;  // joint-basis index -> probability
};

OutcomeDistribution transformed_outcomes(const ReplicaPtr& replica, const DensityMatrix& rho);
// Pure copies |psi>^{(x)n}, transformed without building F (bosons only).
OutcomeDistribution transformed_outcomes(const ReplicaPtr& replica, const Vector& psi);

// How the per-outcome observable value is obtained.
enum class OutcomeValue {
  // Number-diagonal part of U X_s U^dagger: x(m) = sum_a |U_ma|^2 X_s(a).
  // Always valid; needs the transform matrix.
  transformed_diagonal,
  // X_s evaluated on the outcome occupations. Equal to the above only when
  // X_s commutes with the transform (single-site densities, site totals).
  occupation_average,
};

// Per-outcome values of X_s for a number-diagonal single-copy X.
RealVector outcome_values(const ReplicaPtr& replica, const OccupationFunction& x_single,
                          OutcomeValue mode = OutcomeValue::transformed_diagonal);
// Per-outcome phase; `sites` restricts R_n to a region (bosons only).
Vector outcome_phases(const ReplicaPtr& replica, std::span<const int> sites = {});

std::vector<ShotRecord> shot_records(const ReplicaPtr& replica,
                                     const std::vector<std::size_t>& outcomes,
                                     const RealVector& x, const Vector& r);

// Converts a number-diagonal operator to a function of occupations; throws
// std::invalid_argument (pointing at the exact estimator) otherwise.
OccupationFunction diagonal_function(const Operator& x, double tol = 1e-12);

struct EstimateOptions {
  std::string observable = "X";
  SamplingOptions sampling;
  OutcomeValue value_mode = OutcomeValue::transformed_diagonal;
  std::vector<int> sites;  // restrict the phase to these sites; empty = all
};

// Ratio estimate of tr{X rho^n}/tr{rho^n} from sampled outcomes (bosons).
EstimateReport interferometric_estimate(const OutcomeDistribution& outcomes,
                                        const OccupationFunction& x_single,
                                        const EstimateOptions& options);
EstimateReport interferometric_estimate(const OutcomeDistribution& outcomes, const Operator& x_single,
                                        const EstimateOptions& options);

// Two-copy fermionic estimate with V as the phase. Rejects observables whose
// transformed symmetrization does not commute with V.
EstimateReport fermionic_estimate(const OutcomeDistribution& outcomes,
                                  const OccupationFunction& x_single,
                                  const EstimateOptions& options);

// ---------------------------------------------------------------------------
// Ancilla-assisted purification

struct AncillaStep {
  DensityMatrix rho1;
  double p_plus = 0.0;
};

// Post-selected state (rho + rho^2)/(1 + tr rho^2), p_plus = (1 + tr rho^2)/2.
AncillaStep ancilla_step(const DensityMatrix& rho);

// Recombines <X>_{rho1} and <X>_rho into <X> at half temperature.
double ancilla_combine(double x_rho1, double x_rho, double p_plus);

// Sampled ancilla protocol for a number-diagonal X. The shared-run design
// takes p_plus and <X>_{rho1} from the same post-selected runs; the
// independent-run design estimates p_plus from a separate batch.
struct AncillaSampledReport {
  double exact = 0.0;
  double estimate_shared = 0.0;
  double se_shared = 0.0;
  double estimate_independent = 0.0;
  double se_independent = 0.0;
  double p_plus_hat = 0.0;
  std::size_t shots = 0;
};

AncillaSampledReport ancilla_sampled_estimate(const DensityMatrix& rho,
                                              const OccupationFunction& x,
                                              const SamplingOptions& sampling);

struct DistillStep {
  DensityMatrix state;
  double p_plus = 0.0;
  double ground_fidelity = 0.0;  // <g|state|g>
  double top_eigenvalue = 0.0;
};

struct DistillResult {
  std::vector<DistillStep> steps;
  bool degenerate = false;  // dominant eigenvalue gap below 1e-12
};

// Iterates ancilla_step. The reference state defaults to the dominant
// eigenvector of rho.
DistillResult distill(const DensityMatrix& rho, int iterations,
                      std::optional<Vector> reference = std::nullopt);

// ---------------------------------------------------------------------------
// Buffered subregions

struct BufferedResult {
  double approx = 0.0;
  double exact = 0.0;
  double error = 0.0;
  std::vector<int> region_b;
};

// X acts on the occupations of region R (ascending contiguous sites). The
// buffer extends R by `buffer` sites on each side.
BufferedResult buffered_estimate(const DensityMatrix& rho_full, const std::vector<int>& region,
                                 int buffer, const OccupationFunction& x_on_region);

// ---------------------------------------------------------------------------
// Shot cost

struct ScalingRow {
  double beta = 0.0;
  int region_size = 0;
  double z2 = 0.0;
  double empirical_shots = 0.0;  // median over repetitions
  double predicted_shots = 0.0;  // (1 - Z2^2) / (eps^2 Z2^2)
};

struct ScalingStudy {
  std::vector<ScalingRow> rows;
  double slope = 0.0;  // d log N / d log(1/Z2^2)
  double intercept = 0.0;
};

struct ScalingOptions {
  double target_precision = 0.1;  // relative stderr of the denominator
  int repetitions = 9;
  std::size_t max_shots = 2000000;
  std::size_t min_shots = 100;
  std::uint64_t seed = 0;
};

// Thermal states of h at each beta; leftmost regions of each size. The
// empirical count is the first shot number at which the sampled denominator
// reaches the target relative precision.
ScalingStudy shots_scaling_study(const Operator& h, const std::vector<double>& betas,
                                 const std::vector<int>& region_sizes,
                                 const ScalingOptions& options);

// Least-squares line through (x_i, y_i).
std::pair<double, double> linear_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace vcool

#endif  // VCOOL_PROTOCOL_HPP
