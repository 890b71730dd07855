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

#ifndef VCOOL_THERMAL_HPP
#define VCOOL_THERMAL_HPP

#include <optional>
#include <string>
#include <vector>

#include "vcool/fock.hpp"

namespace vcool {

// Where a thermal density matrix came from. beta in 1/J, mu in J.
struct Provenance {
  double beta = 0.0;
  double mu = 0.0;
  bool grand_canonical = false;
  std::string source;  // free-form Hamiltonian label
};

class DensityMatrix {
 public:
  DensityMatrix(BasisPtr basis, Matrix matrix, std::optional<Provenance> provenance = {});

  const BasisPtr& basis() const { return basis_; }
  const Matrix& matrix() const { return matrix_; }
  Eigen::Index dim() const { return matrix_.rows(); }
  const std::optional<Provenance>& provenance() const { return provenance_; }

  // Throws std::logic_error unless trace 1, Hermitian and PSD within tol.
  void validate(double tol = 1e-10) const;

 private:
  BasisPtr basis_;
  Matrix matrix_;
  std::optional<Provenance> provenance_;
};

// tr{X rho}, real part (X is expected Hermitian).
double expectation(const DensityMatrix& rho, const Operator& x);
double expectation(const DensityMatrix& rho, const Matrix& x);

DensityMatrix thermal_state(const Operator& h, double beta);

// rho ~ exp(-beta (H - mu N)); N must be number-diagonal and commute with H.
DensityMatrix grand_canonical_state(const Operator& h, const Operator& n_op, double beta,
                                    double mu);

// rho^n / tr{rho^n}; thermal provenance beta becomes n * beta.
DensityMatrix matrix_power_state(const DensityMatrix& rho, int n);

double purity(const DensityMatrix& rho, int n = 2);
double renyi_entropy(const DensityMatrix& rho, int n = 2);

// Eigenpairs of H labelled by particle number; H is diagonalized block by
// block over the number sectors of a number-diagonal N.
struct NumberResolvedSpectrum {
  RealVector energies;
  RealVector numbers;
  Matrix vectors;  // columns in the basis of H
};

NumberResolvedSpectrum number_resolved_spectrum(const Operator& h, const Operator& n_op);

struct EnsembleMoments {
  double energy = 0.0;
  double number = 0.0;
  double var_energy = 0.0;
  double var_number = 0.0;
  double cov = 0.0;
};

EnsembleMoments grand_canonical_moments(const NumberResolvedSpectrum& spectrum, double beta,
                                        double mu);

struct FitOptions {
  double beta_initial = 1.0;
  double mu_initial = 0.0;
  double beta_max = 1e3;
  double tolerance = 1e-8;
  int max_iterations = 200;
};

struct FitResult {
  double beta = 0.0;
  double mu = 0.0;
  double residual_energy = 0.0;
  double residual_number = 0.0;
  int iterations = 0;
  bool converged = false;
  bool feasible = true;
  std::string message;
};

FitResult fit_effective_ensemble(const Operator& h, const Operator& n_op, double energy_target,
                                 double number_target, const FitOptions& options = {});
FitResult fit_effective_ensemble(const NumberResolvedSpectrum& spectrum, double energy_target,
                                 double number_target, const FitOptions& options = {});

// Subsystem basis for `sites` of a single-copy basis: the same statistics on
// |sites| modes, carrying every particle number the parent can place there.
BasisPtr subsystem_basis(const FockBasis& parent, int num_sites);

// Partial trace over the complement of `sites` (ascending, distinct). For
// fermions each term carries the sign of moving the subsystem modes to the
// front of the mode order.
DensityMatrix reduced_density_matrix(const DensityMatrix& rho, const std::vector<int>& sites);
DensityMatrix reduced_density_matrix(const BasisPtr& basis, const Vector& psi,
                                     const std::vector<int>& sites);

}  // namespace vcool

#endif  // VCOOL_THERMAL_HPP
