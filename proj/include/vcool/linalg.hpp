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

#ifndef VCOOL_LINALG_HPP
#define VCOOL_LINALG_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <complex>

namespace vcool {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<Complex>;

// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
struct Eigensystem {
  RealVector values;
  Matrix vectors;
};

struct RealEigensystem {
  RealVector values;
  RealMatrix vectors;
};

// Hermitian eigendecomposition, ascending eigenvalues. Uses LAPACK when a
// one-time self-test passes, Eigen otherwise.
Eigensystem eigh(const Matrix& hermitian);
RealEigensystem eigh(const RealMatrix& symmetric);

// "lapacke" or "eigen".
const char* eigh_backend();

// Returns true when every imaginary part is below tol.
bool is_real(const Matrix& m, double tol = 0.0);

double hermiticity_defect(const Matrix& m);

// Trace norm of a Hermitian matrix, via its spectrum.
double trace_norm(const Matrix& hermitian);

// Evaluates f on the spectrum of a Hermitian matrix: V f(D) V^dagger.
template <typename F>
Matrix spectral_map(const Eigensystem& es, F&& f) {
  RealVector fv(es.values.size());
  for (Eigen::Index k = 0; k < es.values.size(); ++k) fv(k) = f(es.values(k));
  return es.vectors * fv.asDiagonal() * es.vectors.adjoint();
}

}  // namespace vcool

#endif  // VCOOL_LINALG_HPP
