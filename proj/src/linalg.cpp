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

#include "vcool/linalg.hpp"

#include <lapacke.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>
#include <string>

namespace vcool {

namespace {

// Some optimized LAPACK/BLAS builds pick kernels at load time that return
// garbage on hosts with partially virtualized vector units. Check a small
// problem once and fall back to Eigen's solver if the library is off.
bool lapack_selftest() {
  const int n = 160;
  RealMatrix a(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i <= j; ++i) {
      a(i, j) = a(j, i) = std::sin(0.37 * (i + 1) * (j + 2)) + (i == j ? 0.1 * i : 0.0);
    }
  }
  RealMatrix v = a;
  RealVector w(n);
  if (LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, v.data(), n, w.data()) != 0) return false;
  const double residual = (a * v - v * w.asDiagonal()).cwiseAbs().maxCoeff();
  const double orth = (v.transpose() * v - RealMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
  if (!(residual < 1e-9 * (1.0 + a.cwiseAbs().maxCoeff()) && orth < 1e-9)) return false;

  Matrix c(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < j; ++i) {
      c(i, j) = Complex(a(i, j), std::cos(0.11 * (i + 3) * (j + 1)));
      c(j, i) = std::conj(c(i, j));
    }
    c(j, j) = a(j, j);
  }
  Matrix u = c;
  if (LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', n, reinterpret_cast<lapack_complex_double*>(u.data()),
                     n, w.data()) != 0) {
    return false;
  }
  const double zres = (c * u - u * w.cast<Complex>().asDiagonal()).cwiseAbs().maxCoeff();
  return zres < 1e-9 * (1.0 + c.cwiseAbs().maxCoeff());
}

bool use_lapack() {
  static const bool ok = lapack_selftest();
  return ok;
}

}  // namespace

const char* eigh_backend() { return use_lapack() ? "lapacke" : "eigen"; }

Eigensystem eigh(const Matrix& hermitian) {
  if (hermitian.rows() != hermitian.cols()) {
    throw std::invalid_argument("eigh: matrix is not square");
  }
  const lapack_int n = static_cast<lapack_int>(hermitian.rows());
  Eigensystem out;
  out.values.resize(n);
  if (n == 0) return out;

  // Real input takes the (much cheaper) symmetric path.
  if (is_real(hermitian)) {
    RealEigensystem r = eigh(RealMatrix(hermitian.real()));
    out.values = std::move(r.values);
    out.vectors = r.vectors.cast<Complex>();
    return out;
  }

  if (!use_lapack()) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian);
    if (solver.info() != Eigen::Success) throw std::runtime_error("eigh: Eigen solver failed");
    out.values = solver.eigenvalues();
    out.vectors = solver.eigenvectors();
    return out;
  }
  out.vectors = hermitian;
  const lapack_int info = LAPACKE_zheevd(
      LAPACK_COL_MAJOR, 'V', 'L', n,
      reinterpret_cast<lapack_complex_double*>(out.vectors.data()), n,
      out.values.data());
  if (info != 0) {
    throw std::runtime_error("eigh: zheevd failed, info=" + std::to_string(info));
  }
  return out;
}

RealEigensystem eigh(const RealMatrix& symmetric) {
  if (symmetric.rows() != symmetric.cols()) {
    throw std::invalid_argument("eigh: matrix is not square");
  }
  const lapack_int n = static_cast<lapack_int>(symmetric.rows());
  RealEigensystem out;
  out.values.resize(n);
  if (n == 0) return out;
  if (!use_lapack()) {
    Eigen::SelfAdjointEigenSolver<RealMatrix> solver(symmetric);
    if (solver.info() != Eigen::Success) throw std::runtime_error("eigh: Eigen solver failed");
    out.values = solver.eigenvalues();
    out.vectors = solver.eigenvectors();
    return out;
  }
  out.vectors = symmetric;
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n,
                                         out.vectors.data(), n, out.values.data());
  if (info != 0) {
    throw std::runtime_error("eigh: dsyevd failed, info=" + std::to_string(info));
  }
  return out;
}

bool is_real(const Matrix& m, double tol) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (std::abs(m(i, j).imag()) > tol) return false;
    }
  }
  return true;
}

double hermiticity_defect(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double trace_norm(const Matrix& hermitian) {
  const Eigensystem es = eigh(hermitian);
  return es.values.cwiseAbs().sum();
}

}  // namespace vcool
