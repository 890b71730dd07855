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

#include "vcool/correlator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace vcool {

namespace {

RealVector site_occupations(const FockBasis& basis, int site) {
  if (site < 0 || site >= basis.num_modes()) throw std::out_of_range("site index out of range");
  RealVector n(static_cast<Eigen::Index>(basis.dim()));
  for (std::size_t i = 0; i < basis.dim(); ++i) {
    n[static_cast<Eigen::Index>(i)] = basis.state(i)[static_cast<std::size_t>(site)];
  }
  return n;
}

}  // namespace

CorrelatorTerms unconventional_correlator(const DensityMatrix& rho, int j, int l) {
  const RealVector nj = site_occupations(*rho.basis(), j);
  const RealVector nl = site_occupations(*rho.basis(), l);
  const Matrix& r = rho.matrix();
  CorrelatorTerms out;
  out.missing_provenance = !rho.provenance().has_value();
  const Matrix sq = r * r;
  const double z = sq.trace().real();
  if (!(z > 0.0)) throw std::domain_error("tr{rho^2} vanishes");
  // tr{n_j n_l rho^2}: diagonal observables only need diag(rho^2).
  double first = 0.0;
  for (Eigen::Index i = 0; i < r.rows(); ++i) first += nj[i] * nl[i] * sq(i, i).real();
  // tr{n_j rho n_l rho} = sum_ik nj_i rho_ik nl_k rho_ki
  double second = 0.0;
  for (Eigen::Index i = 0; i < r.rows(); ++i) {
    if (nj[i] == 0.0) continue;
    for (Eigen::Index k = 0; k < r.cols(); ++k) {
      if (nl[k] == 0.0) continue;
      second += nj[i] * nl[k] * (r(i, k) * r(k, i)).real();
    }
  }
  out.first_term = 0.5 * first / z;
  out.second_term = 0.5 * second / z;
  return out;
}

double imaginary_time_correlator(const Operator& h, double beta, int j, int l) {
  if (!(beta > 0.0)) throw std::invalid_argument("imaginary_time_correlator: beta must be > 0");
  const Matrix hd = h.dense();
  if (hermiticity_defect(hd) > 1e-10) {
    throw std::invalid_argument("imaginary_time_correlator: H is not Hermitian");
  }
  const Eigensystem es = eigh(hd);
  const RealVector nj = site_occupations(h.basis(), j);
  const RealVector nl = site_occupations(h.basis(), l);
  const Matrix a = es.vectors.adjoint() * nj.cast<Complex>().asDiagonal() * es.vectors;
  const Matrix b = es.vectors.adjoint() * nl.cast<Complex>().asDiagonal() * es.vectors;
  // Shift by the ground energy: e^{beta E_a} e^{-beta E_b} e^{-2 beta E_a}
  // collapses to e^{-beta (E_a + E_b)}.
  const double e0 = es.values.minCoeff();
  const RealVector w = (-beta * (es.values.array() - e0)).exp().matrix();
  const double z2 = w.squaredNorm();
  double acc = 0.0;
  for (Eigen::Index p = 0; p < w.size(); ++p) {
    for (Eigen::Index q = 0; q < w.size(); ++q) {
      acc += w[p] * w[q] * (a(p, q) * b(q, p)).real();
    }
  }
  return 0.5 * acc / z2;
}

double CorrelatorTable::range(double t_over_j, bool second) const {
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& row : rows) {
    if (row.t_over_j != t_over_j) continue;
    const double v = second ? row.second_term : row.first_term;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (lo > hi) throw std::out_of_range("no rows at this temperature");
  return hi - lo;
}

std::string CorrelatorTable::csv_header() { return "T_over_J,d,first_term,second_term,total"; }

CorrelatorTable appendix2_study(const CorrelatorStudyParams& params) {
  const auto start = std::chrono::steady_clock::now();
  if (params.max_distance < 1 || params.max_distance >= params.L) {
    throw std::invalid_argument("appendix2_study: max_distance must lie in [1, L-1]");
  }
  const std::uint64_t dim = binomial(params.N + params.L - 1, params.N);
  if (dim > params.max_dim) {
    throw std::invalid_argument("appendix2_study: basis dimension " + std::to_string(dim) +
                                " exceeds the limit " + std::to_string(params.max_dim));
  }
  const BasisPtr basis = enumerate_basis(Statistics::boson, params.L, Sector::fixed(params.N));
  ModelParams mp;
  mp.L = params.L;
  mp.J = params.J;
  mp.U = params.U;
  mp.boundary = params.boundary;
  const Operator h = bose_hubbard(basis, mp);
  // Bose-Hubbard matrix elements are real: use the real symmetric path.
  const RealMatrix hr = h.dense().real();
  const RealEigensystem es = eigh(hr);
  const double e0 = es.values.minCoeff();

  std::vector<RealVector> occ;
  for (int d = 0; d <= params.max_distance; ++d) occ.push_back(site_occupations(*basis, d));

  CorrelatorTable table;
  table.params = params;
  table.basis_dim = basis->dim();
  for (double t : params.temperatures) {
    if (!(t > 0.0)) throw std::invalid_argument("appendix2_study: temperatures must be positive");
    const double beta = 1.0 / t;
    const RealVector w = (-beta * (es.values.array() - e0)).exp().matrix();
    const double z2 = w.squaredNorm();
    // M = e^{-beta (H - E0)} = X X^T with X = V diag(sqrt w).
    const RealMatrix x = es.vectors * w.cwiseSqrt().asDiagonal();
    RealMatrix m = RealMatrix::Zero(hr.rows(), hr.cols());
    m.selfadjointView<Eigen::Lower>().rankUpdate(x);
    m.triangularView<Eigen::StrictlyUpper>() = m.transpose();
    // diag(M^2) for the equal-time term.
    const RealVector m2_diag = (es.vectors.array().square().matrix()) * w.cwiseAbs2();
    const RealVector m_sq_n0 = m.cwiseAbs2() * occ[0];
    for (int d = 1; d <= params.max_distance; ++d) {
      CorrelatorRow row;
      row.t_over_j = t;
      row.d = d;
      row.first_term = 0.5 * occ[0].cwiseProduct(occ[static_cast<std::size_t>(d)]).dot(m2_diag) / z2;
      row.second_term = 0.5 * occ[static_cast<std::size_t>(d)].dot(m_sq_n0) / z2;
      row.total = row.first_term + row.second_term;
      table.rows.push_back(row);
    }
  }
  table.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return table;
}

}  // namespace vcool
