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

#include "vcool/thermal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace vcool {

DensityMatrix::DensityMatrix(BasisPtr basis, Matrix matrix, std::optional<Provenance> provenance)
    : basis_(std::move(basis)), matrix_(std::move(matrix)), provenance_(std::move(provenance)) {
  if (!basis_) throw std::invalid_argument("DensityMatrix: null basis");
  if (matrix_.rows() != matrix_.cols() ||
      static_cast<std::size_t>(matrix_.rows()) != basis_->dim()) {
    throw std::invalid_argument("DensityMatrix: matrix does not match basis dimension " +
                                std::to_string(basis_->dim()));
  }
}

void DensityMatrix::validate(double tol) const {
  const Complex tr = matrix_.trace();
  if (std::abs(tr - Complex(1.0, 0.0)) > tol) {
    throw std::logic_error("DensityMatrix: trace " + std::to_string(tr.real()) + " != 1");
  }
  if (hermiticity_defect(matrix_) > tol) {
    throw std::logic_error("DensityMatrix: not Hermitian");
  }
  const Eigensystem es = eigh(Matrix(0.5 * (matrix_ + matrix_.adjoint())));
  if (es.values.size() && es.values.minCoeff() < -tol) {
    throw std::logic_error("DensityMatrix: negative eigenvalue " +
                           std::to_string(es.values.minCoeff()));
  }
}

double expectation(const DensityMatrix& rho, const Matrix& x) {
  // tr{X rho} = sum_ij X_ij rho_ji
  return (x.cwiseProduct(rho.matrix().transpose())).sum().real();
}

double expectation(const DensityMatrix& rho, const Operator& x) {
  if (!x.is_square() || !x.basis().same_space(*rho.basis())) {
    throw std::invalid_argument("expectation: operator and state live on different bases");
  }
  if (!x.is_sparse()) return expectation(rho, x.dense());
  const SparseMatrix s = x.sparse();
  Complex acc = 0.0;
  for (Eigen::Index k = 0; k < s.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(s, k); it; ++it) {
      acc += it.value() * rho.matrix()(it.col(), it.row());
    }
  }
  return acc.real();
}

namespace {

void require_hermitian(const Matrix& h, const char* what) {
  const double defect = hermiticity_defect(h);
  if (defect > 1e-10) {
    throw std::invalid_argument(std::string(what) + ": Hamiltonian is not Hermitian (defect " +
                                std::to_string(defect) + ")");
  }
}

// Boltzmann weights exp(-x_k) normalized, shifted by min x for overflow safety.
RealVector boltzmann(const RealVector& x) {
  if (x.size() == 0) return x;
  const double shift = x.minCoeff();
  RealVector w = (-(x.array() - shift)).exp().matrix();
  return w / w.sum();
}

Matrix reconstruct(const Matrix& vectors, const RealVector& weights) {
  return vectors * weights.cast<Complex>().asDiagonal() * vectors.adjoint();
}

}  // namespace

DensityMatrix thermal_state(const Operator& h, double beta) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw std::invalid_argument("thermal_state: beta must be finite and >= 0");
  }
  const Matrix hd = h.dense();
  require_hermitian(hd, "thermal_state");
  const Eigensystem es = eigh(hd);
  Provenance prov;
  prov.beta = beta;
  return DensityMatrix(h.basis_ptr(), reconstruct(es.vectors, boltzmann(beta * es.values)),
                       prov);
}

NumberResolvedSpectrum number_resolved_spectrum(const Operator& h, const Operator& n_op) {
  if (!n_op.basis().same_space(h.basis())) {
    throw std::invalid_argument("number_resolved_spectrum: H and N on different bases");
  }
  if (n_op.off_diagonal_max() > 1e-12) {
    throw std::invalid_argument("number_resolved_spectrum: N must be number-diagonal");
  }
  const Matrix hd = h.dense();
  require_hermitian(hd, "number_resolved_spectrum");
  const RealVector nd = n_op.real_diagonal();

  std::map<long, std::vector<Eigen::Index>> sectors;
  for (Eigen::Index i = 0; i < nd.size(); ++i) sectors[std::lround(nd(i))].push_back(i);

  // Commutation: H must not connect different N labels.
  for (Eigen::Index j = 0; j < hd.cols(); ++j) {
    for (Eigen::Index i = 0; i < hd.rows(); ++i) {
      if (std::lround(nd(i)) != std::lround(nd(j)) && std::abs(hd(i, j)) > 1e-10) {
        throw std::invalid_argument("number_resolved_spectrum: H and N do not commute");
      }
    }
  }

  const Eigen::Index dim = hd.rows();
  NumberResolvedSpectrum out;
  out.energies.resize(dim);
  out.numbers.resize(dim);
  out.vectors = Matrix::Zero(dim, dim);
  Eigen::Index col = 0;
  for (const auto& [n, idx] : sectors) {
    const auto m = static_cast<Eigen::Index>(idx.size());
    Matrix block(m, m);
    for (Eigen::Index a = 0; a < m; ++a) {
      for (Eigen::Index b = 0; b < m; ++b) block(a, b) = hd(idx[a], idx[b]);
    }
    const Eigensystem es = eigh(block);
    for (Eigen::Index k = 0; k < m; ++k, ++col) {
      out.energies(col) = es.values(k);
      out.numbers(col) = static_cast<double>(n);
      for (Eigen::Index a = 0; a < m; ++a) out.vectors(idx[a], col) = es.vectors(a, k);
    }
  }
  return out;
}

DensityMatrix grand_canonical_state(const Operator& h, const Operator& n_op, double beta,
                                    double mu) {
  if (!(beta >= 0.0) || !std::isfinite(beta) || !std::isfinite(mu)) {
    throw std::invalid_argument("grand_canonical_state: beta, mu must be finite, beta >= 0");
  }
  const NumberResolvedSpectrum s = number_resolved_spectrum(h, n_op);
  Provenance prov;
  prov.beta = beta;
  prov.mu = mu;
  prov.grand_canonical = true;
  const RealVector x = beta * (s.energies - mu * s.numbers);
  return DensityMatrix(h.basis_ptr(), reconstruct(s.vectors, boltzmann(x)), prov);
}

DensityMatrix matrix_power_state(const DensityMatrix& rho, int n) {
  if (n < 1) throw std::invalid_argument("matrix_power_state: n must be >= 1");
  if (n == 1) return rho;
  const Eigensystem es = eigh(rho.matrix());
  RealVector p(es.values.size());
  for (Eigen::Index k = 0; k < p.size(); ++k) p(k) = std::pow(std::max(es.values(k), 0.0), n);
  const double z = p.sum();
  if (!(z >= 1e-300)) {
    throw std::domain_error("matrix_power_state: tr{rho^n} numerically vanishes");
  }
  std::optional<Provenance> prov = rho.provenance();
  if (prov) prov->beta *= n;
  return DensityMatrix(rho.basis(), reconstruct(es.vectors, p / z), prov);
}

double purity(const DensityMatrix& rho, int n) {
  if (n < 1) throw std::invalid_argument("purity: n must be >= 1");
  if (n == 1) return rho.matrix().trace().real();
  if (n == 2) return rho.matrix().squaredNorm();
  const Eigensystem es = eigh(rho.matrix());
  double z = 0.0;
  for (Eigen::Index k = 0; k < es.values.size(); ++k) {
    z += std::pow(std::max(es.values(k), 0.0), n);
  }
  return z;
}

double renyi_entropy(const DensityMatrix& rho, int n) {
  if (n < 2) throw std::invalid_argument("renyi_entropy: n must be >= 2");
  return std::log(purity(rho, n)) / (1.0 - n);
}

namespace {

// Moments of exp(-beta H + nu N).
EnsembleMoments moments(const NumberResolvedSpectrum& s, double beta, double nu) {
  const RealVector w = boltzmann(beta * s.energies - nu * s.numbers);
  EnsembleMoments m;
  m.energy = w.dot(s.energies);
  m.number = w.dot(s.numbers);
  const RealVector de = s.energies.array() - m.energy;
  const RealVector dn = s.numbers.array() - m.number;
  m.var_energy = w.dot(de.cwiseProduct(de));
  m.var_number = w.dot(dn.cwiseProduct(dn));
  m.cov = w.dot(de.cwiseProduct(dn));
  return m;
}

}  // namespace

EnsembleMoments grand_canonical_moments(const NumberResolvedSpectrum& s, double beta, double mu) {
  return moments(s, beta, beta * mu);
}

FitResult fit_effective_ensemble(const Operator& h, const Operator& n_op, double energy_target,
                                 double number_target, const FitOptions& options) {
  return fit_effective_ensemble(number_resolved_spectrum(h, n_op), energy_target, number_target,
                                options);
}

FitResult fit_effective_ensemble(const NumberResolvedSpectrum& s, double energy_target,
                                 double number_target, const FitOptions& options) {
  FitResult result;
  const double n_min = s.numbers.minCoeff();
  const double n_max = s.numbers.maxCoeff();
  if (number_target < n_min - 1e-9 || number_target > n_max + 1e-9) {
    result.feasible = false;
    result.message = "number target outside [" + std::to_string(n_min) + ", " +
                     std::to_string(n_max) + "]";
    return result;
  }
  if (energy_target < s.energies.minCoeff()) {
    result.feasible = false;
    result.message = "energy target below the ground energy " +
                     std::to_string(s.energies.minCoeff());
    return result;
  }

  // Newton in (beta, nu = beta mu): the Jacobian stays regular at beta = 0.
  //   d<A>/d beta = -Cov(A, H),  d<A>/d nu = Cov(A, N).
  double beta = options.beta_initial;
  double nu = options.beta_initial * options.mu_initial;
  auto moments_at = [&](double b, double v) { return moments(s, b, v); };
  auto residual = [&](const EnsembleMoments& m) {
    return Eigen::Vector2d(m.energy - energy_target, m.number - number_target);
  };

  EnsembleMoments m = moments_at(beta, nu);
  Eigen::Vector2d r = residual(m);
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    if (std::abs(r(0)) < options.tolerance && std::abs(r(1)) < options.tolerance) {
      result.converged = true;
      break;
    }
    Eigen::Matrix2d jac;
    jac << -m.var_energy, m.cov, -m.cov, m.var_number;
    const Eigen::Vector2d step = jac.completeOrthogonalDecomposition().solve(-r);
    double scale = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 60; ++halving, scale *= 0.5) {
      const double b_try = std::clamp(beta + scale * step(0), 0.0, options.beta_max);
      const double v_try = nu + scale * step(1);
      const EnsembleMoments m_try = moments_at(b_try, v_try);
      const Eigen::Vector2d r_try = residual(m_try);
      if (r_try.norm() < r.norm() || halving == 59) {
        accepted = r_try.norm() < r.norm();
        beta = b_try;
        nu = v_try;
        m = m_try;
        r = r_try;
        break;
      }
    }
    if (!accepted) break;
  }
  result.iterations = it;
  result.beta = beta;
  result.mu = beta > 0.0 ? nu / beta : 0.0;
  result.residual_energy = r(0);
  result.residual_number = r(1);
  if (!result.converged &&
      std::abs(r(0)) < options.tolerance && std::abs(r(1)) < options.tolerance) {
    result.converged = true;
  }
  std::ostringstream msg;
  if (result.converged) {
    msg << "converged in " << it << " iterations";
  } else {
    msg << "not converged after " << it << " iterations; last beta=" << beta
        << " mu=" << result.mu << " residuals (" << r(0) << ", " << r(1) << ")";
    if (beta >= options.beta_max || beta <= 0.0) {
      result.feasible = false;
      msg << "; no solution with beta in (0, " << options.beta_max << "]";
    }
  }
  result.message = msg.str();
  return result;
}

// ---------------------------------------------------------------------------
// Partial trace

BasisPtr subsystem_basis(const FockBasis& parent, int num_sites) {
  if (num_sites < 1 || num_sites > parent.num_modes()) {
    throw std::invalid_argument("subsystem_basis: invalid subsystem size");
  }
  const Sector& sector = parent.sector();
  if (sector.kind() == Sector::Kind::cutoff) {
    return enumerate_basis(parent.statistics(), num_sites, Sector::cutoff(sector.n_max()));
  }
  int max_total = sector.kind() == Sector::Kind::fixed ? sector.particles()
                                                       : sector.allowed().back();
  if (parent.statistics() == Statistics::fermion) max_total = std::min(max_total, num_sites);
  std::vector<int> totals;
  for (int t = 0; t <= max_total; ++t) totals.push_back(t);
  return enumerate_basis(parent.statistics(), num_sites, Sector::totals(totals));
}

namespace {

struct Split {
  std::vector<std::size_t> sub_index;  // per parent state
  std::vector<int> sign;               // per parent state
  std::map<OccupationVector, std::vector<std::size_t>> by_complement;
};

Split split_basis(const FockBasis& parent, const FockBasis& sub, const std::vector<int>& sites) {
  const int M = parent.num_modes();
  std::vector<bool> inside(static_cast<std::size_t>(M), false);
  for (std::size_t k = 0; k < sites.size(); ++k) {
    if (sites[k] < 0 || sites[k] >= M || (k > 0 && sites[k] <= sites[k - 1])) {
      throw std::invalid_argument("reduced_density_matrix: sites must be ascending and in range");
    }
    inside[static_cast<std::size_t>(sites[k])] = true;
  }
  const bool fermion = parent.statistics() == Statistics::fermion;
  Split out;
  out.sub_index.resize(parent.dim());
  out.sign.assign(parent.dim(), 1);
  OccupationVector a(sites.size());
  OccupationVector c;
  for (std::size_t i = 0; i < parent.dim(); ++i) {
    const OccupationSpan s = parent.state(i);
    c.clear();
    int crossings = 0;
    int complement_seen = 0;
    std::size_t k = 0;
    for (int m = 0; m < M; ++m) {
      const Occupation o = s[static_cast<std::size_t>(m)];
      if (inside[static_cast<std::size_t>(m)]) {
        a[k++] = o;
        if (fermion && o) crossings += complement_seen;
      } else {
        c.push_back(o);
        complement_seen += o;
      }
    }
    auto idx = sub.index_of(a);
    if (!idx) throw std::logic_error("reduced_density_matrix: subsystem state missing");
    out.sub_index[i] = *idx;
    out.sign[i] = (crossings & 1) ? -1 : 1;
    out.by_complement[c].push_back(i);
  }
  return out;
}

}  // namespace

DensityMatrix reduced_density_matrix(const DensityMatrix& rho, const std::vector<int>& sites) {
  const FockBasis& parent = *rho.basis();
  BasisPtr sub = subsystem_basis(parent, static_cast<int>(sites.size()));
  const Split split = split_basis(parent, *sub, sites);
  const auto d = static_cast<Eigen::Index>(sub->dim());
  Matrix out = Matrix::Zero(d, d);
  const Matrix& r = rho.matrix();
  for (const auto& [c, members] : split.by_complement) {
    for (std::size_t i : members) {
      for (std::size_t j : members) {
        out(static_cast<Eigen::Index>(split.sub_index[i]),
            static_cast<Eigen::Index>(split.sub_index[j])) +=
            static_cast<double>(split.sign[i] * split.sign[j]) *
            r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
    }
  }
  return DensityMatrix(sub, std::move(out));
}

DensityMatrix reduced_density_matrix(const BasisPtr& basis, const Vector& psi,
                                     const std::vector<int>& sites) {
  if (static_cast<std::size_t>(psi.size()) != basis->dim()) {
    throw std::invalid_argument("reduced_density_matrix: vector does not match basis");
  }
  BasisPtr sub = subsystem_basis(*basis, static_cast<int>(sites.size()));
  const Split split = split_basis(*basis, *sub, sites);
  const auto d = static_cast<Eigen::Index>(sub->dim());
  Matrix out = Matrix::Zero(d, d);
  for (const auto& [c, members] : split.by_complement) {
    for (std::size_t i : members) {
      const Complex ai = static_cast<double>(split.sign[i]) * psi(static_cast<Eigen::Index>(i));
      if (ai == Complex(0.0, 0.0)) continue;
      for (std::size_t j : members) {
        out(static_cast<Eigen::Index>(split.sub_index[i]),
            static_cast<Eigen::Index>(split.sub_index[j])) +=
            ai * std::conj(static_cast<double>(split.sign[j]) * psi(static_cast<Eigen::Index>(j)));
      }
    }
  }
  return DensityMatrix(sub, std::move(out));
}

}  // namespace vcool
