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

#include "vcool/quench.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>

namespace vcool {

Vector product_state(const BasisPtr& basis, const OccupationVector& pattern) {
  if (static_cast<int>(pattern.size()) != basis->num_modes()) {
    throw std::invalid_argument("product_state: pattern length differs from the mode count");
  }
  auto idx = basis->index_of(pattern);
  if (!idx) throw std::invalid_argument("product_state: pattern lies outside the basis sector");
  Vector psi = Vector::Zero(static_cast<Eigen::Index>(basis->dim()));
  psi(static_cast<Eigen::Index>(*idx)) = 1.0;
  return psi;
}

Propagator::Propagator(const Operator& h) : es_(eigh(h.dense())) {}

Vector Propagator::evolve(double t, const Vector& psi) const {
  if (t < 0.0) throw std::invalid_argument("evolve: t must be >= 0");
  Vector c = es_.vectors.adjoint() * psi;
  for (Eigen::Index k = 0; k < c.size(); ++k) c[k] *= std::polar(1.0, -es_.values[k] * t);
  return es_.vectors * c;
}

Vector krylov_evolve(const Operator& h, double t, const Vector& psi, int krylov_dim, double tol) {
  if (t < 0.0) throw std::invalid_argument("evolve: t must be >= 0");
  if (t == 0.0) return psi;
  const SparseMatrix hs = h.sparse();
  // Row-sum bound on ||H|| sets the substep so each Lanczos step spans a
  // phase of at most ~ krylov_dim / 4.
  double norm = 0.0;
  {
    RealVector rows = RealVector::Zero(hs.rows());
    for (int c = 0; c < hs.outerSize(); ++c) {
      for (SparseMatrix::InnerIterator it(hs, c); it; ++it) rows[it.row()] += std::abs(it.value());
    }
    norm = rows.size() ? rows.maxCoeff() : 0.0;
  }
  const int m_max = std::max(2, krylov_dim);
  const double dt_max = norm > 0 ? 0.25 * m_max / norm : t;
  const int steps = std::max(1, static_cast<int>(std::ceil(t / dt_max)));
  const double dt = t / steps;

  Vector v = psi;
  for (int s = 0; s < steps; ++s) {
    const double beta0 = v.norm();
    if (beta0 == 0.0) return v;
    std::vector<Vector> q{v / beta0};
    std::vector<double> alpha, beta;
    for (int j = 0; j < m_max; ++j) {
      Vector w = hs * q.back();
      const double a = q.back().dot(w).real();
      w -= a * q.back();
      if (j > 0) w -= beta.back() * q[q.size() - 2];
      // Full reorthogonalization keeps the small basis numerically clean.
      for (const Vector& qk : q) w -= qk.dot(w) * qk;
      alpha.push_back(a);
      const double b = w.norm();
      if (b < tol || j == m_max - 1) break;
      beta.push_back(b);
      q.push_back(w / b);
    }
    const auto m = static_cast<Eigen::Index>(alpha.size());
    RealMatrix tri = RealMatrix::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      tri(i, i) = alpha[static_cast<std::size_t>(i)];
      if (i + 1 < m) tri(i, i + 1) = tri(i + 1, i) = beta[static_cast<std::size_t>(i)];
    }
    Eigen::SelfAdjointEigenSolver<RealMatrix> small(tri);
    Vector coeff(m);
    for (Eigen::Index k = 0; k < m; ++k) {
      coeff[k] = std::polar(1.0, -small.eigenvalues()[k] * dt) * small.eigenvectors()(0, k);
    }
    const Vector y = small.eigenvectors().cast<Complex>() * coeff;
    Vector next = Vector::Zero(v.size());
    for (Eigen::Index k = 0; k < m; ++k) next += y[k] * q[static_cast<std::size_t>(k)];
    v = beta0 * next;
  }
  return v;
}

Vector evolve(const Operator& h, double t, const Vector& psi) {
  if (t < 0.0) throw std::invalid_argument("evolve: t must be >= 0");
  if (h.basis().dim() <= kSparseThreshold) return Propagator(h).evolve(t, psi);
  return krylov_evolve(h, t, psi);
}

DensityMatrix subsystem_rdm(const BasisPtr& basis, const Vector& psi, const std::vector<int>& sites) {
  return reduced_density_matrix(basis, psi, sites);
}

ThermalizationReport thermalization_diagnostic(const BasisPtr& basis,
                                               const std::vector<Vector>& states,
                                               const std::vector<double>& times,
                                               const std::vector<int>& sites) {
  if (states.size() != times.size()) throw std::invalid_argument("one state per time required");
  if (states.size() < 2) throw std::invalid_argument("thermalization_diagnostic: need >= 2 times");
  ThermalizationReport rep;
  rep.times = times;
  std::size_t sub_dim = 0;
  for (const Vector& psi : states) {
    const DensityMatrix r = subsystem_rdm(basis, psi, sites);
    sub_dim = r.basis()->dim();
    rep.renyi2.push_back(renyi_entropy(r, 2));
  }
  rep.entropy_bound = std::log(static_cast<double>(sub_dim));
  const double a = rep.renyi2[rep.renyi2.size() - 2];
  const double b = rep.renyi2.back();
  rep.saturated = std::abs(b - a) < 0.05 * std::max(std::abs(a), std::abs(b));
  return rep;
}

QuenchConfig quench_preset(const std::string& label) {
  QuenchConfig c;
  c.label = label;
  if (label == "A") return c;
  if (label == "B") {
    c.U = 0.33;
    c.times = {12.2, 24.0, 59.4};
    return c;
  }
  if (label == "C") {
    c.L = 12;
    c.U = 0.33;
    c.pattern = {0, 0, 0, 1, 1, 1, 1, 1, 1, 0, 0, 0};
    c.times = {22.4, 41.3};
    c.fit_sites = {4, 5, 6, 7};
    c.entropy_sites = {0, 1, 2, 3, 4, 5};
    c.sampled = false;
    return c;
  }
  throw std::invalid_argument("unknown quench preset '" + label + "' (expected A, B or C)");
}

std::string Fig2Report::csv_header() {
  return "site,raw_density,vc_estimate,vc_se,halfT_prediction";
}

Fig2Report fig2_experiment(const QuenchConfig& config) {
  if (static_cast<int>(config.pattern.size()) != config.L) {
    throw std::invalid_argument("fig2: pattern length must equal L");
  }
  if (config.L < 3) throw std::invalid_argument("fig2: need at least one non-edge site");
  if (config.times.empty()) throw std::invalid_argument("fig2: no evolution times");
  for (double t : config.times) {
    if (!(t > 0.0)) throw std::invalid_argument("fig2: evolution times must be positive");
  }
  for (std::size_t k = 0; k < config.fit_sites.size(); ++k) {
    const int s = config.fit_sites[k];
    if (s < 0 || s >= config.L || (k > 0 && s <= config.fit_sites[k - 1])) {
      throw std::invalid_argument("fig2: fit sites must be ascending and inside the chain");
    }
  }
  if (config.fit_sites.empty()) throw std::invalid_argument("fig2: empty fit region");
  const int particles = std::accumulate(config.pattern.begin(), config.pattern.end(), 0);

  Fig2Report report;
  report.config = config;
  const BasisPtr basis = enumerate_basis(Statistics::boson, config.L, Sector::fixed(particles));
  const ReplicaPtr replica = config.sampled ? make_replica(basis, 2) : nullptr;
  if (replica) {
    report.joint_dim = replica->joint_basis()->dim();
    if (report.joint_dim > config.max_joint_dim) {
      throw std::invalid_argument("fig2: two-copy dimension " + std::to_string(report.joint_dim) +
                                  " exceeds the limit " + std::to_string(config.max_joint_dim) +
                                  "; reduce L or N, or run without sampling");
    }
  }

  ModelParams mp;
  mp.L = config.L;
  mp.J = config.J;
  mp.U = config.U;
  mp.boundary = config.boundary;
  const Operator h = bose_hubbard(basis, mp);
  const Vector psi0 = product_state(basis, config.pattern);
  std::vector<Vector> states;
  if (basis->dim() <= kSparseThreshold) {
    const Propagator prop(h);
    for (double t : config.times) states.push_back(prop.evolve(t, psi0));
  } else {
    for (double t : config.times) states.push_back(krylov_evolve(h, t, psi0));
  }

  // Effective ensemble on the fit region. The bosonic grand-canonical
  // ensemble has no particle cap; the cutoff is raised until the fit stops
  // moving.
  {
    const int width = static_cast<int>(config.fit_sites.size());
    OccupationVector local;
    for (int s : config.fit_sites) local.push_back(config.pattern[static_cast<std::size_t>(s)]);
    ModelParams sp = mp;
    sp.L = width;
    sp.boundary = Boundary::open;
    std::optional<FitResult> previous;
    for (int cap = 2 * width + 2;; cap += 4) {
      std::vector<int> totals(static_cast<std::size_t>(cap) + 1);
      std::iota(totals.begin(), totals.end(), 0);
      const BasisPtr sub = enumerate_basis(Statistics::boson, width, Sector::totals(totals));
      if (previous && sub->dim() > config.max_fit_dim) break;
      const Operator hs = bose_hubbard(sub, sp);
      const Operator ns = total_number_op(sub);
      const Vector phi = product_state(sub, local);
      const double e_target = (phi.adjoint() * hs.apply(phi))(0).real();
      const double n_target = (phi.adjoint() * ns.apply(phi))(0).real();
      const NumberResolvedSpectrum spec = number_resolved_spectrum(hs, ns);
      FitResult fit = fit_effective_ensemble(spec, e_target, n_target);
      report.fit_particle_cap = cap;
      report.fit = fit;
      if (!fit.converged) {
        report.halfT_average = std::nan("");
        break;
      }
      // rho_GC(beta, mu)^2 / tr = rho_GC(2 beta, mu): weights at doubled beta
      // in the eigenbasis, site densities from |V_ik|^2.
      const RealVector x = 2.0 * fit.beta * (spec.energies - fit.mu * spec.numbers);
      RealVector w = (-(x.array() - x.minCoeff())).exp().matrix();
      w /= w.sum();
      const RealVector pop = spec.vectors.cwiseAbs2() * w;  // diag of the state
      double acc = 0.0;
      for (std::size_t i = 0; i < sub->dim(); ++i) {
        double n = 0.0;
        for (Occupation o : sub->state(i)) n += o;
        acc += n * pop[static_cast<Eigen::Index>(i)];
      }
      report.halfT_average = acc / width;
      if (previous && std::abs(fit.beta - previous->beta) <= 1e-3 * fit.beta &&
          std::abs(fit.mu - previous->mu) <= 1e-3 * std::max(1.0, std::abs(fit.mu))) {
        break;
      }
      if (sub->dim() > config.max_fit_dim) break;
      previous = fit;
    }
  }
  if (config.times.size() >= 2) {
    report.thermalization =
        thermalization_diagnostic(basis, states, config.times, config.entropy_sites);
  }

  const double nt = static_cast<double>(config.times.size());
  for (int site = 1; site + 1 < config.L; ++site) {
    Fig2SiteRow row;
    row.site = site;
    row.halfT_prediction = report.halfT_average;
    report.rows.push_back(row);
  }
  std::vector<double> var_sum(report.rows.size(), 0.0);
  for (std::size_t ti = 0; ti < states.size(); ++ti) {
    // Every shot images all sites of both copies, so one outcome list per
    // time serves every site.
    std::vector<std::size_t> outcomes;
    if (replica) {
      const OutcomeDistribution dist = transformed_outcomes(replica, states[ti]);
      SamplingOptions so;
      so.shots = config.shots;
      so.seed = config.seed + 7919ULL * ti;
      so.workers = config.workers;
      outcomes = sample_categorical(dist.probabilities, so);
    }
    for (std::size_t k = 0; k < report.rows.size(); ++k) {
      Fig2SiteRow& row = report.rows[k];
      const DensityMatrix rj = subsystem_rdm(basis, states[ti], {row.site});
      double raw = 0.0, num = 0.0, den = 0.0;
      for (std::size_t i = 0; i < rj.basis()->dim(); ++i) {
        const double n = rj.basis()->state(i)[0];
        const double p = rj.matrix()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real();
        raw += n * p;
        num += n * p * p;
        den += p * p;
      }
      row.raw_density += raw / nt;
      row.vc_exact += (num / den) / nt;
      if (replica) {
        // X_2 = (n_{1,j} + n_{2,j})/2 and R_2 restricted to site j.
        const FockBasis& joint = *replica->joint_basis();
        const auto m1 = static_cast<std::size_t>(replica->joint_mode(0, row.site));
        const auto m2 = static_cast<std::size_t>(replica->joint_mode(1, row.site));
        RealVector x(static_cast<Eigen::Index>(joint.dim()));
        Vector r(static_cast<Eigen::Index>(joint.dim()));
        for (std::size_t i = 0; i < joint.dim(); ++i) {
          const OccupationSpan o = joint.state(i);
          x[static_cast<Eigen::Index>(i)] = 0.5 * (o[m1] + o[m2]);
          r[static_cast<Eigen::Index>(i)] = (o[m1] & 1) ? -1.0 : 1.0;
        }
        const EstimateReport est = ratio_estimate(outcomes, x, r);
        row.vc_estimate += est.ratio / nt;
        var_sum[k] += est.ratio_se * est.ratio_se;
      }
    }
  }
  double vc_var = 0.0;
  const double ns = static_cast<double>(report.rows.size());
  for (std::size_t k = 0; k < report.rows.size(); ++k) {
    Fig2SiteRow& row = report.rows[k];
    if (!replica) row.vc_estimate = row.vc_exact;
    row.vc_se = std::sqrt(var_sum[k]) / nt;
    report.raw_average += row.raw_density / ns;
    report.vc_average += row.vc_estimate / ns;
    vc_var += row.vc_se * row.vc_se;
  }
  report.vc_average_se = std::sqrt(vc_var) / ns;
  return report;
}

}  // namespace vcool
