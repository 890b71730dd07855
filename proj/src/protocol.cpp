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

#include "vcool/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace vcool {

namespace {

Matrix kron_power(const Matrix& rho, int n) {
  const Eigen::Index d = rho.rows();
  Matrix kron = rho;
  for (int c = 1; c < n; ++c) {
    Matrix next(kron.rows() * d, kron.cols() * d);
    for (Eigen::Index i = 0; i < kron.rows(); ++i) {
      for (Eigen::Index j = 0; j < kron.cols(); ++j) {
        next.block(i * d, j * d, d, d) = kron(i, j) * rho;
      }
    }
    kron = std::move(next);
  }
  return kron;
}

// U = F_n for bosons, the two-copy fermionic transform otherwise.
SparseMatrix transform_matrix(const ReplicaPtr& replica) {
  if (replica->statistics() == Statistics::boson) return fourier_op(replica).sparse();
  return fermionic_fourier_op(replica).sparse();
}

RealVector clip_probabilities(RealVector p) {
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p[i] < 0.0) {
      if (p[i] < -1e-10) throw std::logic_error("transformed state has a negative diagonal");
      p[i] = 0.0;
    }
  }
  return p;
}

std::seed_seq make_seed(std::uint64_t seed, std::uint32_t stream) {
  return std::seed_seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                       static_cast<std::uint32_t>(seed >> 32), stream};
}

}  // namespace

double virtual_expectation_exact(const DensityMatrix& rho, const Matrix& x, int n) {
  if (n < 1) throw std::invalid_argument("virtual_expectation_exact: n must be >= 1");
  if (x.rows() != rho.dim() || x.cols() != rho.dim()) {
    throw std::invalid_argument("virtual_expectation_exact: X does not match the state");
  }
  if (hermiticity_defect(x) > 1e-10) {
    throw std::invalid_argument("virtual_expectation_exact: X is not Hermitian");
  }
  Matrix power = rho.matrix();
  for (int k = 1; k < n; ++k) power = power * rho.matrix();
  const double z = power.trace().real();
  if (!(std::abs(z) > 1e-300)) throw std::domain_error("tr{rho^n} vanishes");
  return (x * power).trace().real() / z;
}

double virtual_expectation_exact(const DensityMatrix& rho, const Operator& x, int n) {
  if (!x.basis().same_space(*rho.basis())) {
    throw std::invalid_argument("virtual_expectation_exact: X and rho live on different bases");
  }
  return virtual_expectation_exact(rho, x.dense(), n);
}

OutcomeDistribution transformed_outcomes(const ReplicaPtr& replica, const DensityMatrix& rho) {
  if (!rho.basis()->same_space(*replica->copy_basis())) {
    throw std::invalid_argument("transformed_outcomes: state is not on the copy basis");
  }
  const SparseMatrix u = transform_matrix(replica);
  const auto& idx = replica->product_indices();
  // G: columns of U at product states, so that U rho^{(x)n} U^dag = G M G^dag.
  std::vector<Eigen::Triplet<Complex>> trip;
  std::vector<int> product_of(static_cast<std::size_t>(u.cols()), -1);
  for (std::size_t k = 0; k < idx.size(); ++k) product_of[idx[k]] = static_cast<int>(k);
  for (int c = 0; c < u.outerSize(); ++c) {
    const int k = product_of[static_cast<std::size_t>(c)];
    if (k < 0) continue;
    for (SparseMatrix::InnerIterator it(u, c); it; ++it) {
      trip.emplace_back(static_cast<int>(it.row()), k, it.value());
    }
  }
  SparseMatrix g(u.rows(), static_cast<Eigen::Index>(idx.size()));
  g.setFromTriplets(trip.begin(), trip.end());
  const Matrix m = kron_power(rho.matrix(), replica->copies());
  const Matrix gm = g * m;
  // diag(G M G^dag)_r = sum_k (G M)_rk conj(G_rk)
  RealVector p = RealVector::Zero(u.rows());
  for (int k = 0; k < g.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(g, k); it; ++it) {
      p[it.row()] += (gm(it.row(), k) * std::conj(it.value())).real();
    }
  }
  return {replica, clip_probabilities(std::move(p))};
}

OutcomeDistribution transformed_outcomes(const ReplicaPtr& replica, const Vector& psi) {
  if (replica->statistics() != Statistics::boson) {
    throw std::invalid_argument("transformed_outcomes: pure-state path supports bosons only");
  }
  const Vector out = apply_fourier(*replica, tensor_power(*replica, psi));
  return {replica, out.cwiseAbs2()};
}

RealVector outcome_values(const ReplicaPtr& replica, const OccupationFunction& x_single,
                          OutcomeValue mode) {
  const BasisPtr& joint = replica->joint_basis();
  const int n = replica->copies();
  const auto L = static_cast<std::size_t>(replica->sites());
  RealVector xs(static_cast<Eigen::Index>(joint->dim()));
  for (std::size_t i = 0; i < joint->dim(); ++i) {
    const OccupationSpan s = joint->state(i);
    double acc = 0.0;
    for (int p = 0; p < n; ++p) acc += x_single(s.subspan(static_cast<std::size_t>(p) * L, L));
    xs[static_cast<Eigen::Index>(i)] = acc / n;
  }
  if (mode == OutcomeValue::occupation_average) return xs;

  const SparseMatrix u = transform_matrix(replica);
  RealVector out = RealVector::Zero(u.rows());
  for (int c = 0; c < u.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(u, c); it; ++it) {
      out[it.row()] += std::norm(it.value()) * xs[c];
    }
  }
  return out;
}

Vector outcome_phases(const ReplicaPtr& replica, std::span<const int> sites) {
  const BasisPtr& joint = replica->joint_basis();
  Vector r(static_cast<Eigen::Index>(joint->dim()));
  if (replica->statistics() == Statistics::fermion) {
    if (!sites.empty()) throw std::invalid_argument("outcome_phases: V has no site restriction");
    const RealVector v = fermion_v_op(replica).real_diagonal();
    return v.cast<Complex>();
  }
  for (std::size_t i = 0; i < joint->dim(); ++i) {
    r[static_cast<Eigen::Index>(i)] = phase_eigenvalue(*replica, joint->state(i), sites);
  }
  return r;
}

std::vector<ShotRecord> shot_records(const ReplicaPtr& replica,
                                     const std::vector<std::size_t>& outcomes,
                                     const RealVector& x, const Vector& r) {
  std::vector<ShotRecord> out;
  out.reserve(outcomes.size());
  for (std::size_t k : outcomes) {
    const OccupationSpan s = replica->joint_basis()->state(k);
    out.push_back({OccupationVector(s.begin(), s.end()), r[static_cast<Eigen::Index>(k)],
                   x[static_cast<Eigen::Index>(k)], 1.0});
  }
  return out;
}

OccupationFunction diagonal_function(const Operator& x, double tol) {
  if (x.off_diagonal_max() > tol) {
    throw std::invalid_argument(
        "observable is not diagonal in the number basis; sampled estimation is not available, "
        "use virtual_expectation_exact");
  }
  auto basis = x.basis_ptr();
  auto diag = std::make_shared<RealVector>(x.real_diagonal());
  return [basis, diag](OccupationSpan s) {
    auto i = basis->index_of(s);
    if (!i) throw std::out_of_range("occupation outside the observable's basis");
    return (*diag)[static_cast<Eigen::Index>(*i)];
  };
}

EstimateReport interferometric_estimate(const OutcomeDistribution& outcomes,
                                        const OccupationFunction& x_single,
                                        const EstimateOptions& options) {
  if (options.sampling.shots == 0) throw std::invalid_argument("shots must be positive");
  if (outcomes.replica->statistics() != Statistics::boson) {
    throw std::invalid_argument("interferometric_estimate: use fermionic_estimate for fermions");
  }
  const RealVector x = outcome_values(outcomes.replica, x_single, options.value_mode);
  const Vector r = outcome_phases(outcomes.replica, options.sites);
  EstimateReport rep =
      ratio_estimate(sample_categorical(outcomes.probabilities, options.sampling), x, r);
  rep.observable = options.observable;
  rep.n = outcomes.replica->copies();
  rep.seed = options.sampling.seed;
  rep.workers = options.sampling.workers;
  return rep;
}

EstimateReport interferometric_estimate(const OutcomeDistribution& outcomes, const Operator& x_single,
                                        const EstimateOptions& options) {
  return interferometric_estimate(outcomes, diagonal_function(x_single), options);
}

EstimateReport fermionic_estimate(const OutcomeDistribution& outcomes,
                                  const OccupationFunction& x_single,
                                  const EstimateOptions& options) {
  if (options.sampling.shots == 0) throw std::invalid_argument("shots must be positive");
  const ReplicaPtr& replica = outcomes.replica;
  if (replica->statistics() != Statistics::fermion || replica->copies() != 2) {
    throw std::invalid_argument("fermionic_estimate: requires two fermionic copies");
  }
  // X_2 = U X_s U^dag must commute with V.
  const SparseMatrix u = transform_matrix(replica);
  const Matrix xs = symmetrize(x_single, replica).dense();
  const Matrix x2 = u * xs * SparseMatrix(u.adjoint());
  const RealVector v = fermion_v_op(replica).real_diagonal();
  const Matrix comm = v.asDiagonal() * x2 - x2 * v.asDiagonal();
  const double defect = comm.size() ? comm.cwiseAbs().maxCoeff() : 0.0;
  if (defect > 1e-10) {
    throw std::invalid_argument("fermionic_estimate: transformed observable does not commute with V"
                                " (defect " + std::to_string(defect) + ")");
  }
  const RealVector x = outcome_values(replica, x_single, options.value_mode);
  const Vector r = v.cast<Complex>();
  EstimateReport rep =
      ratio_estimate(sample_categorical(outcomes.probabilities, options.sampling), x, r);
  rep.observable = options.observable;
  rep.n = 2;
  rep.seed = options.sampling.seed;
  rep.workers = options.sampling.workers;
  return rep;
}

// ---------------------------------------------------------------------------
// Ancilla

AncillaStep ancilla_step(const DensityMatrix& rho) {
  const Matrix sq = rho.matrix() * rho.matrix();
  const double z2 = sq.trace().real();
  Matrix rho1 = (rho.matrix() + sq) / (1.0 + z2);
  rho1 = 0.5 * (rho1 + rho1.adjoint().eval());
  return {DensityMatrix(rho.basis(), std::move(rho1)), 0.5 * (1.0 + z2)};
}

double ancilla_combine(double x_rho1, double x_rho, double p_plus) {
  constexpr double eps = 1e-12;
  if (!(p_plus > 0.5 + eps)) {
    throw std::domain_error("ancilla_combine: p_plus too close to 1/2 (purity numerically zero)");
  }
  const double d = 2.0 * p_plus - 1.0;
  return (2.0 * p_plus / d) * x_rho1 - x_rho / d;
}

AncillaSampledReport ancilla_sampled_estimate(const DensityMatrix& rho,
                                              const OccupationFunction& x,
                                              const SamplingOptions& sampling) {
  if (sampling.shots < 2) throw std::invalid_argument("ancilla: need at least 2 shots");
  const BasisPtr& basis = rho.basis();
  const AncillaStep step = ancilla_step(rho);
  RealVector xv(static_cast<Eigen::Index>(basis->dim()));
  for (std::size_t i = 0; i < basis->dim(); ++i) xv[static_cast<Eigen::Index>(i)] = x(basis->state(i));
  auto probs = [](const Matrix& m) {
    RealVector d = m.diagonal().real();
    return std::vector<double>(d.data(), d.data() + d.size());
  };
  const std::vector<double> w_rho = probs(rho.matrix());
  const std::vector<double> w_rho1 = probs(step.rho1.matrix());

  AncillaSampledReport rep;
  rep.shots = sampling.shots;
  {
    Matrix sq = rho.matrix() * rho.matrix();
    rep.exact = (xv.cast<Complex>().asDiagonal() * sq).trace().real() / sq.trace().real();
  }
  const auto m = static_cast<double>(sampling.shots);

  // Batch 0: direct measurement of X on rho.
  auto seq0 = make_seed(sampling.seed, 0);
  std::mt19937_64 rng0(seq0);
  std::discrete_distribution<std::size_t> on_rho(w_rho.begin(), w_rho.end());
  double sx = 0, sxx = 0;
  for (std::size_t k = 0; k < sampling.shots; ++k) {
    const double v = xv[static_cast<Eigen::Index>(on_rho(rng0))];
    sx += v;
    sxx += v * v;
  }
  const double x_hat = sx / m;
  const double var_x = std::max(0.0, (sxx / m - x_hat * x_hat) * m / (m - 1));

  // Swap-test runs: outcome + with probability p_plus, then X on rho1.
  auto run = [&](std::uint32_t stream, double& p_hat, double& x1_hat, double& var_x1,
                 std::size_t& plus) {
    auto seq = make_seed(sampling.seed, stream);
    std::mt19937_64 rng(seq);
    std::bernoulli_distribution swap(step.p_plus);
    std::discrete_distribution<std::size_t> on_rho1(w_rho1.begin(), w_rho1.end());
    double s1 = 0, s11 = 0;
    plus = 0;
    for (std::size_t k = 0; k < sampling.shots; ++k) {
      if (!swap(rng)) continue;
      ++plus;
      const double v = xv[static_cast<Eigen::Index>(on_rho1(rng))];
      s1 += v;
      s11 += v * v;
    }
    p_hat = static_cast<double>(plus) / m;
    const double k1 = static_cast<double>(plus);
    x1_hat = plus ? s1 / k1 : 0.0;
    var_x1 = plus > 1 ? std::max(0.0, (s11 / k1 - x1_hat * x1_hat) * k1 / (k1 - 1)) : 0.0;
  };

  // Shared run: p_plus and <X>_{rho1} from the same runs. Linearizing
  // x1 = mean(s X) / mean(s) over runs gives var(x1) ~ var_x1 / (m p), and
  // p-hat is uncorrelated with x1-hat to first order.
  double p_a, x1_a, v1_a;
  std::size_t plus_a;
  run(1, p_a, x1_a, v1_a, plus_a);
  // Independent run: p_plus from a separate batch.
  double p_b, x1_unused, v1_unused;
  std::size_t plus_b;
  run(2, p_b, x1_unused, v1_unused, plus_b);

  auto combine = [&](double p, double x1, double var_p, double var_x1_mean) {
    const double d = 2.0 * p - 1.0;
    const double dfdx1 = 2.0 * p / d;
    const double dfdx = -1.0 / d;
    const double dfdp = 2.0 * (x_hat - x1) / (d * d);
    const double var = dfdx1 * dfdx1 * var_x1_mean + dfdx * dfdx * var_x / m + dfdp * dfdp * var_p;
    return std::make_pair(ancilla_combine(x1, x_hat, p), std::sqrt(var));
  };
  const double var_x1_mean = plus_a ? v1_a / static_cast<double>(plus_a) : 0.0;
  std::tie(rep.estimate_shared, rep.se_shared) =
      combine(p_a, x1_a, p_a * (1 - p_a) / m, var_x1_mean);
  std::tie(rep.estimate_independent, rep.se_independent) =
      combine(p_b, x1_a, p_b * (1 - p_b) / m, var_x1_mean);
  rep.p_plus_hat = p_a;
  return rep;
}

DistillResult distill(const DensityMatrix& rho, int iterations, std::optional<Vector> reference) {
  if (iterations < 1) throw std::invalid_argument("distill: iterations must be >= 1");
  DistillResult result;
  const Eigensystem es = eigh(rho.matrix());
  const Eigen::Index d = es.values.size();
  if (d >= 2 && es.values[d - 1] - es.values[d - 2] < 1e-12) result.degenerate = true;
  const Vector g = reference ? reference->normalized() : Vector(es.vectors.col(d - 1));

  DensityMatrix current = rho;
  for (int k = 0; k < iterations; ++k) {
    AncillaStep step = ancilla_step(current);
    const double fidelity = (g.adjoint() * step.rho1.matrix() * g)(0, 0).real();
    const double top = eigh(step.rho1.matrix()).values.maxCoeff();
    result.steps.push_back({step.rho1, step.p_plus, fidelity, top});
    current = step.rho1;
  }
  return result;
}

// ---------------------------------------------------------------------------
// Buffered subregions

BufferedResult buffered_estimate(const DensityMatrix& rho_full, const std::vector<int>& region,
                                 int buffer, const OccupationFunction& x_on_region) {
  const int L = rho_full.basis()->num_modes();
  if (region.empty()) throw std::invalid_argument("buffered_estimate: empty region");
  for (std::size_t k = 1; k < region.size(); ++k) {
    if (region[k] != region[k - 1] + 1) {
      throw std::invalid_argument("buffered_estimate: region must be contiguous and ascending");
    }
  }
  if (buffer < 0) throw std::invalid_argument("buffered_estimate: negative buffer");
  const int lo = region.front() - buffer;
  const int hi = region.back() + buffer;
  if (lo < 0 || hi >= L) {
    throw std::invalid_argument("buffered_estimate: buffered region [" + std::to_string(lo) +
                                ", " + std::to_string(hi) + "] exceeds the chain of " +
                                std::to_string(L) + " sites");
  }
  BufferedResult out;
  for (int s = lo; s <= hi; ++s) out.region_b.push_back(s);
  const auto width = region.size();

  auto weighted = [&](const DensityMatrix& r, std::size_t offset) {
    const Matrix sq = r.matrix() * r.matrix();
    const double z = sq.trace().real();
    double acc = 0.0;
    for (std::size_t i = 0; i < r.basis()->dim(); ++i) {
      acc += x_on_region(r.basis()->state(i).subspan(offset, width)) *
             sq(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real();
    }
    return acc / z;
  };
  const DensityMatrix rho_b = static_cast<int>(out.region_b.size()) == L
                                  ? rho_full
                                  : reduced_density_matrix(rho_full, out.region_b);
  out.approx = weighted(rho_b, static_cast<std::size_t>(region.front() - lo));
  out.exact = weighted(rho_full, static_cast<std::size_t>(region.front()));
  out.error = std::abs(out.approx - out.exact);
  return out;
}

// ---------------------------------------------------------------------------
// Shot cost

std::pair<double, double> linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("linear_fit: need >= 2 points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  if (std::abs(den) < 1e-300) throw std::invalid_argument("linear_fit: degenerate abscissae");
  const double slope = (n * sxy - sx * sy) / den;
  return {slope, (sy - slope * sx) / n};
}

ScalingStudy shots_scaling_study(const Operator& h, const std::vector<double>& betas,
                                 const std::vector<int>& region_sizes,
                                 const ScalingOptions& options) {
  const int L = h.basis().num_modes();
  ScalingStudy study;
  std::uint32_t stream = 0;
  const double eps2 = options.target_precision * options.target_precision;
  for (double beta : betas) {
    const DensityMatrix rho = thermal_state(h, beta);
    for (int size : region_sizes) {
      if (size < 1 || size > L) throw std::invalid_argument("scaling: region size out of range");
      std::vector<int> sites(static_cast<std::size_t>(size));
      for (int k = 0; k < size; ++k) sites[static_cast<std::size_t>(k)] = k;
      const DensityMatrix rho_r = size == L ? rho : reduced_density_matrix(rho, sites);
      const ReplicaPtr replica = make_replica(rho_r.basis(), 2);
      const OutcomeDistribution dist = transformed_outcomes(replica, rho_r);
      const Vector r = outcome_phases(replica);
      const std::vector<double> w(dist.probabilities.data(),
                                  dist.probabilities.data() + dist.probabilities.size());

      ScalingRow row;
      row.beta = beta;
      row.region_size = size;
      row.z2 = purity(rho_r, 2);
      row.predicted_shots = (1.0 - row.z2 * row.z2) / (eps2 * row.z2 * row.z2);

      std::vector<double> counts;
      for (int rep = 0; rep < options.repetitions; ++rep) {
        auto seq = make_seed(options.seed, stream++);
        std::mt19937_64 rng(seq);
        std::discrete_distribution<std::size_t> draw(w.begin(), w.end());
        double s = 0.0, ss = 0.0;
        std::size_t k = 0;
        for (;;) {
          const double v = r[static_cast<Eigen::Index>(draw(rng))].real();
          s += v;
          ss += v * v;
          ++k;
          if (k >= options.min_shots) {
            const double kk = static_cast<double>(k);
            const double mean = s / kk;
            const double var = std::max(0.0, ss / kk - mean * mean);
            if (mean != 0.0 && var / kk <= eps2 * mean * mean) break;
          }
          if (k >= options.max_shots) break;
        }
        counts.push_back(static_cast<double>(k));
      }
      std::sort(counts.begin(), counts.end());
      row.empirical_shots = counts[counts.size() / 2];
      study.rows.push_back(row);
    }
  }
  std::vector<double> lx, ly;
  for (const auto& row : study.rows) {
    lx.push_back(std::log(1.0 / (row.z2 * row.z2)));
    ly.push_back(std::log(row.empirical_shots));
  }
  if (lx.size() >= 2) std::tie(study.slope, study.intercept) = linear_fit(lx, ly);
  return study;
}

}  // namespace vcool
