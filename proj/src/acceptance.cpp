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

#include "vcool/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <unistd.h>

#include "vcool/correlator.hpp"
#include "vcool/experiment.hpp"
#include "vcool/model.hpp"
#include "vcool/protocol.hpp"
#include "vcool/quench.hpp"
#include "vcool/replica.hpp"
#include "vcool/thermal.hpp"

namespace vcool {

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(double v, int digits = 3) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

Matrix random_hermitian(Eigen::Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix a(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index k = 0; k < d; ++k) a(i, k) = Complex(g(rng), g(rng));
  }
  return 0.5 * (a + a.adjoint());
}

DensityMatrix random_density(const BasisPtr& basis, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  const auto d = static_cast<Eigen::Index>(basis->dim());
  Matrix a(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index k = 0; k < d; ++k) a(i, k) = Complex(g(rng), g(rng));
  }
  Matrix rho = a * a.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix(basis, rho);
}

Operator dense_operator(const BasisPtr& basis, const Matrix& m) {
  OperatorFlags f;
  f.hermitian = true;
  return Operator(basis, m, f);
}

BasisPtr boson_basis(int L, int N) { return enumerate_basis(Statistics::boson, L, Sector::fixed(N)); }

// ---------------------------------------------------------------------------

double swap_deviation(const ReplicaPtr& replica, bool mutated) {
  if (!mutated) return verify_swap_identity(replica).max_deviation;
  const Matrix s = permutation_op(replica).dense();
  const Matrix f = fourier_op(replica).dense();
  const Matrix r = phase_op(replica).dense();
  return (f * r * f.adjoint() - s).cwiseAbs().maxCoeff();
}

Outcome c1_replica_identity(const AcceptanceOptions& opt) {
  const bool mutated = opt.mutate == "swap";
  double worst = 0.0;
  int cases = 0;
  for (int L = 1; L <= 3; ++L) {
    for (int N = 0; N <= 3; ++N) {
      worst = std::max(worst, swap_deviation(make_replica(boson_basis(L, N), 2), mutated));
      ++cases;
    }
  }
  for (int L = 1; L <= 2; ++L) {
    for (int N = 0; N <= 2; ++N) {
      worst = std::max(worst, swap_deviation(make_replica(boson_basis(L, N), 3), mutated));
      ++cases;
    }
  }
  return {worst < 1e-9, std::to_string(cases) + " sectors, max deviation " + fmt(worst)};
}

Outcome c2_purity_identity() {
  std::mt19937_64 rng(20260301);
  double worst_b = 0.0;
  double worst_f = 0.0;
  const std::vector<std::pair<int, int>> bosons{{2, 1}, {2, 2}, {3, 2}, {3, 3}, {4, 3}};
  const std::vector<std::pair<int, int>> fermions{{2, 1}, {4, 2}, {5, 2}, {6, 3}};
  for (auto [L, N] : bosons) {
    const BasisPtr b = boson_basis(L, N);
    const ReplicaPtr rep = make_replica(b, 2);
    const Vector r = outcome_phases(rep);
    for (int k = 0; k < 50; ++k) {
      const DensityMatrix rho = random_density(b, rng);
      const OutcomeDistribution d = transformed_outcomes(rep, rho);
      const Complex t = d.probabilities.cast<Complex>().dot(r);
      worst_b = std::max(worst_b, std::abs(t - purity(rho, 2)));
    }
  }
  for (auto [L, N] : fermions) {
    const BasisPtr b = enumerate_basis(Statistics::fermion, L, Sector::fixed(N));
    const ReplicaPtr rep = make_replica(b, 2);
    const RealVector v = fermion_v_op(rep).real_diagonal();
    for (int k = 0; k < 50; ++k) {
      const DensityMatrix rho = random_density(b, rng);
      const OutcomeDistribution d = transformed_outcomes(rep, rho);
      worst_f = std::max(worst_f, std::abs(d.probabilities.dot(v) - purity(rho, 2)));
    }
  }
  return {worst_b < 1e-10 && worst_f < 1e-10,
          "bosons max |dev| " + fmt(worst_b) + ", fermions (V) max |dev| " + fmt(worst_f)};
}

Outcome c3_master_oracle(const AcceptanceOptions& opt) {
  const BasisPtr b = boson_basis(4, 2);
  ModelParams p;
  p.L = 4;
  p.U = 1.0;
  const Operator h = bose_hubbard(b, p);
  const ReplicaPtr rep = make_replica(b, 2);
  const int j = 1;
  const int l = 2;
  const OccupationFunction nj = [j](OccupationSpan o) { return double(o[j]); };
  const OccupationFunction njl = [j, l](OccupationSpan o) { return double(o[j]) * o[l]; };

  bool main_ok = true;
  std::string worst_case;
  double worst_z = 0.0;
  std::vector<double> zs;
  for (double beta : {0.1, 0.5, 2.0}) {
    const DensityMatrix rho = thermal_state(h, beta);
    const OutcomeDistribution dist = transformed_outcomes(rep, rho);
    const double exact_n = virtual_expectation_exact(rho, number_op(b, j), 2);
    const double exact_nn = unconventional_correlator(rho, j, l).total();
    for (int which = 0; which < 2; ++which) {
      const OccupationFunction& x = which == 0 ? nj : njl;
      const double exact = which == 0 ? exact_n : exact_nn;
      EstimateOptions eo;
      eo.sampling.workers = opt.workers;
      eo.sampling.shots = 1000000;
      eo.sampling.seed = 1000 + static_cast<std::uint64_t>(beta * 100) + which;
      const EstimateReport big = interferometric_estimate(dist, x, eo);
      const double z = (big.ratio - exact) / big.ratio_se;
      if (std::abs(z) > std::abs(worst_z)) {
        worst_z = z;
        worst_case = std::string(which == 0 ? "n_j" : "n_j n_l") + " beta=" + fmt(beta);
      }
      main_ok = main_ok && std::abs(z) < 3.0;
      eo.sampling.shots = 100000;
      for (std::uint64_t s = 0; s < 100; ++s) {
        eo.sampling.seed = 50000 + s;
        const EstimateReport r = interferometric_estimate(dist, x, eo);
        zs.push_back((r.ratio - exact) / r.ratio_se);
      }
    }
  }
  double mean = 0.0;
  int tails = 0;
  for (double z : zs) {
    mean += z;
    tails += std::abs(z) > 2.0;
  }
  mean /= static_cast<double>(zs.size());
  const double tail_frac = static_cast<double>(tails) / static_cast<double>(zs.size());
  const bool ok = main_ok && std::abs(mean) < 0.3 && tail_frac < 0.10;
  return {ok, "1e6-shot max |z| " + fmt(std::abs(worst_z)) + " (" + worst_case + "); " +
                  std::to_string(zs.size()) + " seeded z: mean " + fmt(mean) + ", |z|>2 " +
                  fmt(100 * tail_frac) + "%"};
}

Outcome c4_thermal_halving() {
  std::mt19937_64 rng(20260304);
  std::uniform_real_distribution<double> ub(0.05, 2.0);
  const std::vector<std::pair<int, int>> sectors{{2, 1}, {3, 2}, {4, 2}, {5, 2}, {4, 3},
                                                 {6, 2}, {5, 3}, {7, 2}, {4, 4}, {8, 2}};
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const auto [L, N] = sectors[static_cast<std::size_t>(k) % sectors.size()];
    const BasisPtr b = boson_basis(L, N);
    const Operator h = dense_operator(b, random_hermitian(static_cast<Eigen::Index>(b->dim()), rng));
    const double beta = ub(rng);
    const Matrix diff = matrix_power_state(thermal_state(h, beta), 2).matrix() -
                        thermal_state(h, 2 * beta).matrix();
    worst = std::max(worst, 0.5 * trace_norm(0.5 * (diff + diff.adjoint())));
  }
  return {worst < 1e-9, "20 random H (dim <= 36), max trace distance " + fmt(worst)};
}

Outcome c5_ancilla() {
  std::mt19937_64 rng(20260305);
  double worst_combine = 0.0;
  double worst_p = 0.0;
  double min_p = 1.0;
  const std::vector<std::pair<int, int>> sectors{{2, 1}, {3, 1}, {2, 3}, {3, 2}, {4, 2},
                                                 {3, 3}, {2, 5}, {5, 2}, {4, 3}, {3, 5}};
  for (int k = 0; k < 40; ++k) {
    const auto [L, N] = sectors[static_cast<std::size_t>(k) % sectors.size()];
    const BasisPtr b = boson_basis(L, N);
    const DensityMatrix rho = random_density(b, rng);
    const Matrix x = random_hermitian(static_cast<Eigen::Index>(b->dim()), rng);
    const AncillaStep step = ancilla_step(rho);
    const double combined = ancilla_combine(expectation(step.rho1, x), expectation(rho, x), step.p_plus);
    worst_combine =
        std::max(worst_combine, std::abs(combined - virtual_expectation_exact(rho, x, 2)));
    worst_p = std::max(worst_p, std::abs(step.p_plus - 0.5 * (1.0 + purity(rho, 2))));
    min_p = std::min(min_p, step.p_plus);
  }
  return {worst_combine < 1e-10 && worst_p < 1e-12 && min_p > 0.5,
          "40 random (rho, X), dim <= 21: combine dev " + fmt(worst_combine) + ", p+ dev " +
              fmt(worst_p) + ", min p+ " + fmt(min_p, 6)};
}

Outcome c6_distillation() {
  const BasisPtr b = boson_basis(4, 2);
  ModelParams p;
  p.L = 4;
  p.U = 4.0;
  const DistillResult d = distill(thermal_state(bose_hubbard(b, p), 0.5), 12);
  bool increasing = !d.degenerate;
  bool nondecreasing = true;
  int reached = 0;
  double prev_f = -1.0;
  double prev_p = 0.0;
  for (std::size_t k = 0; k < d.steps.size(); ++k) {
    const DistillStep& s = d.steps[k];
    increasing = increasing && s.ground_fidelity > prev_f;
    nondecreasing = nondecreasing && s.p_plus >= prev_p - 1e-15;
    if (!reached && s.ground_fidelity > 0.99) reached = static_cast<int>(k + 1);
    prev_f = s.ground_fidelity;
    prev_p = s.p_plus;
  }

  // Two-level check against the scalar recursion.
  const BasisPtr two = boson_basis(2, 1);
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 0.6;
  m(1, 1) = 0.4;
  const DistillResult q = distill(DensityMatrix(two, m), 12);
  double lam = 0.6;
  double worst = 0.0;
  for (const DistillStep& s : q.steps) {
    const double other = 1.0 - lam;
    lam = (lam + lam * lam) / (1.0 + lam * lam + other * other);
    worst = std::max(worst, std::abs(s.top_eigenvalue - lam));
  }
  const bool ok = increasing && nondecreasing && reached > 0 && worst < 1e-12;
  return {ok, "U=4J: fidelity " + std::string(increasing ? "strictly increasing" : "NOT increasing") +
                  ", > 0.99 at iteration " + (reached ? std::to_string(reached) : "none") +
                  " (final " + fmt(d.steps.back().ground_fidelity, 6) + "), p+ " +
                  (nondecreasing ? "non-decreasing" : "DECREASING") +
                  "; 2-level recursion dev " + fmt(worst)};
}

Outcome c7_imaginary_time() {
  std::mt19937_64 rng(20260307);
  std::uniform_real_distribution<double> ub(0.1, 3.0);
  const std::vector<std::pair<int, int>> sectors{{3, 2}, {4, 2}, {4, 3}, {5, 2}, {5, 3}, {6, 3}};
  double worst = 0.0;
  int cases = 0;
  for (auto [L, N] : sectors) {
    const BasisPtr b = boson_basis(L, N);
    const Operator h = dense_operator(b, random_hermitian(static_cast<Eigen::Index>(b->dim()), rng));
    for (int rep = 0; rep < 3; ++rep) {
      const double beta = ub(rng);
      const DensityMatrix rho = thermal_state(h, beta);
      const int j = static_cast<int>(rng() % static_cast<unsigned>(L));
      const int l = static_cast<int>(rng() % static_cast<unsigned>(L));
      const double a = unconventional_correlator(rho, j, l).second_term;
      worst = std::max(worst, std::abs(a - imaginary_time_correlator(h, beta, j, l)));
      ++cases;
    }
  }
  return {worst < 1e-9, std::to_string(cases) + " random (H, beta, j, l), dim <= 56, max dev " + fmt(worst)};
}

Outcome c8_appendix2() {
  const CorrelatorTable t = appendix2_study();
  std::vector<double> ratios;
  std::string detail = "dim " + std::to_string(t.basis_dim) + ", second/first d-range:";
  for (double T : t.params.temperatures) {
    const double r = t.range(T, true) / t.range(T, false);
    ratios.push_back(r);
    detail += " T=" + fmt(T) + ":" + fmt(r);
  }
  bool monotone = true;
  for (std::size_t k = 1; k < ratios.size(); ++k) monotone = monotone && ratios[k] <= ratios[k - 1];
  return {monotone && ratios.back() < 0.2, detail};
}

Outcome c9_fig2(const AcceptanceOptions& opt) {
  QuenchConfig c = quench_preset("A");
  c.shots = 100000;
  c.seed = 1;
  c.workers = opt.workers;
  const Fig2Report r = fig2_experiment(c);
  bool within = true;
  double worst_z = 0.0;
  double dev_vc = 0.0;
  double dev_raw = 0.0;
  for (const Fig2SiteRow& row : r.rows) {
    const double z = (row.vc_estimate - row.vc_exact) / row.vc_se;
    worst_z = std::max(worst_z, std::abs(z));
    within = within && std::abs(z) < 3.0;
    dev_vc += std::abs(row.vc_estimate - row.halfT_prediction);
    dev_raw += std::abs(row.raw_density - row.halfT_prediction);
  }
  dev_vc /= static_cast<double>(r.rows.size());
  dev_raw /= static_cast<double>(r.rows.size());
  const bool ok = within && dev_vc < dev_raw;
  return {ok, "fit T/J=" + fmt(1.0 / r.fit.beta) + " mu/J=" + fmt(r.fit.mu) + "; max |z| vs exact " +
                  fmt(worst_z) + "; mean |dev| from half-T: cooled " + fmt(dev_vc) + ", raw " +
                  fmt(dev_raw)};
}

Outcome c10_shot_scaling() {
  const BasisPtr b = boson_basis(6, 3);
  ModelParams p;
  p.L = 6;
  p.U = 2.0;
  ScalingOptions o;
  o.target_precision = 0.1;
  o.seed = 3;
  const ScalingStudy s = shots_scaling_study(bose_hubbard(b, p), {0.5, 1.0, 2.0}, {1, 2, 3}, o);
  double zmin = 1.0;
  double zmax = 0.0;
  for (const ScalingRow& r : s.rows) {
    zmin = std::min(zmin, r.z2);
    zmax = std::max(zmax, r.z2);
  }
  return {std::abs(s.slope - 1.0) <= 0.15, std::to_string(s.rows.size()) + " (beta, |R|) points, Z2 in [" +
                                              fmt(zmin) + ", " + fmt(zmax) + "], slope " +
                                              fmt(s.slope, 4)};
}

Outcome c11_buffering() {
  const BasisPtr b = boson_basis(8, 3);
  ModelParams p;
  p.L = 8;
  p.U = 1.0;
  const DensityMatrix rho = thermal_state(bose_hubbard(b, p), 1.0);
  const std::vector<int> region{2, 3, 4};
  const OccupationFunction center = [](OccupationSpan o) { return double(o[1]); };
  const BufferedResult w0 = buffered_estimate(rho, region, 0, center);
  const BufferedResult w2 = buffered_estimate(rho, region, 2, center);
  return {w2.error < w0.error,
          "U=J, R={2,3,4}, j=3: error " + fmt(w0.error) + " at width 0, " + fmt(w2.error) + " at width 2"};
}

Outcome c12_determinism(const AcceptanceOptions& opt) {
  namespace fs = std::filesystem;
  const nlohmann::json cfg = {
      {"kind", "virtual_density"},
      {"model", {{"statistics", "boson"}, {"L", 4}, {"N", 2}, {"U", 1.0}}},
      {"beta", 0.5},
      {"shots", 20000},
      {"seed", 42},
      {"output", "determinism"}};
  const fs::path base = fs::temp_directory_path() / ("vcool_accept_" + std::to_string(::getpid()));
  std::vector<std::string> csvs;
  for (int k = 0; k < 2; ++k) {
    RunOptions ro;
    ro.workers = opt.workers;
    ro.output_dir = base / std::to_string(k);
    write_outputs(execute_experiment(cfg, ro), ro);
    std::ifstream in(ro.output_dir / "determinism.csv", std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    csvs.push_back(ss.str());
  }
  fs::remove_all(base);
  const bool ok = !csvs[0].empty() && csvs[0] == csvs[1];
  return {ok, std::to_string(csvs[0].size()) + "-byte CSV, runs " + (ok ? "identical" : "DIFFER")};
}

struct Criterion {
  int id;
  const char* name;
  double time_limit;  // seconds; 0 = none
  std::function<Outcome(const AcceptanceOptions&)> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {1, "replica identity", 10, c1_replica_identity},
      {2, "purity identity", 0, [](const AcceptanceOptions&) { return c2_purity_identity(); }},
      {3, "master-oracle equivalence", 300, c3_master_oracle},
      {4, "thermal halving", 30, [](const AcceptanceOptions&) { return c4_thermal_halving(); }},
      {5, "ancilla exactness", 0, [](const AcceptanceOptions&) { return c5_ancilla(); }},
      {6, "distillation", 0, [](const AcceptanceOptions&) { return c6_distillation(); }},
      {7, "imaginary-time identity", 0, [](const AcceptanceOptions&) { return c7_imaginary_time(); }},
      {8, "correlator low-T reproduction", 1800, [](const AcceptanceOptions&) { return c8_appendix2(); }},
      {9, "quench virtual cooling (set A)", 1800, c9_fig2},
      {10, "shot scaling", 0, [](const AcceptanceOptions&) { return c10_shot_scaling(); }},
      {11, "buffering", 0, [](const AcceptanceOptions&) { return c11_buffering(); }},
      {12, "determinism", 0, c12_determinism},
  };
  return all;
}

}  // namespace

int criterion_count() { return static_cast<int>(criteria().size()); }

std::string format_result(const CriterionResult& r) {
  std::ostringstream s;
  s << (r.passed ? "[PASS] " : "[FAIL] ") << r.id << " " << r.name << " (" << fmt(r.seconds, 3)
    << " s): " << r.detail;
  return s.str();
}

std::vector<CriterionResult> run_acceptance(
    const AcceptanceOptions& options, const std::function<void(const CriterionResult&)>& on_result) {
  std::vector<CriterionResult> out;
  for (const Criterion& c : criteria()) {
    if (!options.only.empty() &&
        std::find(options.only.begin(), options.only.end(), c.id) == options.only.end()) {
      continue;
    }
    CriterionResult r;
    r.id = c.id;
    r.name = c.name;
    const auto start = std::chrono::steady_clock::now();
    try {
      const Outcome o = c.run(options);
      r.passed = o.passed;
      r.detail = o.detail;
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.time_limit > 0 && r.seconds > c.time_limit) {
      r.passed = false;
      r.detail += "; over the " + fmt(c.time_limit) + " s budget";
    }
    out.push_back(r);
    if (on_result) on_result(r);
  }
  return out;
}

}  // namespace vcool
