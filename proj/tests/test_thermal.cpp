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

#include <gtest/gtest.h>

#include <random>

#include "vcool/model.hpp"
#include "vcool/thermal.hpp"

namespace vcool {
namespace {

BasisPtr bosons(int L, int N) { return enumerate_basis(Statistics::boson, L, Sector::fixed(N)); }

Operator hermitian(const BasisPtr& b, const Matrix& m) {
  OperatorFlags f;
  f.hermitian = true;
  return Operator(b, m, f);
}

Matrix random_hermitian(Eigen::Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix a(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index k = 0; k < d; ++k) a(i, k) = Complex(g(rng), g(rng));
  return 0.5 * (a + a.adjoint());
}

DensityMatrix diag_state(const BasisPtr& b, std::initializer_list<double> p) {
  Matrix m = Matrix::Zero(Eigen::Index(p.size()), Eigen::Index(p.size()));
  Eigen::Index k = 0;
  for (double v : p) {
    m(k, k) = v;
    ++k;
  }
  return DensityMatrix(b, m);
}

ModelParams chain(int L, double U) {
  ModelParams p;
  p.L = L;
  p.U = U;
  return p;
}

TEST(ThermalState, InfiniteTemperatureIsMaximallyMixed) {
  const BasisPtr b = bosons(3, 2);
  const DensityMatrix rho = thermal_state(bose_hubbard(b, chain(3, 1.0)), 0.0);
  EXPECT_LT((rho.matrix() - Matrix::Identity(6, 6) / 6.0).cwiseAbs().maxCoeff(), 1e-15);
  ASSERT_TRUE(rho.provenance().has_value());
  EXPECT_EQ(rho.provenance()->beta, 0.0);
}

TEST(ThermalState, LowTemperatureIsGroundProjector) {
  const BasisPtr b = bosons(4, 2);
  const Operator h = bose_hubbard(b, chain(4, 4.0));
  const Eigensystem es = eigh(h.dense());
  const Vector g = es.vectors.col(0);
  const DensityMatrix rho = thermal_state(h, 200.0);
  EXPECT_GT((g.adjoint() * rho.matrix() * g)(0, 0).real(), 1.0 - 1e-8);
}

TEST(ThermalState, TwoLevelClosedForm) {
  const BasisPtr b = bosons(2, 1);
  const double delta = 0.8, beta = 1.7;
  Matrix h = Matrix::Zero(2, 2);
  h(1, 1) = delta;
  const DensityMatrix rho = thermal_state(hermitian(b, h), beta);
  const double z = 1.0 + std::exp(-beta * delta);
  EXPECT_NEAR(rho.matrix()(0, 0).real(), 1.0 / z, 1e-15);
  EXPECT_NEAR(rho.matrix()(1, 1).real(), std::exp(-beta * delta) / z, 1e-15);
}

TEST(ThermalState, NoOverflowAtLargeBeta) {
  const BasisPtr b = bosons(2, 1);
  Matrix h = Matrix::Zero(2, 2);
  h(0, 0) = 1000.0;
  h(1, 1) = 1001.0;
  const DensityMatrix rho = thermal_state(hermitian(b, h), 50.0);
  EXPECT_NO_THROW(rho.validate());
}

TEST(ThermalState, RejectsNonHermitian) {
  const BasisPtr b = bosons(2, 1);
  Matrix h(2, 2);
  h << 0, 1, 0, 0;
  EXPECT_THROW(thermal_state(Operator(b, h), 1.0), std::invalid_argument);
}

TEST(GrandCanonical, InfiniteTemperatureAndLimits) {
  const BasisPtr b = enumerate_basis(Statistics::boson, 3, Sector::totals({0, 1, 2}));
  const Operator h = bose_hubbard(b, chain(3, 1.0));
  const Operator n = total_number_op(b);
  const DensityMatrix flat = grand_canonical_state(h, n, 0.0, 0.0);
  EXPECT_LT((flat.matrix() - Matrix::Identity(10, 10) / 10.0).cwiseAbs().maxCoeff(), 1e-14);
  const DensityMatrix empty = grand_canonical_state(h, n, 1.0, -60.0);
  EXPECT_NEAR(expectation(empty, n), 0.0, 1e-20);
}

TEST(GrandCanonical, SingleModeGeometricSeries) {
  const int cutoff = 80;
  std::vector<int> totals;
  for (int k = 0; k <= cutoff; ++k) totals.push_back(k);
  const BasisPtr b = enumerate_basis(Statistics::boson, 1, Sector::totals(totals));
  const Operator h = hermitian(b, Matrix::Zero(cutoff + 1, cutoff + 1));
  const double beta = 1.3, mu = -0.4;
  const double x = std::exp(beta * mu);
  double num = 0.0, den = 0.0;
  for (int k = 0; k <= cutoff; ++k) {
    num += k * std::pow(x, k);
    den += std::pow(x, k);
  }
  const double mean = expectation(grand_canonical_state(h, total_number_op(b), beta, mu), total_number_op(b));
  EXPECT_NEAR(mean, num / den, 1e-12);
  EXPECT_NEAR(mean, 1.0 / (std::exp(-beta * mu) - 1.0), 1e-9);  // cutoff is far out
}

TEST(GrandCanonical, RejectsNonCommutingNumber) {
  const BasisPtr b = enumerate_basis(Statistics::boson, 2, Sector::totals({0, 1}));
  Matrix h = Matrix::Zero(3, 3);
  const auto vac = Eigen::Index(*b->index_of(OccupationVector{0, 0}));
  const auto one = Eigen::Index(*b->index_of(OccupationVector{1, 0}));
  h(vac, one) = h(one, vac) = 1.0;
  EXPECT_THROW(grand_canonical_state(hermitian(b, h), total_number_op(b), 1.0, 0.0),
               std::invalid_argument);
}

TEST(MatrixPower, Basics) {
  const BasisPtr b = bosons(2, 1);
  const DensityMatrix rho = diag_state(b, {0.6, 0.4});
  EXPECT_LT((matrix_power_state(rho, 1).matrix() - rho.matrix()).norm(), 1e-15);
  const DensityMatrix sq = matrix_power_state(rho, 2);
  EXPECT_NEAR(sq.matrix()(0, 0).real(), 0.36 / 0.52, 1e-15);
  EXPECT_NEAR(sq.matrix()(1, 1).real(), 0.16 / 0.52, 1e-15);
  EXPECT_THROW(matrix_power_state(rho, 0), std::invalid_argument);
}

TEST(MatrixPower, ThermalHalvingOnRandomHamiltonians) {
  std::mt19937_64 rng(7);
  for (auto [L, N] : {std::pair{3, 2}, {4, 3}, {5, 3}, {6, 2}}) {
    const BasisPtr b = bosons(L, N);
    const Operator h = hermitian(b, random_hermitian(Eigen::Index(b->dim()), rng));
    const DensityMatrix sq = matrix_power_state(thermal_state(h, 0.7), 2);
    EXPECT_LT(0.5 * trace_norm(sq.matrix() - thermal_state(h, 1.4).matrix()), 1e-9);
    ASSERT_TRUE(sq.provenance().has_value());
    EXPECT_NEAR(sq.provenance()->beta, 1.4, 1e-15);
  }
}

TEST(Purity, KnownValues) {
  const BasisPtr b = bosons(2, 1);
  EXPECT_NEAR(purity(diag_state(b, {0.6, 0.4}), 2), 0.52, 1e-15);
  EXPECT_NEAR(purity(diag_state(b, {1.0, 0.0}), 3), 1.0, 1e-15);
  EXPECT_NEAR(purity(diag_state(b, {0.5, 0.5}), 2), 0.5, 1e-15);
  EXPECT_THROW(renyi_entropy(diag_state(b, {0.5, 0.5}), 1), std::invalid_argument);
}

TEST(Purity, RenyiBounds) {
  std::mt19937_64 rng(11);
  const BasisPtr b = bosons(4, 2);
  for (int k = 0; k < 5; ++k) {
    const DensityMatrix rho = thermal_state(hermitian(b, random_hermitian(10, rng)), 0.3 * k);
    const double s = renyi_entropy(rho, 2);
    EXPECT_GE(s, -1e-12);
    EXPECT_LE(s, std::log(10.0) + 1e-12);
  }
}

class FitTest : public ::testing::Test {
 protected:
  void SetUp() override {
    basis_ = enumerate_basis(Statistics::boson, 3, Sector::totals({0, 1, 2, 3, 4, 5, 6}));
    h_ = std::make_unique<Operator>(bose_hubbard(basis_, chain(3, 1.5)));
    n_ = std::make_unique<Operator>(total_number_op(basis_));
  }
  BasisPtr basis_;
  std::unique_ptr<Operator> h_, n_;
};

TEST_F(FitTest, RoundTrip) {
  const DensityMatrix rho = grand_canonical_state(*h_, *n_, 0.8, -0.5);
  const FitResult f = fit_effective_ensemble(*h_, *n_, expectation(rho, *h_), expectation(rho, *n_));
  ASSERT_TRUE(f.converged) << f.message;
  EXPECT_NEAR(f.beta, 0.8, 1e-6);
  EXPECT_NEAR(f.mu, -0.5, 1e-6);
  EXPECT_LT(std::abs(f.residual_energy), 1e-8);
  EXPECT_LT(std::abs(f.residual_number), 1e-8);
}

TEST_F(FitTest, InfiniteTemperatureMoments) {
  const double e = h_->dense().trace().real() / double(basis_->dim());
  const double n = n_->dense().trace().real() / double(basis_->dim());
  const FitResult f = fit_effective_ensemble(*h_, *n_, e, n);
  EXPECT_LT(std::abs(f.beta), 1e-6);
}

TEST_F(FitTest, BelowGroundEnergyIsInfeasible) {
  const FitResult f = fit_effective_ensemble(*h_, *n_, -1e3, 2.0);
  EXPECT_FALSE(f.feasible);
  EXPECT_FALSE(f.converged);
  EXPECT_FALSE(f.message.empty());
}

TEST_F(FitTest, BetaNonIncreasingInEnergy) {
  double previous = 1e300;
  const DensityMatrix cold = grand_canonical_state(*h_, *n_, 3.0, 0.0);
  const double n_target = expectation(cold, *n_);
  const double e0 = expectation(cold, *h_);
  for (int k = 0; k < 6; ++k) {
    const FitResult f = fit_effective_ensemble(*h_, *n_, e0 + 0.3 * k, n_target);
    ASSERT_TRUE(f.converged) << f.message;
    EXPECT_LE(f.beta, previous + 1e-9);
    previous = f.beta;
  }
}

TEST(ReducedDensityMatrix, ProductAndFullSites) {
  const BasisPtr b = bosons(3, 3);
  Vector psi = Vector::Zero(Eigen::Index(b->dim()));
  psi(Eigen::Index(*b->index_of(OccupationVector{1, 1, 1}))) = 1.0;
  const DensityMatrix r = reduced_density_matrix(b, psi, {0, 2});
  EXPECT_NEAR(purity(r, 2), 1.0, 1e-14);
  const DensityMatrix all = reduced_density_matrix(b, psi, {0, 1, 2});
  EXPECT_NEAR(all.matrix().trace().real(), 1.0, 1e-14);
  EXPECT_NEAR(purity(all, 2), 1.0, 1e-14);
}

}  // namespace
}  // namespace vcool
