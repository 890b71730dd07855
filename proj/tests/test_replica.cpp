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
#include "vcool/replica.hpp"
#include "vcool/thermal.hpp"

namespace vcool {
namespace {

BasisPtr bosons(int L, int N) { return enumerate_basis(Statistics::boson, L, Sector::fixed(N)); }
BasisPtr fermions(int L, int N) { return enumerate_basis(Statistics::fermion, L, Sector::fixed(N)); }

Matrix random_density(Eigen::Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix a(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index k = 0; k < d; ++k) a(i, k) = Complex(g(rng), g(rng));
  Matrix r = a * a.adjoint();
  return r / r.trace().real();
}

Matrix random_hermitian(Eigen::Index d, std::mt19937_64& rng) {
  const Matrix a = random_density(d, rng) - random_density(d, rng);
  return 0.5 * (a + a.adjoint());
}

// Product-state embedding: rho^{(x)n} on the joint basis.
Matrix joint_power(const ReplicaPtr& rep, const Matrix& rho) { return tensor_power(*rep, rho); }

Eigen::Index joint(const ReplicaPtr& rep, OccupationVector occ) {
  return Eigen::Index(*rep->joint_basis()->index_of(occ));
}

TEST(ReplicaBasis, ProductMapIsComplete) {
  const ReplicaPtr rep = make_replica(bosons(2, 1), 2);
  EXPECT_EQ(rep->joint_basis()->num_modes(), 4);
  EXPECT_EQ(rep->product_dim(), 4u);
  for (std::size_t k = 0; k < rep->product_dim(); ++k) {
    const auto tuple = rep->copy_indices(rep->product_indices()[k]);
    ASSERT_TRUE(tuple.has_value());
    EXPECT_EQ((*tuple)[0], k / 2);
    EXPECT_EQ((*tuple)[1], k % 2);
  }
}

TEST(Permutation, SwapsTwoCopies) {
  const ReplicaPtr rep = make_replica(bosons(2, 1), 2);
  const Matrix s = permutation_op(rep).dense();
  EXPECT_NEAR(std::abs(s(joint(rep, {0, 1, 1, 0}), joint(rep, {1, 0, 0, 1}))), 1.0, 1e-15);
  EXPECT_LT((s * s - Matrix::Identity(s.rows(), s.cols())).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((s - s.adjoint()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Permutation, CyclicOrder) {
  const ReplicaPtr rep = make_replica(bosons(2, 1), 3);
  const Matrix s = permutation_op(rep).dense();
  EXPECT_LT((s * s * s - Matrix::Identity(s.rows(), s.cols())).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_GT((s * s - Matrix::Identity(s.rows(), s.cols())).cwiseAbs().maxCoeff(), 0.5);
}

TEST(Permutation, TraceGivesPurity) {
  std::mt19937_64 rng(3);
  for (int n : {2, 3}) {
    const BasisPtr b = bosons(3, 2);
    const ReplicaPtr rep = make_replica(b, n);
    const Matrix s = permutation_op(rep).dense();
    const Matrix rho = random_density(6, rng);
    Matrix rn = rho;
    for (int k = 1; k < n; ++k) rn = rn * rho;
    EXPECT_NEAR(std::abs((s * joint_power(rep, rho)).trace() - rn.trace()), 0.0, 1e-12);
  }
}

TEST(Permutation, FermionSwapGivesSignedPurity) {
  std::mt19937_64 rng(5);
  const BasisPtr b = enumerate_basis(Statistics::fermion, 3, Sector::totals({1, 2}));
  const ReplicaPtr rep = make_replica(b, 2);
  const Matrix s = permutation_op(rep).dense();
  EXPECT_LT((s * s - Matrix::Identity(s.rows(), s.cols())).cwiseAbs().maxCoeff(), 1e-14);
  // Block-diagonal state in the number sectors.
  Matrix rho = Matrix::Zero(6, 6);
  std::vector<Eigen::Index> one, two;
  for (std::size_t i = 0; i < b->dim(); ++i) (b->total(i) == 1 ? one : two).push_back(Eigen::Index(i));
  const Matrix r1 = 0.4 * random_density(3, rng);
  const Matrix r2 = 0.6 * random_density(3, rng);
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) {
      rho(one[i], one[k]) = r1(i, k);
      rho(two[i], two[k]) = r2(i, k);
    }
  const double signed_purity = -(r1 * r1).trace().real() + (r2 * r2).trace().real();
  EXPECT_NEAR((s * joint_power(rep, rho)).trace().real(), signed_purity, 1e-12);
}

TEST(Symmetrize, NumberOperator) {
  const BasisPtr b = bosons(2, 2);
  const ReplicaPtr rep = make_replica(b, 2);
  const Matrix xs = symmetrize(number_op(b, 1), rep).dense();
  const Matrix expect = 0.5 * (number_op(rep->joint_basis(), rep->joint_mode(0, 1)).dense() +
                               number_op(rep->joint_basis(), rep->joint_mode(1, 1)).dense());
  const Matrix id = symmetrize(identity_op(b), rep).dense();
  // X_s acts on the product subspace of the joint basis.
  for (std::size_t r : rep->product_indices()) {
    for (std::size_t c : rep->product_indices()) {
      const auto i = Eigen::Index(r), k = Eigen::Index(c);
      EXPECT_NEAR(std::abs(xs(i, k) - expect(i, k)), 0.0, 1e-15);
      EXPECT_NEAR(std::abs(id(i, k) - (r == c ? 1.0 : 0.0)), 0.0, 1e-15);
    }
  }
}

TEST(Symmetrize, VirtualTraceIdentity) {
  std::mt19937_64 rng(9);
  const BasisPtr b = bosons(2, 2);
  for (int n : {2, 3}) {
    const ReplicaPtr rep = make_replica(b, n);
    const Matrix rho = random_density(3, rng);
    const Matrix x = random_hermitian(3, rng);
    OperatorFlags f;
    f.hermitian = true;
    const Matrix xs = symmetrize(Operator(b, x, f), rep).dense();
    const Matrix s = permutation_op(rep).dense();
    Matrix rn = rho;
    for (int k = 1; k < n; ++k) rn = rn * rho;
    EXPECT_NEAR(std::abs((xs * s * joint_power(rep, rho)).trace() - (x * rn).trace()), 0.0, 1e-12);
    EXPECT_LT(hermiticity_defect(xs), 1e-14);
  }
}

TEST(Fourier, SingleParticleInCopyOne) {
  const BasisPtr copy = enumerate_basis(Statistics::boson, 1, Sector::totals({0, 1}));
  const ReplicaPtr rep = make_replica(copy, 2);
  const Matrix f = fourier_op(rep).dense();
  const Vector out = f.col(joint(rep, {1, 0}));
  const double h = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(out(joint(rep, {1, 0})) - Complex(-h, 0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(out(joint(rep, {0, 1})) - Complex(h, 0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(f(joint(rep, {0, 0}), joint(rep, {0, 0})) - 1.0), 0.0, 1e-15);
}

TEST(Fourier, HongOuMandel) {
  const ReplicaPtr rep = make_replica(bosons(1, 1), 2);
  const Vector out = fourier_op(rep).dense().col(joint(rep, {1, 1}));
  const double h = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(out(joint(rep, {0, 2})) - h), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(out(joint(rep, {2, 0})) + h), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(out(joint(rep, {1, 1}))), 0.0, 1e-15);
}

// F = D_A exp(-i H_BS pi/4) D_B, with copy phases A = (1, i), B = (-1, -i).
TEST(Fourier, MatchesBeamsplitterEvolution) {
  for (auto [L, N] : {std::pair{1, 1}, {2, 1}, {2, 2}, {3, 2}}) {
    const ReplicaPtr rep = make_replica(bosons(L, N), 2);
    ModelParams p;
    p.L = L;
    p.J_BS = 1.0;
    const Eigensystem es = eigh(beamsplitter_hamiltonian(rep, p).dense());
    Vector ph(es.values.size());
    for (Eigen::Index k = 0; k < ph.size(); ++k) ph(k) = std::exp(Complex(0, -es.values(k) * M_PI / 4));
    const Matrix u = es.vectors * ph.asDiagonal() * es.vectors.adjoint();
    const BasisPtr& jb = rep->joint_basis();
    Vector da(Eigen::Index(jb->dim())), db(Eigen::Index(jb->dim()));
    const Complex i(0, 1);
    for (std::size_t r = 0; r < jb->dim(); ++r) {
      int n1 = 0, n2 = 0;
      for (int s = 0; s < L; ++s) {
        n1 += jb->state(r)[rep->joint_mode(0, s)];
        n2 += jb->state(r)[rep->joint_mode(1, s)];
      }
      da(Eigen::Index(r)) = std::pow(i, n2);
      db(Eigen::Index(r)) = std::pow(-1.0, n1) * std::pow(-i, n2);
    }
    const Matrix expect = da.asDiagonal() * u * db.asDiagonal();
    EXPECT_LT((fourier_op(rep).dense() - expect).cwiseAbs().maxCoeff(), 1e-12) << L << "," << N;
  }
}

TEST(Fourier, UnitaryAndNumberConserving) {
  for (int n : {2, 3}) {
    const ReplicaPtr rep = make_replica(bosons(2, 2), n);
    const Matrix f = fourier_op(rep).dense();
    EXPECT_LT((f * f.adjoint() - Matrix::Identity(f.rows(), f.cols())).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Phase, TwoCopyParityAndVacuum) {
  const ReplicaPtr rep = make_replica(bosons(2, 3), 2);
  const BasisPtr& jb = rep->joint_basis();
  EXPECT_NEAR(std::abs(phase_eigenvalue(*rep, jb->state(Eigen::Index(*jb->index_of(OccupationVector{2, 1, 0, 3})))) + 1.0), 0.0, 1e-15);
  const ReplicaPtr vac = make_replica(bosons(2, 0), 2);
  EXPECT_NEAR(std::abs(phase_op(vac).dense()(0, 0) - 1.0), 0.0, 1e-15);
}

TEST(Phase, ThreeCopyPhaseSum) {
  const ReplicaPtr rep = make_replica(bosons(2, 2), 3);
  const Matrix r = phase_op(rep).dense();
  const BasisPtr& jb = rep->joint_basis();
  for (std::size_t k = 0; k < jb->dim(); k += 7) {
    int sum = 0;
    for (int p = 0; p < 3; ++p)
      for (int s = 0; s < 2; ++s) sum += (p + 1) * jb->state(k)[rep->joint_mode(p, s)];
    const Complex expect = std::exp(Complex(0, -2.0 * M_PI / 3.0 * sum));
    EXPECT_NEAR(std::abs(r(Eigen::Index(k), Eigen::Index(k)) - expect), 0.0, 1e-12);
  }
}

TEST(SwapIdentity, SmallSectors) {
  EXPECT_LT(verify_swap_identity(make_replica(bosons(2, 1), 2)).max_deviation, 1e-12);
  EXPECT_LT(verify_swap_identity(make_replica(bosons(1, 1), 3)).max_deviation, 1e-12);
  EXPECT_EQ(verify_swap_identity(make_replica(bosons(3, 0), 2)).max_deviation, 0.0);
  const SwapIdentityReport r = verify_swap_identity(make_replica(bosons(3, 3), 2));
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.joint_dim, binomial(6 + 5, 6));
}

TEST(SwapIdentity, OperatorsConserveNumber) {
  const BasisPtr copy = enumerate_basis(Statistics::boson, 2, Sector::totals({0, 1, 2}));
  const ReplicaPtr rep = make_replica(copy, 2);
  const Matrix n = total_number_op(rep->joint_basis()).dense();
  for (const Matrix& m : {fourier_op(rep).dense(), phase_op(rep).dense(), permutation_op(rep).dense()}) {
    EXPECT_LT((m * n - n * m).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(FermionFourier, SingleFermionAndPair) {
  const BasisPtr copy = enumerate_basis(Statistics::fermion, 1, Sector::totals({0, 1}));
  const ReplicaPtr rep = make_replica(copy, 2);
  const Matrix f = fermionic_fourier_op(rep).dense();
  const double h = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(f(joint(rep, {1, 0}), joint(rep, {1, 0})) + h), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(f(joint(rep, {0, 1}), joint(rep, {1, 0})) - h), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(std::abs(f(joint(rep, {1, 1}), joint(rep, {1, 1}))) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(f(joint(rep, {0, 0}), joint(rep, {0, 0})) - 1.0), 0.0, 1e-15);
  const ReplicaPtr big = make_replica(fermions(3, 2), 2);
  const Matrix g = fermionic_fourier_op(big).dense();
  EXPECT_LT((g * g.adjoint() - Matrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(FermionV, TableRows) {
  using P = Parity;
  EXPECT_EQ(fermion_v_table(P::even, P::odd, P::even), -1);
  EXPECT_EQ(fermion_v_table(P::even, P::even, P::even), 1);
  EXPECT_EQ(fermion_v_eigenvalue(2, 0), -1);
  EXPECT_EQ(fermion_v_eigenvalue(0, 0), 1);
  // The result does not depend on the N_tot parity key.
  for (P h : {P::even, P::odd})
    for (P n2 : {P::even, P::odd}) EXPECT_EQ(fermion_v_table(P::even, h, n2), fermion_v_table(P::odd, h, n2));
}

TEST(FermionV, PurityIdentity) {
  std::mt19937_64 rng(13);
  for (auto [L, N] : {std::pair{2, 1}, {3, 2}, {4, 2}}) {
    const BasisPtr b = fermions(L, N);
    const ReplicaPtr rep = make_replica(b, 2);
    const Matrix f = fermionic_fourier_op(rep).dense();
    const Matrix v = fermion_v_op(rep).dense();
    const Matrix rho = random_density(Eigen::Index(b->dim()), rng);
    const Complex lhs = (v * f * joint_power(rep, rho) * f.adjoint()).trace();
    EXPECT_NEAR(std::abs(lhs - (rho * rho).trace()), 0.0, 1e-10);
  }
}

TEST(FermionV, ConjugationTable) {
  EXPECT_EQ(v_conjugation_table(0, 0), 1);
  EXPECT_EQ(v_conjugation_table(1, 0), -1);
  FermionMonomial hop;
  hop.create_copy1 = {0};
  hop.annihilate_copy1 = {1};
  EXPECT_EQ(v_conjugation_table(hop), 1);
  FermionMonomial single;
  single.create_copy1 = {0};
  EXPECT_EQ(v_conjugation_table(single), -1);
}

TEST(FermionV, CommutantCheckOnSymmetrizedDensity) {
  const ReplicaPtr rep = make_replica(fermions(3, 1), 2);
  FermionMonomial a, b;
  a.create_copy1 = a.annihilate_copy1 = {1};
  a.coefficient = 0.5;
  b.create_copy2 = b.annihilate_copy2 = {1};
  b.coefficient = 0.5;
  const CommutantCheck c = v_commutant_check({a, b}, rep);
  EXPECT_TRUE(c.commutes);
  EXPECT_TRUE(c.table_verdict);
  EXPECT_TRUE(c.direct_verdict);
}

// Exhaustive sweep of number-conserving monomials on two sites per copy.
TEST(FermionV, TableAgreesWithDirectConjugation) {
  const int L = 2;
  const BasisPtr copy = enumerate_basis(Statistics::fermion, L, Sector::totals({0, 1, 2}));
  const ReplicaPtr rep = make_replica(copy, 2);
  int checked = 0;
  for (int mask = 0; mask < (1 << (4 * L)); ++mask) {
    FermionMonomial m;
    for (int s = 0; s < L; ++s) {
      if (mask & (1 << s)) m.create_copy1.push_back(s);
      if (mask & (1 << (L + s))) m.annihilate_copy1.push_back(s);
      if (mask & (1 << (2 * L + s))) m.create_copy2.push_back(s);
      if (mask & (1 << (3 * L + s))) m.annihilate_copy2.push_back(s);
    }
    const int total = int(m.create_copy1.size() + m.create_copy2.size()) -
                      int(m.annihilate_copy1.size() + m.annihilate_copy2.size());
    if (total != 0) continue;
    const int direct = v_conjugation_direct(m, rep->joint_basis(), L);
    EXPECT_NE(direct, 0) << "mixed signs, mask " << mask;
    EXPECT_EQ(direct, v_conjugation_table(m)) << "mask " << mask;
    ++checked;
  }
  EXPECT_GT(checked, 20);
}

}  // namespace
}  // namespace vcool
