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

#include <algorithm>
#include <set>

#include "vcool/fock.hpp"

namespace vcool {
namespace {

BasisPtr bosons(int L, int N) { return enumerate_basis(Statistics::boson, L, Sector::fixed(N)); }
BasisPtr fermions(int L, int N) { return enumerate_basis(Statistics::fermion, L, Sector::fixed(N)); }

TEST(FockBasis, TwoBosonsOnTwoModes) {
  const BasisPtr b = bosons(2, 2);
  ASSERT_EQ(b->dim(), 3u);
  const std::vector<OccupationVector> expect{{2, 0}, {1, 1}, {0, 2}};
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_TRUE(std::equal(b->state(i).begin(), b->state(i).end(), expect[i].begin()));
  }
}

TEST(FockBasis, Dimensions) {
  EXPECT_EQ(fermions(4, 2)->dim(), 6u);
  EXPECT_EQ(bosons(16, 4)->dim(), 3876u);
  for (int L = 1; L <= 6; ++L) {
    for (int N = 0; N <= 5; ++N) {
      EXPECT_EQ(bosons(L, N)->dim(), binomial(N + L - 1, N));
      if (N <= L) EXPECT_EQ(fermions(L, N)->dim(), binomial(L, N));
    }
  }
}

TEST(FockBasis, InfeasibleFermionSectorRejected) {
  EXPECT_THROW(fermions(3, 4), std::invalid_argument);
  EXPECT_THROW(enumerate_basis(Statistics::boson, 0, Sector::fixed(1)), std::invalid_argument);
}

TEST(FockBasis, IndexRoundTripAndOrder) {
  for (const BasisPtr& b : {bosons(5, 4), fermions(7, 3),
                            enumerate_basis(Statistics::boson, 3, Sector::totals({0, 2, 3})),
                            enumerate_basis(Statistics::boson, 3, Sector::cutoff(2))}) {
    std::set<OccupationVector> seen;
    for (std::size_t i = 0; i < b->dim(); ++i) {
      const OccupationSpan s = b->state(i);
      EXPECT_EQ(b->index_of(s), i);
      EXPECT_TRUE(seen.emplace(s.begin(), s.end()).second);
      EXPECT_TRUE(b->sector().admits_total(b->total(i)));
      if (i > 0) {
        const OccupationSpan p = b->state(i - 1);
        if (b->sector().kind() == Sector::Kind::fixed) {
          EXPECT_TRUE(std::lexicographical_compare(s.begin(), s.end(), p.begin(), p.end()));
        }
      }
      if (b->statistics() == Statistics::fermion) {
        for (auto o : s) EXPECT_LE(o, 1);
      }
    }
  }
}

TEST(FockBasis, EnumerationIsReproducible) {
  const BasisPtr a = bosons(4, 3);
  const BasisPtr b = bosons(4, 3);
  for (std::size_t i = 0; i < a->dim(); ++i) {
    EXPECT_TRUE(std::equal(a->state(i).begin(), a->state(i).end(), b->state(i).begin()));
  }
}

TEST(FockBasis, IndexOfOutsideSector) {
  const BasisPtr b = bosons(3, 2);
  const OccupationVector wrong{1, 1, 1};
  EXPECT_FALSE(b->index_of(wrong).has_value());
}

TEST(Ladder, BosonRaise) {
  const BasisPtr b = bosons(1, 1);
  const Operator up = ladder(b, 0, Ladder::raise);
  EXPECT_NEAR(std::abs(up.dense()(0, 0) - std::sqrt(2.0)), 0.0, 1e-14);
}

TEST(Ladder, FermionRaiseOnOccupiedIsZero) {
  const BasisPtr b = fermions(2, 1);
  const Operator up = ladder(b, 0, Ladder::raise);
  const std::size_t occupied = *b->index_of(OccupationVector{1, 0});
  EXPECT_LT(up.dense().col(static_cast<Eigen::Index>(occupied)).norm(), 1e-15);
}

TEST(Ladder, FermionLowerSign) {
  const BasisPtr b = fermions(3, 3);
  const Operator down = ladder(b, 2, Ladder::lower);
  const std::size_t to = *down.row_basis_ptr()->index_of(OccupationVector{1, 1, 0});
  EXPECT_NEAR(down.dense()(static_cast<Eigen::Index>(to), 0).real(), 1.0, 1e-15);
  const Operator down1 = ladder(b, 1, Ladder::lower);
  const std::size_t to1 = *down1.row_basis_ptr()->index_of(OccupationVector{1, 0, 1});
  EXPECT_NEAR(down1.dense()(static_cast<Eigen::Index>(to1), 0).real(), -1.0, 1e-15);
}

TEST(Ladder, ModeOutOfRange) {
  EXPECT_THROW(ladder(bosons(2, 1), 2, Ladder::raise), std::out_of_range);
  EXPECT_THROW(number_op(bosons(2, 1), -1), std::out_of_range);
}

// [a_i, a+_j] = delta_ij between adjacent fixed-N sectors.
void check_canonical(Statistics st, int L, int N) {
  const BasisPtr b = enumerate_basis(st, L, Sector::fixed(N));
  const double sgn = st == Statistics::boson ? -1.0 : 1.0;
  for (int i = 0; i < L; ++i) {
    for (int j = 0; j < L; ++j) {
      const Operator up_j = ladder(b, j, Ladder::raise);
      const Operator dn_i_above = ladder(up_j.row_basis_ptr(), i, Ladder::lower);
      Matrix m = dn_i_above.compose(up_j).dense();
      if (N > 0) {
        const Operator dn_i = ladder(b, i, Ladder::lower);
        const Operator up_j_below = ladder(dn_i.row_basis_ptr(), j, Ladder::raise);
        m += sgn * up_j_below.compose(dn_i).dense();
      }
      const Matrix expect = (i == j ? 1.0 : 0.0) * Matrix::Identity(m.rows(), m.cols());
      EXPECT_LT((m - expect).cwiseAbs().maxCoeff(), 1e-12) << to_string(st) << " i=" << i << " j=" << j;
    }
  }
}

TEST(Ladder, CanonicalCommutation) {
  check_canonical(Statistics::boson, 3, 2);
  check_canonical(Statistics::boson, 2, 0);
}

TEST(Ladder, CanonicalAnticommutation) {
  check_canonical(Statistics::fermion, 4, 2);
  check_canonical(Statistics::fermion, 3, 1);
}

TEST(NumberOp, DiagonalOccupations) {
  const BasisPtr b = bosons(2, 2);
  const Matrix n0 = number_op(b, 0).dense();
  EXPECT_TRUE(n0.isApprox(Eigen::Vector3cd(2, 1, 0).asDiagonal().toDenseMatrix()));
}

TEST(NumberOp, SumIsNTimesIdentity) {
  const BasisPtr b = bosons(4, 3);
  Matrix total = Matrix::Zero(20, 20);
  for (int j = 0; j < 4; ++j) total += number_op(b, j).dense();
  EXPECT_LT((total - 3.0 * Matrix::Identity(20, 20)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(NumberOp, TraceIsHomogeneous) {
  const BasisPtr b = bosons(5, 3);
  for (int j = 0; j < 5; ++j) {
    EXPECT_NEAR(number_op(b, j).dense().trace().real(), 3.0 * double(b->dim()) / 5.0, 1e-12);
  }
}

TEST(NumberOp, EqualsRaiseTimesLower) {
  for (Statistics st : {Statistics::boson, Statistics::fermion}) {
    const BasisPtr b = enumerate_basis(st, 4, Sector::fixed(2));
    for (int j = 0; j < 4; ++j) {
      const Operator dn = ladder(b, j, Ladder::lower);
      const Operator up = ladder(dn.row_basis_ptr(), j, Ladder::raise);
      EXPECT_LT((up.compose(dn).dense() - number_op(b, j).dense()).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(Operator, FlagsAreChecked) {
  const BasisPtr b = bosons(2, 1);
  Matrix m(2, 2);
  m << 0, 1, 0, 0;
  OperatorFlags f;
  f.hermitian = true;
  EXPECT_THROW(Operator(b, m, f).check_flags(), std::logic_error);
  EXPECT_NO_THROW(number_op(b, 0).check_flags());
}

TEST(Operator, SparseAboveThreshold) {
  EXPECT_TRUE(number_op(bosons(10, 5), 0).is_sparse());  // dim 2002
  EXPECT_FALSE(number_op(bosons(3, 2), 0).is_sparse());
}

}  // namespace
}  // namespace vcool
