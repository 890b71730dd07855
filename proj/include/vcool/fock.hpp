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

#ifndef VCOOL_FOCK_HPP
#define VCOOL_FOCK_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "vcool/linalg.hpp"

namespace vcool {

enum class Statistics { boson, fermion };

std::string to_string(Statistics s);

// Particle-number constraint of a Fock basis.
class Sector {
 public:
  enum class Kind { fixed, totals, cutoff };

  static Sector fixed(int particles);
  // Union of fixed-number sectors; duplicates are removed, order is ascending.
  static Sector totals(std::vector<int> allowed);
  // Every occupation vector with per-mode occupation <= n_max.
  static Sector cutoff(int n_max);

  Kind kind() const { return kind_; }
  int particles() const;
  const std::vector<int>& allowed() const { return allowed_; }
  int n_max() const { return n_max_; }
  bool admits_total(int total) const;
  std::string describe() const;

  bool operator==(const Sector&) const = default;

 private:
  Sector(Kind kind, std::vector<int> allowed, int n_max)
      : kind_(kind), allowed_(std::move(allowed)), n_max_(n_max) {}

  Kind kind_;
  std::vector<int> allowed_;
  int n_max_;
};

using Occupation = std::uint8_t;
using OccupationSpan = std::span<const Occupation>;
using OccupationVector = std::vector<Occupation>;

std::uint64_t binomial(int n, int k);

// Occupation-number basis, ordered descending-lexicographically
// ((2,0) before (1,1) before (0,2)). Immutable after construction.
class FockBasis {
 public:
  FockBasis(Statistics statistics, int num_modes, Sector sector);

  Statistics statistics() const { return statistics_; }
  int num_modes() const { return num_modes_; }
  const Sector& sector() const { return sector_; }
  std::size_t dim() const { return dim_; }

  OccupationSpan state(std::size_t index) const {
    return {states_.data() + index * static_cast<std::size_t>(num_modes_),
            static_cast<std::size_t>(num_modes_)};
  }
  std::optional<std::size_t> index_of(OccupationSpan occupations) const;
  int total(std::size_t index) const;

  // Largest occupation any single mode may carry in this basis.
  int mode_capacity() const { return capacity_; }

  bool same_space(const FockBasis& other) const {
    return statistics_ == other.statistics_ && num_modes_ == other.num_modes_ &&
           sector_ == other.sector_;
  }

 private:
  std::uint64_t count_completions(int particles, int modes) const;
  std::optional<std::size_t> rank_fixed(OccupationSpan occupations) const;

  Statistics statistics_;
  int num_modes_;
  Sector sector_;
  int capacity_ = 0;
  std::size_t dim_ = 0;
  std::vector<Occupation> states_;
  std::unordered_map<std::string, std::size_t> lookup_;  // non-fixed sectors only
  std::vector<std::uint64_t> skip_;                      // fixed sectors only
};

using BasisPtr = std::shared_ptr<const FockBasis>;

BasisPtr enumerate_basis(Statistics statistics, int num_modes, Sector sector);

// Dense storage up to this dimension, sparse above.
inline constexpr std::size_t kSparseThreshold = 2000;

struct OperatorFlags {
  bool hermitian = false;
  bool unitary = false;
  bool diagonal = false;
};

// Matrix expressed in a Fock basis. Maps col_basis -> row_basis; the two
// coincide for square operators.
class Operator {
 public:
  using Storage = std::variant<Matrix, SparseMatrix>;

  Operator(BasisPtr basis, Matrix matrix, OperatorFlags flags = {});
  Operator(BasisPtr basis, SparseMatrix matrix, OperatorFlags flags = {});
  Operator(BasisPtr row_basis, BasisPtr col_basis, Storage matrix, OperatorFlags flags = {});

  // Chooses dense or sparse storage from the dimension.
  static Operator from_triplets(BasisPtr row_basis, BasisPtr col_basis,
                                const std::vector<Eigen::Triplet<Complex>>& triplets,
                                OperatorFlags flags = {});

  const FockBasis& basis() const { return *col_basis_; }
  const BasisPtr& basis_ptr() const { return col_basis_; }
  const BasisPtr& row_basis_ptr() const { return row_basis_; }
  const BasisPtr& col_basis_ptr() const { return col_basis_; }
  Eigen::Index rows() const;
  Eigen::Index cols() const;
  bool is_square() const { return row_basis_ == col_basis_ || row_basis_->same_space(*col_basis_); }
  bool is_sparse() const { return std::holds_alternative<SparseMatrix>(matrix_); }
  const OperatorFlags& flags() const { return flags_; }

  Matrix dense() const;
  SparseMatrix sparse() const;
  const Storage& storage() const { return matrix_; }

  Vector apply(const Vector& v) const;
  Operator adjoint() const;
  Operator compose(const Operator& right) const;  // this * right

  // Diagonal entries as reals; only meaningful for Hermitian operators.
  RealVector real_diagonal() const;
  // Largest |A_ij| over i != j.
  double off_diagonal_max() const;

  // Throws std::logic_error if a flagged property fails beyond tol.
  void check_flags(double tol = 1e-10) const;

 private:
  BasisPtr row_basis_;
  BasisPtr col_basis_;
  Storage matrix_;
  OperatorFlags flags_;
};

// Real function of an occupation vector; the natural form of any
// number-diagonal observable, valid on every particle-number sector.
using OccupationFunction = std::function<double(OccupationSpan)>;

enum class Ladder { raise, lower };

// Basis of the sector reached by one application of a raising or lowering
// operator; throws if that sector cannot be constructed.
BasisPtr shifted_basis(const BasisPtr& basis, Ladder kind);

Operator ladder(const BasisPtr& basis, int mode, Ladder kind);
Operator number_op(const BasisPtr& basis, int mode);
Operator identity_op(const BasisPtr& basis);
// Diagonal operator with entry f(occupations) on each basis state.
Operator diagonal_op(const BasisPtr& basis, const OccupationFunction& f);

// (-1)^{sum_{k<mode} n_k}: Jordan-Wigner string sign in mode order.
inline int jordan_wigner_sign(OccupationSpan occupations, int mode) {
  int parity = 0;
  for (int k = 0; k < mode; ++k) parity += occupations[static_cast<std::size_t>(k)];
  return (parity & 1) ? -1 : 1;
}

}  // namespace vcool

#endif  // VCOOL_FOCK_HPP
