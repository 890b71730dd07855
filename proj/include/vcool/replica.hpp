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

#ifndef VCOOL_REPLICA_HPP
#define VCOOL_REPLICA_HPP

#include <array>
#include <memory>
#include <optional>
#include <vector>

#include "vcool/fock.hpp"

namespace vcool {

// n copies of a single-copy basis on n*L modes, copy-major
// (joint mode = copy * L + site, copies and sites zero-based here).
//
// The joint basis carries every total particle number reachable from
// n-tuples of copy states, so it is closed under the inter-copy Fourier
// transform and the cyclic permutation. Product states form a subset.
class ReplicaBasis {
 public:
  ReplicaBasis(BasisPtr copy_basis, int copies);

  int copies() const { return copies_; }
  int sites() const { return copy_basis_->num_modes(); }
  Statistics statistics() const { return copy_basis_->statistics(); }
  const BasisPtr& copy_basis() const { return copy_basis_; }
  const BasisPtr& joint_basis() const { return joint_basis_; }

  int joint_mode(int copy, int site) const { return copy * sites() + site; }

  // Joint index of the product state |i_1> (x) ... (x) |i_n>.
  std::size_t joint_index(std::span<const std::size_t> copy_indices) const;
  // Inverse of joint_index; empty when some copy leaves the copy sector.
  std::optional<std::vector<std::size_t>> copy_indices(std::size_t joint) const;

  // Number of product states, copy_dim^n.
  std::size_t product_dim() const { return product_to_joint_.size(); }
  // Joint index of the k-th product state, tuples in row-major order
  // (copy 0 varies slowest).
  const std::vector<std::size_t>& product_indices() const { return product_to_joint_; }

 private:
  BasisPtr copy_basis_;
  int copies_;
  BasisPtr joint_basis_;
  std::vector<std::size_t> product_to_joint_;
};

using ReplicaPtr = std::shared_ptr<const ReplicaBasis>;

ReplicaPtr make_replica(BasisPtr copy_basis, int copies);

// rho^{(x)n} embedded in the joint basis (zero outside product states).
Matrix tensor_power(const ReplicaBasis& replica, const Matrix& rho);
// |psi>^{(x)n} embedded in the joint basis.
Vector tensor_power(const ReplicaBasis& replica, const Vector& psi);

// Cyclic permutation S_n: copy p receives the content of copy p-1, i.e.
// |psi_1>|psi_2>...|psi_n> -> |psi_n>|psi_1>...|psi_{n-1}>. This is the
// direction for which S_n = F_n^dagger R_n F_n.
Operator permutation_op(const ReplicaPtr& replica);

// X_s = (1/n) sum_m S^m (X (x) 1 ...) S^m^dagger. X is only defined on the
// copy sector, so the result acts on product states and is zero elsewhere.
Operator symmetrize(const Operator& x_single, const ReplicaPtr& replica);
// Number-diagonal observable: X_s(occ) = (1/n) sum_p X(occ of copy p),
// defined on the whole joint basis.
Operator symmetrize(const OccupationFunction& x_single, const ReplicaPtr& replica);

// Inter-copy discrete Fourier transform (bosons), vacuum -> vacuum.
Operator fourier_op(const ReplicaPtr& replica);

// Phase operator R_n = prod_j exp(-i 2pi/n sum_p p n_{p,j}), copies 1-based.
Operator phase_op(const ReplicaPtr& replica);
// Eigenvalue of R_n on a joint occupation vector. `sites` restricts the
// product to a subset of sites (all sites when empty).
Complex phase_eigenvalue(const ReplicaBasis& replica, OccupationSpan joint_occupations,
                         std::span<const int> sites = {});

struct SwapIdentityReport {
  int copies = 0;
  std::size_t joint_dim = 0;
  double max_deviation = 0.0;
  bool passed = false;
};

SwapIdentityReport verify_swap_identity(const ReplicaPtr& replica, double tol = 1e-9);

// Two-copy fermionic Fourier transform: copy 1 -> (-f1 + f2)/sqrt2,
// copy 2 -> (f1 + f2)/sqrt2 on every site pair.
Operator fermionic_fourier_op(const ReplicaPtr& replica);

// Measurement operator V replacing R_2 for fermions.
Operator fermion_v_op(const ReplicaPtr& replica);

// One row of the V outcome table, keyed by parities.
enum class Parity { even, odd };
int fermion_v_table(Parity n_total, Parity half_total, Parity n_second);
int fermion_v_eigenvalue(int n_total, int n_second);

// Normal-ordered monomial f^dag_{copy1}... f_{copy1}... f^dag_{copy2}... f_{copy2}...
// with explicit site lists; each list holds distinct sites.
struct FermionMonomial {
  std::vector<int> create_copy1;
  std::vector<int> annihilate_copy1;
  std::vector<int> create_copy2;
  std::vector<int> annihilate_copy2;
  Complex coefficient{1.0, 0.0};
};

// Conjugation sign of a monomial under V from the m/n lookup table.
// m = m1 - m2 and n = n1 - n2 (signed creation minus annihilation counts).
int v_conjugation_table(int m, int n);
int v_conjugation_table(const FermionMonomial& monomial);

// Matrix of a sum of monomials on a fermionic two-copy basis.
Operator monomial_operator(const std::vector<FermionMonomial>& terms, const BasisPtr& joint_basis,
                           int sites);

// Sign s with V X V^dagger = s X when it exists on `joint_basis`
// (restricted to matrix elements whose source state satisfies `source`);
// 0 when X is not an eigen-operator of conjugation there.
int v_conjugation_direct(const FermionMonomial& monomial, const BasisPtr& joint_basis, int sites,
                         const std::function<bool(OccupationSpan)>& source = {});

struct CommutantCheck {
  bool commutes = false;  // agreed verdict
  bool table_verdict = false;
  bool direct_verdict = false;
  double direct_defect = 0.0;
};

// Decides [X, V] = 0 by table lookup per monomial and by direct conjugation;
// throws std::logic_error when the two disagree.
CommutantCheck v_commutant_check(const std::vector<FermionMonomial>& x_joint,
                                 const ReplicaPtr& replica, double tol = 1e-10);

// Applies the bosonic Fourier transform to a joint-basis vector without
// materializing the operator (site by site).
Vector apply_fourier(const ReplicaBasis& replica, const Vector& joint_state);

}  // namespace vcool

#endif  // VCOOL_REPLICA_HPP
