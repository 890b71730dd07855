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

#include "vcool/model.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace vcool {

std::vector<std::pair<int, int>> chain_bonds(int L, Boundary boundary) {
  if (L < 1) throw std::invalid_argument("chain_bonds: L must be >= 1");
  std::vector<std::pair<int, int>> bonds;
  for (int j = 0; j + 1 < L; ++j) bonds.emplace_back(j, j + 1);
  if (boundary == Boundary::periodic && L > 2) bonds.emplace_back(L - 1, 0);
  return bonds;
}

namespace {

using Triplets = std::vector<Eigen::Triplet<Complex>>;

// Adds amplitude * c^dag_to c_from for every basis column.
void add_hopping(const FockBasis& basis, int to, int from, Complex amplitude, Triplets& out) {
  const bool fermion = basis.statistics() == Statistics::fermion;
  const auto t = static_cast<std::size_t>(to);
  const auto f = static_cast<std::size_t>(from);
  OccupationVector work(static_cast<std::size_t>(basis.num_modes()));
  for (std::size_t col = 0; col < basis.dim(); ++col) {
    const OccupationSpan s = basis.state(col);
    if (s[f] == 0) continue;
    std::copy(s.begin(), s.end(), work.begin());
    double element = 0.0;
    if (fermion) {
      if (s[t] == 1) continue;
      element = jordan_wigner_sign(work, from);
      work[f] = 0;
      element *= jordan_wigner_sign(work, to);
      work[t] = 1;
    } else {
      element = std::sqrt(static_cast<double>(s[f]));
      work[f] = static_cast<Occupation>(s[f] - 1);
      element *= std::sqrt(static_cast<double>(work[t] + 1));
      work[t] = static_cast<Occupation>(work[t] + 1);
    }
    if (auto row = basis.index_of(work)) {
      out.emplace_back(static_cast<int>(*row), static_cast<int>(col), amplitude * element);
    }
  }
}

void check_single_copy(const FockBasis& basis, const ModelParams& params, Statistics expected,
                       const char* what) {
  if (basis.statistics() != expected) {
    throw std::invalid_argument(std::string(what) + ": basis has " +
                                to_string(basis.statistics()) + " statistics");
  }
  if (basis.num_modes() != params.L) {
    throw std::invalid_argument(std::string(what) + ": basis has " +
                                std::to_string(basis.num_modes()) + " modes but L = " +
                                std::to_string(params.L));
  }
}

OperatorFlags hermitian_flags() {
  OperatorFlags f;
  f.hermitian = true;
  return f;
}

}  // namespace

Operator bose_hubbard(const BasisPtr& basis, const ModelParams& params) {
  check_single_copy(*basis, params, Statistics::boson, "bose_hubbard");
  Triplets triplets;
  for (const auto& [j, k] : chain_bonds(params.L, params.boundary)) {
    add_hopping(*basis, j, k, -params.J, triplets);
    add_hopping(*basis, k, j, -params.J, triplets);
  }
  for (std::size_t i = 0; i < basis->dim(); ++i) {
    double interaction = 0.0;
    for (Occupation n : basis->state(i)) interaction += 0.5 * params.U * n * (n - 1);
    if (interaction != 0.0) {
      triplets.emplace_back(static_cast<int>(i), static_cast<int>(i), interaction);
    }
  }
  return Operator::from_triplets(basis, basis, triplets, hermitian_flags());
}

Operator beamsplitter_hamiltonian(const ReplicaPtr& replica, const ModelParams& params) {
  if (replica->copies() != 2) {
    throw std::invalid_argument("beamsplitter_hamiltonian: needs exactly 2 copies, got " +
                                std::to_string(replica->copies()));
  }
  const FockBasis& joint = *replica->joint_basis();
  Triplets triplets;
  for (int j = 0; j < replica->sites(); ++j) {
    const int m1 = replica->joint_mode(0, j);
    const int m2 = replica->joint_mode(1, j);
    add_hopping(joint, m1, m2, -params.J_BS, triplets);
    add_hopping(joint, m2, m1, -params.J_BS, triplets);
  }
  return Operator::from_triplets(replica->joint_basis(), replica->joint_basis(), triplets,
                                 hermitian_flags());
}

Operator fermi_hopping(const BasisPtr& basis, const ModelParams& params) {
  check_single_copy(*basis, params, Statistics::fermion, "fermi_hopping");
  Triplets triplets;
  const auto bonds = chain_bonds(params.L, params.boundary);
  for (const auto& [j, k] : bonds) {
    add_hopping(*basis, j, k, -params.J, triplets);
    add_hopping(*basis, k, j, -params.J, triplets);
  }
  for (std::size_t i = 0; i < basis->dim(); ++i) {
    const OccupationSpan s = basis->state(i);
    double interaction = 0.0;
    for (const auto& [j, k] : bonds) {
      interaction += params.U * s[static_cast<std::size_t>(j)] * s[static_cast<std::size_t>(k)];
    }
    if (interaction != 0.0) {
      triplets.emplace_back(static_cast<int>(i), static_cast<int>(i), interaction);
    }
  }
  return Operator::from_triplets(basis, basis, triplets, hermitian_flags());
}

Operator total_number_op(const BasisPtr& basis) {
  return diagonal_op(basis, [](OccupationSpan s) {
    return static_cast<double>(std::accumulate(s.begin(), s.end(), 0));
  });
}

}  // namespace vcool
