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

#ifndef VCOOL_MODEL_HPP
#define VCOOL_MODEL_HPP

#include <utility>
#include <vector>

#include "vcool/fock.hpp"
#include "vcool/replica.hpp"

namespace vcool {

enum class Boundary { open, periodic };

// Energies in units of J, hbar = 1.
struct ModelParams {
  int L = 1;
  double J = 1.0;
  double U = 0.0;
  Boundary boundary = Boundary::open;
  double J_BS = 1.0;
};

// Nearest-neighbour bonds (j, k), j < k for open chains. A periodic chain
// adds (L-1, 0) when L > 2; for L = 2 the wrap bond would duplicate (0, 1).
std::vector<std::pair<int, int>> chain_bonds(int L, Boundary boundary);

// H = -J sum_<jk> (a^dag_j a_k + h.c.) + (U/2) sum_j n_j (n_j - 1).
Operator bose_hubbard(const BasisPtr& basis, const ModelParams& params);

// H_BS = -J_BS sum_j (a^dag_{1,j} a_{2,j} + h.c.) on a two-copy joint basis.
Operator beamsplitter_hamiltonian(const ReplicaPtr& replica, const ModelParams& params);

// Spinless fermions: H = -J sum_<jk> (f^dag_j f_k + h.c.) + U sum_<jk> n_j n_k.
Operator fermi_hopping(const BasisPtr& basis, const ModelParams& params);

// Total particle number on a basis.
Operator total_number_op(const BasisPtr& basis);

}  // namespace vcool

#endif  // VCOOL_MODEL_HPP
