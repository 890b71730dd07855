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

#include "vcool/replica.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace vcool {

namespace {

using Triplets = std::vector<Eigen::Triplet<Complex>>;

Sector joint_sector(const Sector& copy, int copies) {
  switch (copy.kind()) {
    case Sector::Kind::fixed:
      return Sector::fixed(copy.particles() * copies);
    case Sector::Kind::totals: {
      std::set<int> sums{0};
      for (int c = 0; c < copies; ++c) {
        std::set<int> next;
        for (int s : sums) {
          for (int a : copy.allowed()) next.insert(s + a);
        }
        sums = std::move(next);
      }
      return Sector::totals(std::vector<int>(sums.begin(), sums.end()));
    }
    case Sector::Kind::cutoff:
      break;
  }
  throw std::invalid_argument(
      "ReplicaBasis: copy basis needs a particle-number sector; cutoff bases are not closed "
      "under inter-copy mode mixing");
}

// Image of each creation operator under a linear mode transformation:
// c^dag_m -> sum_k coeff * c^dag_k.
using ModeImage = std::vector<std::pair<int, Complex>>;

// Expands prod_m (c^dag_m)^{s_m} / sqrt(s_m!) |0>, modes ascending, under
// the mode map, and returns the resulting occupation-basis amplitudes.
// Fermionic terms are brought back to ascending mode order with the
// corresponding sign.
std::map<OccupationVector, Complex> expand_state(OccupationSpan s,
                                                 const std::vector<ModeImage>& images,
                                                 Statistics statistics) {
  const bool fermion = statistics == Statistics::fermion;
  std::vector<int> sequence;
  double norm = 1.0;
  for (std::size_t m = 0; m < s.size(); ++m) {
    for (int r = 0; r < s[m]; ++r) sequence.push_back(static_cast<int>(m));
    if (!fermion) norm *= std::tgamma(s[m] + 1.0);
  }
  norm = 1.0 / std::sqrt(norm);

  std::map<OccupationVector, Complex> out;
  OccupationVector counts(s.size(), 0);
  std::function<void(std::size_t, Complex, int)> visit = [&](std::size_t pos, Complex amp,
                                                             int inversions) {
    if (pos == sequence.size()) {
      double factor = norm;
      if (fermion) {
        if (inversions & 1) factor = -factor;
      } else {
        for (Occupation c : counts) factor *= std::sqrt(std::tgamma(c + 1.0));
      }
      out[counts] += amp * factor;
      return;
    }
    for (const auto& [k, coeff] : images[static_cast<std::size_t>(sequence[pos])]) {
      const auto ku = static_cast<std::size_t>(k);
      int extra = 0;
      if (fermion) {
        if (counts[ku] != 0) continue;
        for (std::size_t q = ku + 1; q < counts.size(); ++q) extra += counts[q];
      }
      ++counts[ku];
      visit(pos + 1, amp * coeff, inversions + extra);
      --counts[ku];
    }
  };
  visit(0, Complex(1.0, 0.0), 0);
  for (auto it = out.begin(); it != out.end();) {
    it = std::abs(it->second) < 1e-15 ? out.erase(it) : std::next(it);
  }
  return out;
}

// Local image of copy p on one site under F_n: (1/sqrt n) sum_k w^{-kp} a^dag_k
// with 1-based p, k and w = exp(i 2pi/n).
std::vector<ModeImage> fourier_site_images(int copies) {
  std::vector<ModeImage> images(static_cast<std::size_t>(copies));
  const double scale = 1.0 / std::sqrt(static_cast<double>(copies));
  for (int p = 1; p <= copies; ++p) {
    for (int k = 1; k <= copies; ++k) {
      const int phase_index = (k * p) % copies;
      Complex phase;
      if (phase_index == 0) {
        phase = 1.0;
      } else if (2 * phase_index == copies) {
        phase = -1.0;
      } else {
        phase = std::polar(1.0, -2.0 * std::numbers::pi * phase_index / copies);
      }
      images[static_cast<std::size_t>(p - 1)].emplace_back(k - 1, scale * phase);
    }
  }
  return images;
}

// Per-site action of the bosonic F_n, cached by local occupation tuple.
class SiteFourier {
 public:
  explicit SiteFourier(int copies) : copies_(copies), images_(fourier_site_images(copies)) {}

  using Outputs = std::vector<std::pair<OccupationVector, Complex>>;

  const Outputs& outputs(const OccupationVector& local) {
    std::uint64_t key = 0;
    for (Occupation o : local) key = key * 256 + o;
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    Outputs outs;
    for (auto& [occ, amp] : expand_state(local, images_, Statistics::boson)) {
      outs.emplace_back(occ, amp);
    }
    return cache_.emplace(key, std::move(outs)).first->second;
  }

  int copies() const { return copies_; }

 private:
  int copies_;
  std::vector<ModeImage> images_;
  std::unordered_map<std::uint64_t, Outputs> cache_;
};

Complex root_of_unity(int k, int n) {
  k %= n;
  if (k < 0) k += n;
  if (k == 0) return 1.0;
  if (2 * k == n) return -1.0;
  return std::polar(1.0, -2.0 * std::numbers::pi * k / n);
}

void require_statistics(const ReplicaBasis& replica, Statistics s, const char* what) {
  if (replica.statistics() != s) {
    throw std::invalid_argument(std::string(what) + ": requires " + to_string(s) +
                                " replicas");
  }
}

void require_two_copies(const ReplicaBasis& replica, const char* what) {
  if (replica.copies() != 2) {
    throw std::invalid_argument(std::string(what) + ": requires n = 2 copies, got " +
                                std::to_string(replica.copies()));
  }
}

Operator operator_from_expansion(const ReplicaPtr& replica, const std::vector<ModeImage>& images,
                                 OperatorFlags flags) {
  const BasisPtr& joint = replica->joint_basis();
  Triplets triplets;
  for (std::size_t col = 0; col < joint->dim(); ++col) {
    for (const auto& [occ, amp] : expand_state(joint->state(col), images, joint->statistics())) {
      auto row = joint->index_of(occ);
      if (!row) throw std::logic_error("mode transform left the joint basis");
      triplets.emplace_back(static_cast<int>(*row), static_cast<int>(col), amp);
    }
  }
  return Operator::from_triplets(joint, joint, triplets, flags);
}

}  // namespace

// ---------------------------------------------------------------------------
// ReplicaBasis

ReplicaBasis::ReplicaBasis(BasisPtr copy_basis, int copies)
    : copy_basis_(std::move(copy_basis)), copies_(copies) {
  if (!copy_basis_) throw std::invalid_argument("ReplicaBasis: null copy basis");
  if (copies_ < 1) throw std::invalid_argument("ReplicaBasis: copies must be >= 1");
  joint_basis_ = enumerate_basis(copy_basis_->statistics(), copies_ * copy_basis_->num_modes(),
                                 joint_sector(copy_basis_->sector(), copies_));

  const std::size_t d = copy_basis_->dim();
  std::size_t total = 1;
  for (int c = 0; c < copies_; ++c) total *= d;
  product_to_joint_.resize(total);
  std::vector<std::size_t> tuple(static_cast<std::size_t>(copies_), 0);
  for (std::size_t k = 0; k < total; ++k) {
    std::size_t rest = k;
    for (int c = copies_ - 1; c >= 0; --c) {
      tuple[static_cast<std::size_t>(c)] = rest % d;
      rest /= d;
    }
    product_to_joint_[k] = joint_index(tuple);
  }
}

std::size_t ReplicaBasis::joint_index(std::span<const std::size_t> copy_indices) const {
  if (copy_indices.size() != static_cast<std::size_t>(copies_)) {
    throw std::invalid_argument("ReplicaBasis::joint_index: wrong tuple length");
  }
  OccupationVector occ;
  occ.reserve(static_cast<std::size_t>(copies_ * sites()));
  for (std::size_t i : copy_indices) {
    const OccupationSpan s = copy_basis_->state(i);
    occ.insert(occ.end(), s.begin(), s.end());
  }
  auto idx = joint_basis_->index_of(occ);
  if (!idx) throw std::logic_error("ReplicaBasis: product state missing from joint basis");
  return *idx;
}

std::optional<std::vector<std::size_t>> ReplicaBasis::copy_indices(std::size_t joint) const {
  const OccupationSpan s = joint_basis_->state(joint);
  const auto L = static_cast<std::size_t>(sites());
  std::vector<std::size_t> out;
  for (int c = 0; c < copies_; ++c) {
    auto idx = copy_basis_->index_of(s.subspan(static_cast<std::size_t>(c) * L, L));
    if (!idx) return std::nullopt;
    out.push_back(*idx);
  }
  return out;
}

ReplicaPtr make_replica(BasisPtr copy_basis, int copies) {
  return std::make_shared<const ReplicaBasis>(std::move(copy_basis), copies);
}

Matrix tensor_power(const ReplicaBasis& replica, const Matrix& rho) {
  const auto d = static_cast<Eigen::Index>(replica.copy_basis()->dim());
  if (rho.rows() != d || rho.cols() != d) {
    throw std::invalid_argument("tensor_power: matrix does not match the copy basis");
  }
  // Kronecker power in row-major tuple order, then scatter into the joint basis.
  Matrix kron = rho;
  for (int c = 1; c < replica.copies(); ++c) {
    Matrix next(kron.rows() * d, kron.cols() * d);
    for (Eigen::Index i = 0; i < kron.rows(); ++i) {
      for (Eigen::Index j = 0; j < kron.cols(); ++j) {
        next.block(i * d, j * d, d, d) = kron(i, j) * rho;
      }
    }
    kron = std::move(next);
  }
  const auto D = static_cast<Eigen::Index>(replica.joint_basis()->dim());
  const auto& idx = replica.product_indices();
  Matrix out = Matrix::Zero(D, D);
  for (Eigen::Index a = 0; a < kron.rows(); ++a) {
    for (Eigen::Index b = 0; b < kron.cols(); ++b) {
      out(static_cast<Eigen::Index>(idx[static_cast<std::size_t>(a)]),
          static_cast<Eigen::Index>(idx[static_cast<std::size_t>(b)])) = kron(a, b);
    }
  }
  return out;
}

Vector tensor_power(const ReplicaBasis& replica, const Vector& psi) {
  const auto d = replica.copy_basis()->dim();
  if (static_cast<std::size_t>(psi.size()) != d) {
    throw std::invalid_argument("tensor_power: vector does not match the copy basis");
  }
  Vector out = Vector::Zero(static_cast<Eigen::Index>(replica.joint_basis()->dim()));
  const auto& idx = replica.product_indices();
  for (std::size_t k = 0; k < idx.size(); ++k) {
    std::size_t rest = k;
    Complex amp = 1.0;
    for (int c = 0; c < replica.copies(); ++c) {
      amp *= psi(static_cast<Eigen::Index>(rest % d));
      rest /= d;
    }
    out(static_cast<Eigen::Index>(idx[k])) = amp;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Permutation, symmetrization

Operator permutation_op(const ReplicaPtr& replica) {
  const int n = replica->copies();
  const int L = replica->sites();
  OperatorFlags flags;
  flags.unitary = true;
  flags.hermitian = n <= 2;

  if (replica->statistics() == Statistics::fermion) {
    // c^dag_{p,j} -> c^dag_{p+1,j}; ordering signs come from the expansion.
    std::vector<ModeImage> images(static_cast<std::size_t>(n * L));
    for (int p = 0; p < n; ++p) {
      for (int j = 0; j < L; ++j) {
        images[static_cast<std::size_t>(replica->joint_mode(p, j))] = {
            {replica->joint_mode((p + 1) % n, j), Complex(1.0, 0.0)}};
      }
    }
    return operator_from_expansion(replica, images, flags);
  }

  const BasisPtr& joint = replica->joint_basis();
  Triplets triplets;
  triplets.reserve(joint->dim());
  OccupationVector out(static_cast<std::size_t>(n * L));
  const auto Lu = static_cast<std::size_t>(L);
  for (std::size_t col = 0; col < joint->dim(); ++col) {
    const OccupationSpan s = joint->state(col);
    for (int p = 0; p < n; ++p) {
      const auto src = static_cast<std::size_t>((p + n - 1) % n) * Lu;
      std::copy_n(s.begin() + static_cast<std::ptrdiff_t>(src), L,
                  out.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(p) * Lu));
    }
    triplets.emplace_back(static_cast<int>(*joint->index_of(out)), static_cast<int>(col), 1.0);
  }
  return Operator::from_triplets(joint, joint, triplets, flags);
}

Operator symmetrize(const Operator& x_single, const ReplicaPtr& replica) {
  if (!x_single.is_square() || !x_single.basis().same_space(*replica->copy_basis())) {
    throw std::invalid_argument("symmetrize: observable is not defined on the copy basis");
  }
  const int n = replica->copies();
  const std::size_t d = replica->copy_basis()->dim();
  const Matrix x = x_single.dense();
  const auto& idx = replica->product_indices();

  // sum_p X acting on copy p, accumulated over product-state pairs.
  Triplets triplets;
  std::vector<std::size_t> tuple(static_cast<std::size_t>(n));
  for (std::size_t k = 0; k < idx.size(); ++k) {
    std::size_t rest = k;
    for (int c = n - 1; c >= 0; --c) {
      tuple[static_cast<std::size_t>(c)] = rest % d;
      rest /= d;
    }
    for (int p = 0; p < n; ++p) {
      const std::size_t ip = tuple[static_cast<std::size_t>(p)];
      std::vector<std::size_t> row_tuple = tuple;
      for (std::size_t r = 0; r < d; ++r) {
        const Complex v = x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(ip));
        if (v == Complex(0.0, 0.0)) continue;
        row_tuple[static_cast<std::size_t>(p)] = r;
        triplets.emplace_back(static_cast<int>(replica->joint_index(row_tuple)),
                              static_cast<int>(idx[k]), v / static_cast<double>(n));
      }
    }
  }
  OperatorFlags flags;
  flags.hermitian = x_single.flags().hermitian;
  flags.diagonal = x_single.flags().diagonal;
  return Operator::from_triplets(replica->joint_basis(), replica->joint_basis(), triplets, flags);
}

Operator symmetrize(const OccupationFunction& x_single, const ReplicaPtr& replica) {
  const int n = replica->copies();
  const auto L = static_cast<std::size_t>(replica->sites());
  return diagonal_op(replica->joint_basis(), [&](OccupationSpan s) {
    double acc = 0.0;
    for (int p = 0; p < n; ++p) acc += x_single(s.subspan(static_cast<std::size_t>(p) * L, L));
    return acc / n;
  });
}

// ---------------------------------------------------------------------------
// Fourier transform and phase operator

Operator fourier_op(const ReplicaPtr& replica) {
  require_statistics(*replica, Statistics::boson, "fourier_op");
  const int n = replica->copies();
  const int L = replica->sites();
  const BasisPtr& joint = replica->joint_basis();
  SiteFourier site(n);

  Triplets triplets;
  std::vector<std::pair<OccupationVector, Complex>> partial, next;
  OccupationVector local(static_cast<std::size_t>(n));
  for (std::size_t col = 0; col < joint->dim(); ++col) {
    const OccupationSpan s = joint->state(col);
    partial.assign(1, {OccupationVector(s.begin(), s.end()), Complex(1.0, 0.0)});
    for (int j = 0; j < L; ++j) {
      bool empty = true;
      for (int p = 0; p < n; ++p) {
        local[static_cast<std::size_t>(p)] = s[static_cast<std::size_t>(replica->joint_mode(p, j))];
        empty = empty && local[static_cast<std::size_t>(p)] == 0;
      }
      if (empty) continue;
      next.clear();
      for (const auto& [occ, amp] : partial) {
        for (const auto& [out_local, coeff] : site.outputs(local)) {
          OccupationVector o = occ;
          for (int p = 0; p < n; ++p) {
            o[static_cast<std::size_t>(replica->joint_mode(p, j))] = out_local[static_cast<std::size_t>(p)];
          }
          next.emplace_back(std::move(o), amp * coeff);
        }
      }
      partial.swap(next);
    }
    for (const auto& [occ, amp] : partial) {
      triplets.emplace_back(static_cast<int>(*joint->index_of(occ)), static_cast<int>(col), amp);
    }
  }
  OperatorFlags flags;
  flags.unitary = true;
  return Operator::from_triplets(joint, joint, triplets, flags);
}

Vector apply_fourier(const ReplicaBasis& replica, const Vector& joint_state) {
  require_statistics(replica, Statistics::boson, "apply_fourier");
  const FockBasis& joint = *replica.joint_basis();
  if (static_cast<std::size_t>(joint_state.size()) != joint.dim()) {
    throw std::invalid_argument("apply_fourier: vector does not match the joint basis");
  }
  const int n = replica.copies();
  SiteFourier site(n);
  Vector current = joint_state;
  Vector next(current.size());
  OccupationVector local(static_cast<std::size_t>(n));
  OccupationVector work(static_cast<std::size_t>(joint.num_modes()));
  for (int j = 0; j < replica.sites(); ++j) {
    next.setZero();
    for (std::size_t i = 0; i < joint.dim(); ++i) {
      const Complex amp = current(static_cast<Eigen::Index>(i));
      if (amp == Complex(0.0, 0.0)) continue;
      const OccupationSpan s = joint.state(i);
      bool empty = true;
      for (int p = 0; p < n; ++p) {
        local[static_cast<std::size_t>(p)] = s[static_cast<std::size_t>(replica.joint_mode(p, j))];
        empty = empty && local[static_cast<std::size_t>(p)] == 0;
      }
      if (empty) {
        next(static_cast<Eigen::Index>(i)) += amp;
        continue;
      }
      std::copy(s.begin(), s.end(), work.begin());
      for (const auto& [out_local, coeff] : site.outputs(local)) {
        for (int p = 0; p < n; ++p) {
          work[static_cast<std::size_t>(replica.joint_mode(p, j))] = out_local[static_cast<std::size_t>(p)];
        }
        next(static_cast<Eigen::Index>(*joint.index_of(work))) += amp * coeff;
      }
    }
    current.swap(next);
  }
  return current;
}

Complex phase_eigenvalue(const ReplicaBasis& replica, OccupationSpan occ,
                         std::span<const int> sites) {
  const int n = replica.copies();
  long exponent = 0;
  auto add_site = [&](int j) {
    for (int p = 0; p < n; ++p) {
      exponent += static_cast<long>(p + 1) * occ[static_cast<std::size_t>(replica.joint_mode(p, j))];
    }
  };
  if (sites.empty()) {
    for (int j = 0; j < replica.sites(); ++j) add_site(j);
  } else {
    for (int j : sites) add_site(j);
  }
  return root_of_unity(static_cast<int>(exponent % n), n);
}

Operator phase_op(const ReplicaPtr& replica) {
  require_statistics(*replica, Statistics::boson, "phase_op");
  const BasisPtr& joint = replica->joint_basis();
  Triplets triplets;
  triplets.reserve(joint->dim());
  for (std::size_t i = 0; i < joint->dim(); ++i) {
    triplets.emplace_back(static_cast<int>(i), static_cast<int>(i),
                          phase_eigenvalue(*replica, joint->state(i)));
  }
  OperatorFlags flags;
  flags.unitary = flags.diagonal = true;
  flags.hermitian = replica->copies() <= 2;
  return Operator::from_triplets(joint, joint, triplets, flags);
}

SwapIdentityReport verify_swap_identity(const ReplicaPtr& replica, double tol) {
  const SparseMatrix S = permutation_op(replica).sparse();
  const SparseMatrix F = fourier_op(replica).sparse();
  const SparseMatrix R = phase_op(replica).sparse();
  const SparseMatrix diff = SparseMatrix(F.adjoint()) * R * F - S;
  SwapIdentityReport report;
  report.copies = replica->copies();
  report.joint_dim = replica->joint_basis()->dim();
  report.max_deviation = diff.nonZeros() ? diff.coeffs().cwiseAbs().maxCoeff() : 0.0;
  report.passed = report.max_deviation < tol;
  return report;
}

// ---------------------------------------------------------------------------
// Fermions

Operator fermionic_fourier_op(const ReplicaPtr& replica) {
  require_statistics(*replica, Statistics::fermion, "fermionic_fourier_op");
  require_two_copies(*replica, "fermionic_fourier_op");
  const int L = replica->sites();
  const double h = 1.0 / std::sqrt(2.0);
  std::vector<ModeImage> images(static_cast<std::size_t>(2 * L));
  for (int j = 0; j < L; ++j) {
    const int m1 = replica->joint_mode(0, j);
    const int m2 = replica->joint_mode(1, j);
    images[static_cast<std::size_t>(m1)] = {{m1, Complex(-h, 0.0)}, {m2, Complex(h, 0.0)}};
    images[static_cast<std::size_t>(m2)] = {{m1, Complex(h, 0.0)}, {m2, Complex(h, 0.0)}};
  }
  OperatorFlags flags;
  flags.unitary = true;
  return operator_from_expansion(replica, images, flags);
}

namespace {

struct VRow {
  Parity n_total;
  Parity half_total;
  Parity n_second;
  int result;
};

// Outcome table for V, transcribed row by row.
constexpr std::array<VRow, 8> kVTable{{
    {Parity::even, Parity::even, Parity::even, +1},
    {Parity::even, Parity::even, Parity::odd, -1},
    {Parity::even, Parity::odd, Parity::even, -1},
    {Parity::even, Parity::odd, Parity::odd, +1},
    {Parity::odd, Parity::even, Parity::even, +1},
    {Parity::odd, Parity::even, Parity::odd, -1},
    {Parity::odd, Parity::odd, Parity::even, -1},
    {Parity::odd, Parity::odd, Parity::odd, +1},
}};

struct ConjugationRow {
  int sum_mod2;
  int sum_mod4;
  int n_mod2;
  int result;
};

// Sign of V X V^dagger for a monomial X, transcribed row by row.
constexpr std::array<ConjugationRow, 8> kConjugationTable{{
    {0, 2, 0, -1},
    {0, 2, 1, +1},
    {0, 0, 0, +1},
    {0, 0, 1, -1},
    {1, 1, 0, -1},
    {1, 1, 1, +1},
    {1, 3, 0, +1},
    {1, 3, 1, -1},
}};

Parity parity_of(int k) { return (k % 2 == 0) ? Parity::even : Parity::odd; }

int positive_mod(int a, int m) { return ((a % m) + m) % m; }

// Applies c or c^dag on `mode` in place; returns the Jordan-Wigner sign or 0.
int apply_fermion(OccupationVector& occ, int mode, bool create) {
  const auto m = static_cast<std::size_t>(mode);
  if (create == (occ[m] == 1)) return 0;
  const int sign = jordan_wigner_sign(occ, mode);
  occ[m] = create ? 1 : 0;
  return sign;
}

std::vector<std::pair<int, bool>> monomial_sequence(const FermionMonomial& x, int sites) {
  // Written order; applied right to left.
  std::vector<std::pair<int, bool>> ops;
  for (int i : x.create_copy1) ops.emplace_back(i, true);
  for (int i : x.annihilate_copy1) ops.emplace_back(i, false);
  for (int i : x.create_copy2) ops.emplace_back(sites + i, true);
  for (int i : x.annihilate_copy2) ops.emplace_back(sites + i, false);
  return ops;
}

int v_of_state(OccupationSpan s, int sites) {
  int total = 0;
  int second = 0;
  for (std::size_t m = 0; m < s.size(); ++m) {
    total += s[m];
    if (static_cast<int>(m) >= sites) second += s[m];
  }
  return fermion_v_eigenvalue(total, second);
}

}  // namespace

int fermion_v_table(Parity n_total, Parity half_total, Parity n_second) {
  for (const VRow& row : kVTable) {
    if (row.n_total == n_total && row.half_total == half_total && row.n_second == n_second) {
      return row.result;
    }
  }
  throw std::logic_error("fermion_v_table: no matching row");
}

int fermion_v_eigenvalue(int n_total, int n_second) {
  return fermion_v_table(parity_of(n_total), parity_of(n_total / 2), parity_of(n_second));
}

Operator fermion_v_op(const ReplicaPtr& replica) {
  require_statistics(*replica, Statistics::fermion, "fermion_v_op");
  require_two_copies(*replica, "fermion_v_op");
  const int L = replica->sites();
  Operator v = diagonal_op(replica->joint_basis(), [L](OccupationSpan s) {
    return static_cast<double>(v_of_state(s, L));
  });
  OperatorFlags flags = v.flags();
  flags.unitary = true;
  return Operator(v.row_basis_ptr(), v.col_basis_ptr(), v.storage(), flags);
}

int v_conjugation_table(int m, int n) {
  const int s = m + n;
  const int mod2 = positive_mod(s, 2);
  const int mod4 = positive_mod(s, 4);
  const int nmod2 = positive_mod(n, 2);
  for (const ConjugationRow& row : kConjugationTable) {
    if (row.sum_mod2 == mod2 && row.sum_mod4 == mod4 && row.n_mod2 == nmod2) return row.result;
  }
  throw std::logic_error("v_conjugation_table: no matching row");
}

int v_conjugation_table(const FermionMonomial& x) {
  const int m = static_cast<int>(x.create_copy1.size()) - static_cast<int>(x.annihilate_copy1.size());
  const int n = static_cast<int>(x.create_copy2.size()) - static_cast<int>(x.annihilate_copy2.size());
  return v_conjugation_table(m, n);
}

Operator monomial_operator(const std::vector<FermionMonomial>& terms, const BasisPtr& joint,
                           int sites) {
  if (joint->statistics() != Statistics::fermion || joint->num_modes() != 2 * sites) {
    throw std::invalid_argument("monomial_operator: needs a two-copy fermionic basis");
  }
  Triplets triplets;
  OccupationVector work(static_cast<std::size_t>(joint->num_modes()));
  for (const FermionMonomial& x : terms) {
    const auto ops = monomial_sequence(x, sites);
    for (std::size_t col = 0; col < joint->dim(); ++col) {
      const OccupationSpan s = joint->state(col);
      std::copy(s.begin(), s.end(), work.begin());
      int sign = 1;
      for (auto it = ops.rbegin(); it != ops.rend() && sign != 0; ++it) {
        sign *= apply_fermion(work, it->first, it->second);
      }
      if (sign == 0) continue;
      if (auto row = joint->index_of(work)) {
        triplets.emplace_back(static_cast<int>(*row), static_cast<int>(col),
                              x.coefficient * static_cast<double>(sign));
      }
    }
  }
  return Operator::from_triplets(joint, joint, triplets);
}

int v_conjugation_direct(const FermionMonomial& monomial, const BasisPtr& joint, int sites,
                         const std::function<bool(OccupationSpan)>& source) {
  const SparseMatrix x = monomial_operator({monomial}, joint, sites).sparse();
  int sign = 0;
  for (Eigen::Index k = 0; k < x.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(x, k); it; ++it) {
      if (it.value() == Complex(0.0, 0.0)) continue;
      const OccupationSpan src = joint->state(static_cast<std::size_t>(it.col()));
      if (source && !source(src)) continue;
      const int s = v_of_state(joint->state(static_cast<std::size_t>(it.row())), sites) *
                    v_of_state(src, sites);
      if (sign == 0) {
        sign = s;
      } else if (sign != s) {
        return 0;
      }
    }
  }
  // A monomial that vanishes here is reported with the table-free value +1.
  return sign == 0 ? 1 : sign;
}

CommutantCheck v_commutant_check(const std::vector<FermionMonomial>& x_joint,
                                 const ReplicaPtr& replica, double tol) {
  require_statistics(*replica, Statistics::fermion, "v_commutant_check");
  require_two_copies(*replica, "v_commutant_check");
  const BasisPtr& joint = replica->joint_basis();
  const int L = replica->sites();

  CommutantCheck check;
  check.table_verdict = true;
  for (const FermionMonomial& term : x_joint) {
    if (term.coefficient == Complex(0.0, 0.0)) continue;
    // Terms that vanish on this basis cannot obstruct commutation.
    const SparseMatrix t = monomial_operator({term}, joint, L).sparse();
    if (t.nonZeros() == 0 || t.coeffs().cwiseAbs().maxCoeff() == 0.0) continue;
    if (v_conjugation_table(term) != 1) check.table_verdict = false;
  }

  const Matrix x = monomial_operator(x_joint, joint, L).dense();
  const Matrix v = fermion_v_op(replica).dense();
  check.direct_defect = x.size() ? (v * x * v.adjoint() - x).cwiseAbs().maxCoeff() : 0.0;
  check.direct_verdict = check.direct_defect < tol;
  if (check.table_verdict != check.direct_verdict) {
    throw std::logic_error(
        "v_commutant_check: conjugation table and direct conjugation disagree (defect " +
        std::to_string(check.direct_defect) + ")");
  }
  check.commutes = check.direct_verdict;
  return check;
}

}  // namespace vcool
