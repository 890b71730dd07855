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

#include "vcool/fock.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace vcool {

std::string to_string(Statistics s) {
  return s == Statistics::boson ? "boson" : "fermion";
}

Sector Sector::fixed(int particles) {
  if (particles < 0) throw std::invalid_argument("Sector: negative particle number");
  return Sector(Kind::fixed, {particles}, -1);
}

Sector Sector::totals(std::vector<int> allowed) {
  if (allowed.empty()) throw std::invalid_argument("Sector: empty set of totals");
  std::sort(allowed.begin(), allowed.end());
  allowed.erase(std::unique(allowed.begin(), allowed.end()), allowed.end());
  if (allowed.front() < 0) throw std::invalid_argument("Sector: negative particle number");
  if (allowed.size() == 1) return fixed(allowed.front());
  return Sector(Kind::totals, std::move(allowed), -1);
}

Sector Sector::cutoff(int n_max) {
  if (n_max < 0) throw std::invalid_argument("Sector: negative cutoff");
  return Sector(Kind::cutoff, {}, n_max);
}

int Sector::particles() const {
  if (kind_ != Kind::fixed) throw std::logic_error("Sector: particle number is not fixed");
  return allowed_.front();
}

bool Sector::admits_total(int total) const {
  if (kind_ == Kind::cutoff) return true;
  return std::binary_search(allowed_.begin(), allowed_.end(), total);
}

std::string Sector::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::fixed:
      os << "N=" << allowed_.front();
      break;
    case Kind::totals:
      os << "N in {";
      for (std::size_t i = 0; i < allowed_.size(); ++i) os << (i ? "," : "") << allowed_[i];
      os << "}";
      break;
    case Kind::cutoff:
      os << "n_max=" << n_max_;
      break;
  }
  return os.str();
}

std::uint64_t binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  }
  return r;
}

namespace {

std::string key_of(OccupationSpan s) {
  return std::string(reinterpret_cast<const char*>(s.data()), s.size());
}

}  // namespace

FockBasis::FockBasis(Statistics statistics, int num_modes, Sector sector)
    : statistics_(statistics), num_modes_(num_modes), sector_(std::move(sector)) {
  if (num_modes_ < 1) throw std::invalid_argument("FockBasis: num_modes must be >= 1");

  const bool fermion = statistics_ == Statistics::fermion;
  int max_total = 0;
  switch (sector_.kind()) {
    case Sector::Kind::fixed:
    case Sector::Kind::totals:
      max_total = sector_.allowed().back();
      capacity_ = fermion ? std::min(1, max_total) : max_total;
      break;
    case Sector::Kind::cutoff:
      capacity_ = fermion ? std::min(1, sector_.n_max()) : sector_.n_max();
      max_total = capacity_ * num_modes_;
      break;
  }
  if (capacity_ > std::numeric_limits<Occupation>::max()) {
    throw std::invalid_argument("FockBasis: occupation exceeds storage range");
  }
  if (fermion && sector_.kind() != Sector::Kind::cutoff) {
    bool any = false;
    for (int n : sector_.allowed()) any = any || n <= num_modes_;
    if (!any) {
      throw std::invalid_argument("FockBasis: infeasible fermion sector " + sector_.describe() +
                                  " on " + std::to_string(num_modes_) + " modes");
    }
    if (sector_.kind() == Sector::Kind::fixed && sector_.particles() > num_modes_) {
      throw std::invalid_argument("FockBasis: infeasible fermion sector " + sector_.describe() +
                                  " on " + std::to_string(num_modes_) + " modes");
    }
  }

  // Descending-lexicographic depth-first enumeration.
  OccupationVector current(static_cast<std::size_t>(num_modes_), 0);
  const std::size_t modes = static_cast<std::size_t>(num_modes_);
  std::function<void(std::size_t, int)> visit = [&](std::size_t mode, int used) {
    if (mode == modes) {
      if (sector_.admits_total(used)) {
        states_.insert(states_.end(), current.begin(), current.end());
      }
      return;
    }
    int top = std::min(capacity_, max_total - used);
    int bottom = 0;
    if (sector_.kind() == Sector::Kind::fixed) {
      // Remaining modes must be able to absorb what is left.
      const int rest = static_cast<int>(modes - mode - 1);
      bottom = std::max(0, sector_.particles() - used - rest * capacity_);
      if (mode + 1 == modes) bottom = top = sector_.particles() - used;
      if (top < bottom) return;
    }
    for (int m = top; m >= bottom; --m) {
      current[mode] = static_cast<Occupation>(m);
      visit(mode + 1, used + m);
    }
    current[mode] = 0;
  };
  visit(0, 0);
  dim_ = states_.size() / modes;

  if (sector_.kind() == Sector::Kind::fixed) {
    // skip_[(i, remaining, occ)]: states ranked before any state that puts
    // occ on mode i with `remaining` particles still to place.
    const int p = sector_.particles();
    const int c = capacity_ + 1;
    skip_.assign(modes * static_cast<std::size_t>((p + 1) * c), 0);
    for (int i = 0; i < num_modes_; ++i) {
      const int rest = num_modes_ - i - 1;
      for (int remaining = 0; remaining <= p; ++remaining) {
        const int top = std::min(capacity_, remaining);
        std::uint64_t acc = 0;
        for (int occ = top; occ >= 0; --occ) {
          skip_[(static_cast<std::size_t>(i) * static_cast<std::size_t>(p + 1) +
                 static_cast<std::size_t>(remaining)) * static_cast<std::size_t>(c) +
                static_cast<std::size_t>(occ)] = acc;
          acc += count_completions(remaining - occ, rest);
        }
      }
    }
  } else {
    lookup_.reserve(dim_);
    for (std::size_t i = 0; i < dim_; ++i) lookup_.emplace(key_of(state(i)), i);
  }
}

std::uint64_t FockBasis::count_completions(int particles, int modes) const {
  if (particles < 0) return 0;
  if (modes == 0) return particles == 0 ? 1 : 0;
  if (statistics_ == Statistics::fermion) return binomial(modes, particles);
  return binomial(particles + modes - 1, modes - 1);
}

std::optional<std::size_t> FockBasis::rank_fixed(OccupationSpan s) const {
  const int p = sector_.particles();
  const auto c = static_cast<std::size_t>(capacity_ + 1);
  int remaining = p;
  std::uint64_t rank = 0;
  for (int i = 0; i < num_modes_; ++i) {
    const int occ = s[static_cast<std::size_t>(i)];
    if (occ > remaining) return std::nullopt;
    rank += skip_[(static_cast<std::size_t>(i) * static_cast<std::size_t>(p + 1) +
                   static_cast<std::size_t>(remaining)) * c + static_cast<std::size_t>(occ)];
    remaining -= occ;
  }
  if (remaining != 0) return std::nullopt;
  return static_cast<std::size_t>(rank);
}

std::optional<std::size_t> FockBasis::index_of(OccupationSpan s) const {
  if (s.size() != static_cast<std::size_t>(num_modes_)) return std::nullopt;
  for (Occupation o : s) {
    if (o > capacity_) return std::nullopt;
  }
  if (sector_.kind() == Sector::Kind::fixed) return rank_fixed(s);
  auto it = lookup_.find(key_of(s));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

int FockBasis::total(std::size_t index) const {
  const OccupationSpan s = state(index);
  return std::accumulate(s.begin(), s.end(), 0);
}

BasisPtr enumerate_basis(Statistics statistics, int num_modes, Sector sector) {
  return std::make_shared<const FockBasis>(statistics, num_modes, std::move(sector));
}

// ---------------------------------------------------------------------------
// Operator

Operator::Operator(BasisPtr basis, Matrix matrix, OperatorFlags flags)
    : Operator(basis, basis, Storage(std::move(matrix)), flags) {}

Operator::Operator(BasisPtr basis, SparseMatrix matrix, OperatorFlags flags)
    : Operator(basis, basis, Storage(std::move(matrix)), flags) {}

Operator::Operator(BasisPtr row_basis, BasisPtr col_basis, Storage matrix, OperatorFlags flags)
    : row_basis_(std::move(row_basis)),
      col_basis_(std::move(col_basis)),
      matrix_(std::move(matrix)),
      flags_(flags) {
  if (!row_basis_ || !col_basis_) throw std::invalid_argument("Operator: null basis");
  if (static_cast<std::size_t>(rows()) != row_basis_->dim() ||
      static_cast<std::size_t>(cols()) != col_basis_->dim()) {
    throw std::invalid_argument("Operator: matrix shape does not match basis dimensions");
  }
}

Operator Operator::from_triplets(BasisPtr row_basis, BasisPtr col_basis,
                                 const std::vector<Eigen::Triplet<Complex>>& triplets,
                                 OperatorFlags flags) {
  const auto r = static_cast<Eigen::Index>(row_basis->dim());
  const auto c = static_cast<Eigen::Index>(col_basis->dim());
  SparseMatrix sp(r, c);
  sp.setFromTriplets(triplets.begin(), triplets.end());
  sp.makeCompressed();
  if (std::max(row_basis->dim(), col_basis->dim()) > kSparseThreshold) {
    return Operator(std::move(row_basis), std::move(col_basis), Storage(std::move(sp)), flags);
  }
  return Operator(std::move(row_basis), std::move(col_basis), Storage(Matrix(sp)), flags);
}

Eigen::Index Operator::rows() const {
  return std::visit([](const auto& m) { return m.rows(); }, matrix_);
}

Eigen::Index Operator::cols() const {
  return std::visit([](const auto& m) { return m.cols(); }, matrix_);
}

Matrix Operator::dense() const {
  if (const auto* d = std::get_if<Matrix>(&matrix_)) return *d;
  return Matrix(std::get<SparseMatrix>(matrix_));
}

SparseMatrix Operator::sparse() const {
  if (const auto* s = std::get_if<SparseMatrix>(&matrix_)) return *s;
  return std::get<Matrix>(matrix_).sparseView(0.0, 0.0);
}

Vector Operator::apply(const Vector& v) const {
  if (v.size() != cols()) throw std::invalid_argument("Operator::apply: dimension mismatch");
  return std::visit([&](const auto& m) -> Vector { return m * v; }, matrix_);
}

Operator Operator::adjoint() const {
  Storage adj = std::visit(
      [](const auto& m) -> Storage {
        using M = std::decay_t<decltype(m)>;
        return M(m.adjoint());
      },
      matrix_);
  return Operator(col_basis_, row_basis_, std::move(adj), flags_);
}

Operator Operator::compose(const Operator& right) const {
  if (!col_basis_->same_space(*right.row_basis_)) {
    throw std::invalid_argument("Operator::compose: basis mismatch");
  }
  Storage product;
  if (is_sparse() || right.is_sparse()) {
    SparseMatrix p = sparse() * right.sparse();
    p.prune(Complex(0.0, 0.0));
    product = std::move(p);
  } else {
    product = Matrix(std::get<Matrix>(matrix_) * std::get<Matrix>(right.matrix_));
  }
  OperatorFlags f;
  f.unitary = flags_.unitary && right.flags_.unitary;
  f.diagonal = flags_.diagonal && right.flags_.diagonal;
  return Operator(row_basis_, right.col_basis_, std::move(product), f);
}

RealVector Operator::real_diagonal() const {
  if (const auto* d = std::get_if<Matrix>(&matrix_)) return d->diagonal().real();
  return Vector(std::get<SparseMatrix>(matrix_).diagonal()).real();
}

double Operator::off_diagonal_max() const {
  double worst = 0.0;
  if (const auto* d = std::get_if<Matrix>(&matrix_)) {
    for (Eigen::Index j = 0; j < d->cols(); ++j) {
      for (Eigen::Index i = 0; i < d->rows(); ++i) {
        if (i != j) worst = std::max(worst, std::abs((*d)(i, j)));
      }
    }
    return worst;
  }
  const auto& s = std::get<SparseMatrix>(matrix_);
  for (Eigen::Index k = 0; k < s.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(s, k); it; ++it) {
      if (it.row() != it.col()) worst = std::max(worst, std::abs(it.value()));
    }
  }
  return worst;
}

void Operator::check_flags(double tol) const {
  if (flags_.hermitian) {
    const SparseMatrix s = sparse();
    const double defect = SparseMatrix(s - SparseMatrix(s.adjoint())).coeffs().cwiseAbs().maxCoeff();
    if (s.nonZeros() > 0 && defect > tol) {
      throw std::logic_error("Operator flagged Hermitian but ||A - A^dagger|| = " +
                             std::to_string(defect));
    }
  }
  if (flags_.unitary) {
    const SparseMatrix s = sparse();
    SparseMatrix id(s.cols(), s.cols());
    id.setIdentity();
    const SparseMatrix d = SparseMatrix(s.adjoint()) * s - id;
    const double defect = d.nonZeros() ? d.coeffs().cwiseAbs().maxCoeff() : 0.0;
    if (defect > tol) {
      throw std::logic_error("Operator flagged unitary but ||U^dagger U - 1|| = " +
                             std::to_string(defect));
    }
  }
  if (flags_.diagonal && off_diagonal_max() > tol) {
    throw std::logic_error("Operator flagged diagonal but has off-diagonal weight");
  }
}

// ---------------------------------------------------------------------------
// Elementary operators

BasisPtr shifted_basis(const BasisPtr& basis, Ladder kind) {
  const Sector& sector = basis->sector();
  const int delta = kind == Ladder::raise ? 1 : -1;
  switch (sector.kind()) {
    case Sector::Kind::cutoff:
      return basis;
    case Sector::Kind::fixed: {
      const int target = sector.particles() + delta;
      if (target < 0) {
        throw std::invalid_argument("ladder: lowering the N=0 sector has no target basis");
      }
      return enumerate_basis(basis->statistics(), basis->num_modes(), Sector::fixed(target));
    }
    case Sector::Kind::totals: {
      std::vector<int> shifted;
      for (int n : sector.allowed()) {
        if (n + delta >= 0) shifted.push_back(n + delta);
      }
      if (shifted.empty()) throw std::invalid_argument("ladder: no target sector");
      return enumerate_basis(basis->statistics(), basis->num_modes(),
                             Sector::totals(std::move(shifted)));
    }
  }
  throw std::logic_error("unreachable");
}

namespace {

void check_mode(const FockBasis& basis, int mode) {
  if (mode < 0 || mode >= basis.num_modes()) {
    throw std::out_of_range("mode " + std::to_string(mode) + " out of range for " +
                            std::to_string(basis.num_modes()) + " modes");
  }
}

}  // namespace

Operator ladder(const BasisPtr& basis, int mode, Ladder kind) {
  check_mode(*basis, mode);
  BasisPtr target = shifted_basis(basis, kind);
  const bool fermion = basis->statistics() == Statistics::fermion;
  const auto m = static_cast<std::size_t>(mode);

  std::vector<Eigen::Triplet<Complex>> triplets;
  triplets.reserve(basis->dim());
  OccupationVector work(static_cast<std::size_t>(basis->num_modes()));
  for (std::size_t col = 0; col < basis->dim(); ++col) {
    const OccupationSpan s = basis->state(col);
    const int n = s[m];
    double amplitude = 0.0;
    std::copy(s.begin(), s.end(), work.begin());
    if (kind == Ladder::raise) {
      if (fermion && n == 1) continue;
      amplitude = fermion ? jordan_wigner_sign(s, mode) : std::sqrt(static_cast<double>(n + 1));
      work[m] = static_cast<Occupation>(n + 1);
    } else {
      if (n == 0) continue;
      amplitude = fermion ? jordan_wigner_sign(s, mode) : std::sqrt(static_cast<double>(n));
      work[m] = static_cast<Occupation>(n - 1);
    }
    // Cutoff sectors truncate at n_max.
    if (auto row = target->index_of(work)) {
      triplets.emplace_back(static_cast<int>(*row), static_cast<int>(col), amplitude);
    }
  }
  return Operator::from_triplets(target, basis, triplets);
}

Operator diagonal_op(const BasisPtr& basis, const OccupationFunction& f) {
  std::vector<Eigen::Triplet<Complex>> triplets;
  triplets.reserve(basis->dim());
  for (std::size_t i = 0; i < basis->dim(); ++i) {
    const double v = f(basis->state(i));
    if (v != 0.0) triplets.emplace_back(static_cast<int>(i), static_cast<int>(i), v);
  }
  OperatorFlags flags;
  flags.hermitian = flags.diagonal = true;
  return Operator::from_triplets(basis, basis, triplets, flags);
}

Operator number_op(const BasisPtr& basis, int mode) {
  check_mode(*basis, mode);
  const auto m = static_cast<std::size_t>(mode);
  return diagonal_op(basis, [m](OccupationSpan s) { return static_cast<double>(s[m]); });
}

Operator identity_op(const BasisPtr& basis) {
  Operator id = diagonal_op(basis, [](OccupationSpan) { return 1.0; });
  OperatorFlags flags = id.flags();
  flags.unitary = true;
  return Operator(basis, basis, id.storage(), flags);
}

}  // namespace vcool
