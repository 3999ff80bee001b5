// Copyright 2026 The repeater-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file
 * Dense linear algebra over truncated multi-mode Fock spaces.
 *
 * Every multi-mode object is indexed row-major over its modes: the first mode
 * is the slowest-varying index. Kets, operators and density matrices carry
 * their ModeShape so that mode-local operations (Kraus maps, partial
 * projections) can be applied without materializing identity factors.
 */
#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "repsim/errors.hpp"

namespace repsim {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Absolute tolerance for Hermiticity, positivity and trace checks.
inline constexpr double kStateTolerance = 1e-10;

class ModeShape {
 public:
  ModeShape() = default;
  ModeShape(std::initializer_list<std::size_t> dims) : ModeShape(std::vector<std::size_t>(dims)) {}
  explicit ModeShape(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
    for (std::size_t d : dims_) {
      if (d < 1) throw InvalidDimension("mode dimension must be at least 1");
    }
  }

  std::size_t modes() const noexcept { return dims_.size(); }
  std::size_t dim(std::size_t mode) const { return dims_.at(mode); }
  const std::vector<std::size_t>& dims() const noexcept { return dims_; }

  std::size_t total() const noexcept {
    return std::accumulate(dims_.begin(), dims_.end(), std::size_t{1}, std::multiplies<>());
  }

  /// Product of the dimensions of modes [0, mode).
  std::size_t before(std::size_t mode) const {
    return std::accumulate(dims_.begin(), dims_.begin() + static_cast<std::ptrdiff_t>(mode),
                           std::size_t{1}, std::multiplies<>());
  }
  /// Product of the dimensions of modes (mode, end).
  std::size_t after(std::size_t mode) const {
    return std::accumulate(dims_.begin() + static_cast<std::ptrdiff_t>(mode) + 1, dims_.end(),
                           std::size_t{1}, std::multiplies<>());
  }

  std::size_t index(std::span<const std::size_t> occupation) const {
    if (occupation.size() != dims_.size()) throw ShapeMismatch("multi-index has wrong number of modes");
    std::size_t flat = 0;
    for (std::size_t m = 0; m < dims_.size(); ++m) {
      if (occupation[m] >= dims_[m]) throw ShapeMismatch("occupation exceeds Fock cutoff");
      flat = flat * dims_[m] + occupation[m];
    }
    return flat;
  }
  std::size_t index(std::initializer_list<std::size_t> occupation) const {
    return index(std::span<const std::size_t>(occupation.begin(), occupation.size()));
  }

  std::vector<std::size_t> occupation(std::size_t flat) const {
    std::vector<std::size_t> occ(dims_.size());
    for (std::size_t m = dims_.size(); m-- > 0;) {
      occ[m] = flat % dims_[m];
      flat /= dims_[m];
    }
    return occ;
  }

  ModeShape concat(const ModeShape& other) const {
    std::vector<std::size_t> d = dims_;
    d.insert(d.end(), other.dims_.begin(), other.dims_.end());
    return ModeShape(std::move(d));
  }

  bool operator==(const ModeShape&) const = default;

 private:
  std::vector<std::size_t> dims_;
};

class FockKet {
 public:
  FockKet(ModeShape shape, Vector amplitudes) : shape_(std::move(shape)), amps_(std::move(amplitudes)) {
    if (static_cast<std::size_t>(amps_.size()) != shape_.total())
      throw ShapeMismatch("amplitude vector length does not match mode shape");
    if (!amps_.allFinite()) throw DomainError("non-finite amplitude");
  }

  static FockKet zero(ModeShape shape) {
    Vector v = Vector::Zero(static_cast<Eigen::Index>(shape.total()));
    return FockKet(std::move(shape), std::move(v));
  }

  static FockKet basis(ModeShape shape, std::initializer_list<std::size_t> occupation) {
    FockKet k = zero(std::move(shape));
    k.amps_(static_cast<Eigen::Index>(k.shape_.index(occupation))) = 1.0;
    return k;
  }

  /// Sparse construction from (occupation, amplitude) terms; repeated
  /// occupations accumulate.
  static FockKet from_terms(ModeShape shape,
                            std::initializer_list<std::pair<std::vector<std::size_t>, Complex>> terms) {
    FockKet k = zero(std::move(shape));
    for (const auto& [occ, a] : terms) k.amps_(static_cast<Eigen::Index>(k.shape_.index(occ))) += a;
    return k;
  }

  const ModeShape& shape() const noexcept { return shape_; }
  const Vector& amplitudes() const noexcept { return amps_; }

  Complex amplitude(std::initializer_list<std::size_t> occupation) const {
    return amps_(static_cast<Eigen::Index>(shape_.index(occupation)));
  }

  double norm() const { return amps_.norm(); }
  bool is_normalized(double tol = 1e-12) const { return std::abs(norm() - 1.0) <= tol; }

  FockKet normalized() const {
    const double n = norm();
    if (n == 0.0) throw DomainError("cannot normalize the zero vector");
    return FockKet(shape_, amps_ / n);
  }

  /// <this|other>
  Complex inner(const FockKet& other) const {
    if (!(shape_ == other.shape_)) throw ShapeMismatch("inner product of kets with different shapes");
    return amps_.dot(other.amps_);
  }

  friend FockKet operator+(const FockKet& a, const FockKet& b) {
    if (!(a.shape_ == b.shape_)) throw ShapeMismatch("sum of kets with different shapes");
    return FockKet(a.shape_, a.amps_ + b.amps_);
  }
  friend FockKet operator-(const FockKet& a, const FockKet& b) { return a + (-1.0) * b; }
  friend FockKet operator*(Complex s, const FockKet& k) { return FockKet(k.shape_, s * k.amps_); }

 private:
  ModeShape shape_;
  Vector amps_;
};

class FockOperator {
 public:
  FockOperator(ModeShape shape_in, ModeShape shape_out, Matrix entries)
      : in_(std::move(shape_in)), out_(std::move(shape_out)), m_(std::move(entries)) {
    if (static_cast<std::size_t>(m_.rows()) != out_.total() || static_cast<std::size_t>(m_.cols()) != in_.total())
      throw ShapeMismatch("operator matrix does not match its mode shapes");
  }
  /// Square operator on a single shape.
  FockOperator(ModeShape shape, Matrix entries) : FockOperator(shape, shape, std::move(entries)) {}

  static FockOperator identity(const ModeShape& shape) {
    const auto n = static_cast<Eigen::Index>(shape.total());
    return FockOperator(shape, Matrix::Identity(n, n));
  }
  static FockOperator zero(const ModeShape& shape) {
    const auto n = static_cast<Eigen::Index>(shape.total());
    return FockOperator(shape, Matrix::Zero(n, n));
  }

  const ModeShape& shape_in() const noexcept { return in_; }
  const ModeShape& shape_out() const noexcept { return out_; }
  const Matrix& matrix() const noexcept { return m_; }

  FockOperator adjoint() const { return FockOperator(out_, in_, m_.adjoint()); }

  FockKet operator()(const FockKet& k) const {
    if (!(k.shape() == in_)) throw ShapeMismatch("operator applied to ket of wrong shape");
    return FockKet(out_, m_ * k.amplitudes());
  }

  /// Composition: (a * b)(x) = a(b(x)).
  friend FockOperator operator*(const FockOperator& a, const FockOperator& b) {
    if (!(a.in_ == b.out_)) throw ShapeMismatch("composition of incompatible operators");
    return FockOperator(b.in_, a.out_, a.m_ * b.m_);
  }
  friend FockOperator operator+(const FockOperator& a, const FockOperator& b) {
    if (!(a.in_ == b.in_) || !(a.out_ == b.out_)) throw ShapeMismatch("sum of incompatible operators");
    return FockOperator(a.in_, a.out_, a.m_ + b.m_);
  }
  friend FockOperator operator*(Complex s, const FockOperator& a) { return FockOperator(a.in_, a.out_, s * a.m_); }

 private:
  ModeShape in_;
  ModeShape out_;
  Matrix m_;
};

/// Possibly subnormalized density operator; weight() is its trace.
class DensityMatrix {
 public:
  DensityMatrix(ModeShape shape, Matrix entries) : shape_(std::move(shape)), m_(std::move(entries)) {
    const auto n = static_cast<Eigen::Index>(shape_.total());
    if (m_.rows() != n || m_.cols() != n) throw ShapeMismatch("density matrix does not match mode shape");
  }

  static DensityMatrix pure(const FockKet& k) {
    return DensityMatrix(k.shape(), k.amplitudes() * k.amplitudes().adjoint());
  }
  static DensityMatrix zero(const ModeShape& shape) {
    const auto n = static_cast<Eigen::Index>(shape.total());
    return DensityMatrix(shape, Matrix::Zero(n, n));
  }

  const ModeShape& shape() const noexcept { return shape_; }
  const Matrix& matrix() const noexcept { return m_; }

  double weight() const { return m_.trace().real(); }

  DensityMatrix normalized() const {
    const double w = weight();
    if (w <= 0.0) throw DomainError("cannot normalize a density matrix of zero weight");
    return DensityMatrix(shape_, m_ / w);
  }

  /// <phi|rho|phi>
  double expectation(const FockKet& phi) const {
    if (!(phi.shape() == shape_)) throw ShapeMismatch("expectation with ket of wrong shape");
    return phi.amplitudes().dot(m_ * phi.amplitudes()).real();
  }

  double hermiticity_error() const { return (m_ - m_.adjoint()).cwiseAbs().maxCoeff(); }

  double min_eigenvalue() const {
    const Matrix h = 0.5 * (m_ + m_.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }

  /// Hermitian, positive semidefinite and with non-negative weight, all
  /// within `tol`.
  bool is_valid(double tol = kStateTolerance) const {
    return hermiticity_error() <= tol && min_eigenvalue() >= -tol && weight() >= -tol;
  }

  friend DensityMatrix operator+(const DensityMatrix& a, const DensityMatrix& b) {
    if (!(a.shape_ == b.shape_)) throw ShapeMismatch("sum of density matrices with different shapes");
    return DensityMatrix(a.shape_, a.m_ + b.m_);
  }
  friend DensityMatrix operator*(double s, const DensityMatrix& a) { return DensityMatrix(a.shape_, s * a.m_); }

 private:
  ModeShape shape_;
  Matrix m_;
};

// ---------------------------------------------------------------------------
// Single-mode ladder operators

inline FockOperator annihilation(std::size_t dim) {
  if (dim < 2) throw InvalidDimension("annihilation operator needs dim >= 2");
  const auto d = static_cast<Eigen::Index>(dim);
  Matrix a = Matrix::Zero(d, d);
  for (Eigen::Index n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return FockOperator(ModeShape{dim}, std::move(a));
}

inline FockOperator creation(std::size_t dim) { return annihilation(dim).adjoint(); }

inline FockOperator number_operator(std::size_t dim) {
  const auto d = static_cast<Eigen::Index>(dim);
  Matrix n = Matrix::Zero(d, d);
  for (Eigen::Index k = 0; k < d; ++k) n(k, k) = static_cast<double>(k);
  return FockOperator(ModeShape{dim}, std::move(n));
}

// ---------------------------------------------------------------------------
// Tensor products (left operand's modes come first)

inline FockKet tensor(const FockKet& x, const FockKet& y) {
  return FockKet(x.shape().concat(y.shape()), Eigen::kroneckerProduct(x.amplitudes(), y.amplitudes()).eval());
}

inline FockOperator tensor(const FockOperator& x, const FockOperator& y) {
  return FockOperator(x.shape_in().concat(y.shape_in()), x.shape_out().concat(y.shape_out()),
                      Eigen::kroneckerProduct(x.matrix(), y.matrix()).eval());
}

inline DensityMatrix tensor(const DensityMatrix& x, const DensityMatrix& y) {
  return DensityMatrix(x.shape().concat(y.shape()), Eigen::kroneckerProduct(x.matrix(), y.matrix()).eval());
}

// ---------------------------------------------------------------------------
// Mode-local application

namespace detail {

/// (I ⊗ op ⊗ I) * m, where op acts on `mode` of the row space of m.
inline Matrix apply_rows(const Matrix& op, const ModeShape& shape, std::size_t mode, const Matrix& m) {
  const std::size_t d = shape.dim(mode);
  if (static_cast<std::size_t>(op.rows()) != d || static_cast<std::size_t>(op.cols()) != d)
    throw ShapeMismatch("local operator dimension does not match mode");
  const std::size_t pre = shape.before(mode);
  const std::size_t post = shape.after(mode);
  Matrix out = Matrix::Zero(m.rows(), m.cols());
  for (std::size_t p = 0; p < pre; ++p) {
    for (std::size_t q = 0; q < post; ++q) {
      const auto row = [&](std::size_t i) { return static_cast<Eigen::Index>((p * d + i) * post + q); };
      for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
          const Complex c = op(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
          if (c != Complex(0.0)) out.row(row(i)) += c * m.row(row(j));
        }
      }
    }
  }
  return out;
}

/// (I ⊗ op ⊗ I) m (I ⊗ op ⊗ I)^†
inline Matrix conjugate_local(const Matrix& op, const ModeShape& shape, std::size_t mode, const Matrix& m) {
  const Matrix left = apply_rows(op, shape, mode, m);
  return apply_rows(op, shape, mode, left.adjoint()).adjoint();
}

}  // namespace detail

/// Applies a single-mode operator to one mode of a ket.
inline FockKet apply_local(const FockOperator& op, std::size_t mode, const FockKet& k) {
  if (mode >= k.shape().modes()) throw ShapeMismatch("mode index out of range");
  return FockKet(k.shape(), detail::apply_rows(op.matrix(), k.shape(), mode, k.amplitudes()));
}

/// rho -> Σ_k K_k rho K_k^† with every K_k acting on `mode`.
inline DensityMatrix apply_kraus(std::span<const Matrix> kraus, std::size_t mode, const DensityMatrix& rho) {
  if (mode >= rho.shape().modes()) throw ShapeMismatch("mode index out of range");
  Matrix out = Matrix::Zero(rho.matrix().rows(), rho.matrix().cols());
  for (const Matrix& k : kraus) out += detail::conjugate_local(k, rho.shape(), mode, rho.matrix());
  return DensityMatrix(rho.shape(), std::move(out));
}

// ---------------------------------------------------------------------------
// Partial projections

/**
 * Returns the subnormalized operator <phi|_modes rho |phi>_modes on the
 * remaining modes (kept in their original order). The weight of the result
 * is the probability of the projection branch.
 *
 * `modes` lists the projected modes in the order in which phi's shape lists
 * them.
 */
inline DensityMatrix partial_project(const DensityMatrix& rho, std::span<const std::size_t> modes,
                                     const FockKet& phi) {
  const ModeShape& shape = rho.shape();
  std::vector<bool> selected(shape.modes(), false);
  std::vector<std::size_t> sel_dims;
  for (std::size_t m : modes) {
    if (m >= shape.modes() || selected[m]) throw ShapeMismatch("invalid or repeated projected mode");
    selected[m] = true;
    sel_dims.push_back(shape.dim(m));
  }
  if (!(phi.shape() == ModeShape(sel_dims))) throw ShapeMismatch("projector shape does not match selected modes");

  std::vector<std::size_t> rest_dims;
  for (std::size_t m = 0; m < shape.modes(); ++m)
    if (!selected[m]) rest_dims.push_back(shape.dim(m));
  ModeShape rest(rest_dims);

  // Phi[f, r] = phi[s(f)] whenever the rest-part of f equals r.
  const auto n = static_cast<Eigen::Index>(shape.total());
  Matrix embed = Matrix::Zero(n, static_cast<Eigen::Index>(rest.total()));
  std::vector<std::size_t> sel_occ(modes.size());
  std::vector<std::size_t> rest_occ(rest_dims.size());
  for (Eigen::Index f = 0; f < n; ++f) {
    const auto occ = shape.occupation(static_cast<std::size_t>(f));
    for (std::size_t i = 0; i < modes.size(); ++i) sel_occ[i] = occ[modes[i]];
    for (std::size_t m = 0, j = 0; m < shape.modes(); ++m)
      if (!selected[m]) rest_occ[j++] = occ[m];
    const Complex a = phi.amplitudes()(static_cast<Eigen::Index>(phi.shape().index(sel_occ)));
    if (a != Complex(0.0)) embed(f, static_cast<Eigen::Index>(rest.index(rest_occ))) = a;
  }
  return DensityMatrix(std::move(rest), embed.adjoint() * rho.matrix() * embed);
}

inline DensityMatrix partial_project(const DensityMatrix& rho, std::initializer_list<std::size_t> modes,
                                     const FockKet& phi) {
  return partial_project(rho, std::span<const std::size_t>(modes.begin(), modes.size()), phi);
}

/**
 * Factored partial projection for a product state left ⊗ right, where phi
 * acts on the last mode of `left` and the first mode of `right`. Equivalent
 * to partial_project(tensor(left, right), {last, last + 1}, phi) but never
 * forms the joint matrix.
 */
inline DensityMatrix project_middle(const DensityMatrix& left, const DensityMatrix& right, const FockKet& phi) {
  const ModeShape& ls = left.shape();
  const ModeShape& rs = right.shape();
  if (ls.modes() < 1 || rs.modes() < 1) throw ShapeMismatch("project_middle needs at least one mode per side");
  const std::size_t dj = ls.dim(ls.modes() - 1);
  const std::size_t dk = rs.dim(0);
  if (!(phi.shape() == ModeShape{dj, dk})) throw ShapeMismatch("projector shape does not match middle modes");
  const std::size_t na = ls.total() / dj;
  const std::size_t nb = rs.total() / dk;

  const Matrix& L = left.matrix();   // L[(a,j),(a2,j2)]
  const Matrix& R = right.matrix();  // R[(k,b),(k2,b2)]
  const Vector& p = phi.amplitudes();
  const auto ph = [&](std::size_t j, std::size_t k) { return p(static_cast<Eigen::Index>(j * dk + k)); };
  const auto I = [](std::size_t i) { return static_cast<Eigen::Index>(i); };

  // T[(a,a2),(k,k2)] = Σ_{j,j2} conj(phi[j,k]) L[(a,j),(a2,j2)] phi[j2,k2]
  Matrix T = Matrix::Zero(I(na * na), I(dk * dk));
  std::vector<Complex> m(dk * dj);  // M[k, j2] for fixed (a, a2)
  for (std::size_t a = 0; a < na; ++a) {
    for (std::size_t a2 = 0; a2 < na; ++a2) {
      std::fill(m.begin(), m.end(), Complex(0.0));
      for (std::size_t j = 0; j < dj; ++j) {
        for (std::size_t j2 = 0; j2 < dj; ++j2) {
          const Complex l = L(I(a * dj + j), I(a2 * dj + j2));
          if (l == Complex(0.0)) continue;
          for (std::size_t k = 0; k < dk; ++k) m[k * dj + j2] += std::conj(ph(j, k)) * l;
        }
      }
      const Eigen::Index row = I(a * na + a2);
      for (std::size_t k = 0; k < dk; ++k)
        for (std::size_t j2 = 0; j2 < dj; ++j2) {
          const Complex v = m[k * dj + j2];
          if (v == Complex(0.0)) continue;
          for (std::size_t k2 = 0; k2 < dk; ++k2) T(row, I(k * dk + k2)) += v * ph(j2, k2);
        }
    }
  }

  // Rm[(k,k2),(b,b2)] = R[(k,b),(k2,b2)]
  Matrix Rm(I(dk * dk), I(nb * nb));
  for (std::size_t k = 0; k < dk; ++k)
    for (std::size_t k2 = 0; k2 < dk; ++k2)
      for (std::size_t b = 0; b < nb; ++b)
        for (std::size_t b2 = 0; b2 < nb; ++b2) Rm(I(k * dk + k2), I(b * nb + b2)) = R(I(k * nb + b), I(k2 * nb + b2));

  const Matrix prod = T * Rm;  // [(a,a2),(b,b2)]
  Matrix out(I(na * nb), I(na * nb));
  for (std::size_t a = 0; a < na; ++a)
    for (std::size_t a2 = 0; a2 < na; ++a2)
      for (std::size_t b = 0; b < nb; ++b)
        for (std::size_t b2 = 0; b2 < nb; ++b2) out(I(a * nb + b), I(a2 * nb + b2)) = prod(I(a * na + a2), I(b * nb + b2));

  std::vector<std::size_t> dims(ls.dims().begin(), ls.dims().end() - 1);
  dims.insert(dims.end(), rs.dims().begin() + 1, rs.dims().end());
  return DensityMatrix(ModeShape(std::move(dims)), std::move(out));
}

// ---------------------------------------------------------------------------
// Beam splitter

/**
 * 50/50 beam splitter a1† -> (a1† + a2†)/√2, a2† -> (a2† - a1†)/√2 acting on
 * two modes of cutoff `dim`. Photon number is conserved, so the output modes
 * need cutoff 2*dim - 1 to hold every image exactly; the returned operator is
 * an isometry from {dim, dim} into {2*dim-1, 2*dim-1}.
 */
inline FockOperator beam_splitter(std::size_t dim) {
  if (dim < 2) throw InvalidDimension("beam splitter needs dim >= 2");
  const std::size_t dout = 2 * dim - 1;
  std::vector<long double> fact(2 * dim, 1.0L);
  for (std::size_t i = 1; i < fact.size(); ++i) fact[i] = fact[i - 1] * static_cast<long double>(i);
  const auto binom = [&](std::size_t n, std::size_t k) { return fact[n] / (fact[k] * fact[n - k]); };

  ModeShape in{dim, dim};
  ModeShape out{dout, dout};
  Matrix u = Matrix::Zero(static_cast<Eigen::Index>(out.total()), static_cast<Eigen::Index>(in.total()));
  for (std::size_t n1 = 0; n1 < dim; ++n1) {
    for (std::size_t n2 = 0; n2 < dim; ++n2) {
      const long double scale = std::pow(2.0L, -static_cast<long double>(n1 + n2) / 2.0L) /
                                std::sqrt(fact[n1] * fact[n2]);
      // (a1† + a2†)^n1 (a2† - a1†)^n2: pick j of a1† from the first factor and
      // l of a1† from the second.
      for (std::size_t j = 0; j <= n1; ++j) {
        for (std::size_t l = 0; l <= n2; ++l) {
          const std::size_t p = j + l;
          const std::size_t q = n1 + n2 - p;
          const long double sign = (l % 2 == 0) ? 1.0L : -1.0L;
          const long double c = sign * binom(n1, j) * binom(n2, l) * scale * std::sqrt(fact[p] * fact[q]);
          u(static_cast<Eigen::Index>(out.index({p, q})), static_cast<Eigen::Index>(in.index({n1, n2}))) +=
              static_cast<double>(c);
        }
      }
    }
  }
  return FockOperator(std::move(in), std::move(out), std::move(u));
}

}  // namespace repsim
