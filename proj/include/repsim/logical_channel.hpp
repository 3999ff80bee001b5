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
 * Logical-qubit channels in the Pauli (chi) representation.
 *
 * Superoperators act on row-major vectorized 2x2 matrices, so that
 * rho -> A rho B corresponds to kron(A, B^T). A chi matrix p encodes
 * rho -> sum_kl p(k,l) s_k rho s_l^dagger over s = (1, X, Y, Z).
 */
#pragma once

#include <array>
#include <cstddef>
#include <span>

#include "repsim/channels.hpp"
#include "repsim/codes.hpp"
#include "repsim/errors.hpp"
#include "repsim/fock.hpp"
#include "repsim/recovery.hpp"

namespace repsim {

using Superop = Eigen::Matrix4cd;

inline const std::array<Eigen::Matrix2cd, 4>& pauli_basis() {
  static const std::array<Eigen::Matrix2cd, 4> basis = [] {
    std::array<Eigen::Matrix2cd, 4> b;
    const Complex i(0.0, 1.0);
    b[0] << 1, 0, 0, 1;
    b[1] << 0, 1, 1, 0;
    b[2] << 0, -i, i, 0;
    b[3] << 1, 0, 0, -1;
    return b;
  }();
  return basis;
}

inline Eigen::Vector4cd vectorize(const Eigen::Matrix2cd& m) {
  return {m(0, 0), m(0, 1), m(1, 0), m(1, 1)};
}

inline Eigen::Matrix2cd unvectorize(const Eigen::Vector4cd& v) {
  Eigen::Matrix2cd m;
  m << v(0), v(1), v(2), v(3);
  return m;
}

inline Eigen::Matrix2cd apply_superop(const Superop& s, const Eigen::Matrix2cd& rho) {
  return unvectorize(s * vectorize(rho));
}

struct ChiMatrix {
  Eigen::Matrix4cd p = Eigen::Matrix4cd::Zero();
  /// Weight lost from a maximally mixed logical input.
  double leakage = 0.0;

  static ChiMatrix from_p(const Eigen::Matrix4cd& p) {
    return {p, std::max(0.0, 1.0 - p.trace().real())};
  }

  static ChiMatrix identity() {
    Eigen::Matrix4cd p = Eigen::Matrix4cd::Zero();
    p(0, 0) = 1.0;
    return from_p(p);
  }

  /// Unitary Pauli channel rho -> s_k rho s_k.
  static ChiMatrix pauli(std::size_t k) {
    Eigen::Matrix4cd p = Eigen::Matrix4cd::Zero();
    p(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = 1.0;
    return from_p(p);
  }

  Superop superop() const {
    const auto& s = pauli_basis();
    Superop out = Superop::Zero();
    for (int k = 0; k < 4; ++k)
      for (int l = 0; l < 4; ++l)
        if (p(k, l) != Complex(0.0)) out += p(k, l) * Eigen::kroneckerProduct(s[k], s[l].conjugate()).eval();
    return out;
  }

  Eigen::Matrix2cd apply(const Eigen::Matrix2cd& rho) const { return apply_superop(superop(), rho); }

  bool is_valid(double tol = kStateTolerance) const {
    if ((p - p.adjoint()).cwiseAbs().maxCoeff() > tol) return false;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(0.5 * (p + p.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() >= -tol && leakage >= -tol && leakage <= 1.0 + tol;
  }
};

inline ChiMatrix chi_from_superop(const Superop& s) {
  const auto& b = pauli_basis();
  Eigen::Matrix4cd p;
  for (int k = 0; k < 4; ++k)
    for (int l = 0; l < 4; ++l) {
      const Superop basis = Eigen::kroneckerProduct(b[k], b[l].conjugate()).eval();
      p(k, l) = (basis.adjoint() * s).trace() / 4.0;
    }
  return ChiMatrix::from_p(p);
}

/// Logical superoperator of Kraus maps on one mode, compressed onto the
/// words spanned by `encoder` (fock_dim x 2): rho_L -> V^dag K (V rho_L V^dag) K^dag V.
inline Superop compress_kraus(std::span<const Matrix> kraus, const Matrix& encoder) {
  Superop s = Superop::Zero();
  for (const Matrix& k : kraus) {
    const Matrix a = encoder.adjoint() * k * encoder;  // 2x2 logical block
    const Eigen::Matrix2cd blk = a;
    s += Eigen::kroneckerProduct(blk, blk.conjugate()).eval();
  }
  return s;
}

/// One loss cycle followed by recovery, as a logical superoperator. For the
/// unencoded memory there is no recovery and the Fock qubit is the logical
/// qubit.
inline Superop cycle_superop(const BinomialCode& code, double gamma) {
  const DampingChannel ch = kraus_ops(gamma, code.fock_dim);
  const auto loss = ch.matrices();
  if (code.kind == CodeKind::Unencoded) return compress_kraus(loss, code.encoder());
  const RecoveryMap rec = RecoveryMap::build(code, gamma);
  std::vector<Matrix> ops;
  ops.reserve(loss.size() * rec.branch_ops.size());
  for (const auto& r : rec.branch_ops)
    for (const Matrix& e : loss) ops.push_back(r.matrix() * e);
  return compress_kraus(ops, code.encoder());
}

inline ChiMatrix extract_logical_channel(const BinomialCode& code, double gamma) {
  if (code.kind == CodeKind::Unencoded) throw UnsupportedCode("no logical channel without a code");
  return chi_from_superop(cycle_superop(code, gamma));
}

namespace detail {

/// c[k][m][a] with s_k s_m = sum_a c[k][m][a] s_a.
inline const std::array<std::array<std::array<Complex, 4>, 4>, 4>& pauli_products() {
  static const auto table = [] {
    std::array<std::array<std::array<Complex, 4>, 4>, 4> c{};
    const auto& s = pauli_basis();
    for (int k = 0; k < 4; ++k)
      for (int m = 0; m < 4; ++m) {
        const Eigen::Matrix2cd prod = s[k] * s[m];
        for (int a = 0; a < 4; ++a) c[k][m][a] = (s[a].adjoint() * prod).trace() / 2.0;
      }
    return c;
  }();
  return table;
}

}  // namespace detail

/// 16x16 map taking the flattened chi of an inner channel to the chi of
/// outer o inner.
inline Eigen::Matrix<Complex, 16, 16> concat_map(const ChiMatrix& outer) {
  const auto& c = detail::pauli_products();
  Eigen::Matrix<Complex, 16, 16> m = Eigen::Matrix<Complex, 16, 16>::Zero();
  for (int k = 0; k < 4; ++k)
    for (int l = 0; l < 4; ++l) {
      const Complex po = outer.p(k, l);
      if (po == Complex(0.0)) continue;
      for (int mi = 0; mi < 4; ++mi)
        for (int ni = 0; ni < 4; ++ni)
          for (int a = 0; a < 4; ++a) {
            const Complex ca = c[k][mi][a];
            if (ca == Complex(0.0)) continue;
            for (int b = 0; b < 4; ++b) {
              const Complex cb = c[l][ni][b];
              if (cb == Complex(0.0)) continue;
              m(4 * a + b, 4 * mi + ni) += po * ca * std::conj(cb);
            }
          }
    }
  return m;
}

inline ChiMatrix concat(const ChiMatrix& outer, const ChiMatrix& inner) {
  Eigen::Matrix<Complex, 16, 1> flat;
  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 4; ++n) flat(4 * m + n) = inner.p(m, n);
  const Eigen::Matrix<Complex, 16, 1> out = concat_map(outer) * flat;
  Eigen::Matrix4cd p;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) p(a, b) = out(4 * a + b);
  return ChiMatrix::from_p(p);
}

/// m-fold self-concatenation by repeated squaring.
inline ChiMatrix power(const ChiMatrix& c, std::size_t m) {
  ChiMatrix result = ChiMatrix::identity();
  ChiMatrix base = c;
  while (m > 0) {
    if (m & 1U) result = concat(base, result);
    m >>= 1U;
    if (m > 0) base = concat(base, base);
  }
  return result;
}

/// (S1 x S2) applied to a two-qubit state, S1 on the first qubit.
inline Eigen::Matrix4cd apply_pair(const Superop& s1, const Superop& s2, const Eigen::Matrix4cd& rho) {
  // rho[(a,c),(b,d)] -> sum S1[(x,y),(a,b)] S2[(z,w),(c,d)] rho[(a,c),(b,d)]
  Eigen::Matrix4cd out = Eigen::Matrix4cd::Zero();
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int z = 0; z < 2; ++z)
        for (int w = 0; w < 2; ++w) {
          Complex acc = 0.0;
          for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
              const Complex f = s1(2 * x + y, 2 * a + b);
              if (f == Complex(0.0)) continue;
              for (int c = 0; c < 2; ++c)
                for (int d = 0; d < 2; ++d) acc += f * s2(2 * z + w, 2 * c + d) * rho(2 * a + c, 2 * b + d);
            }
          out(2 * x + z, 2 * y + w) = acc;
        }
  return out;
}

}  // namespace repsim
