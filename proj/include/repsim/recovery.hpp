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
 * Syndrome-conditioned recovery for the binomial codes.
 *
 * Each branch operator R_k P_k maps the k-loss syndrome subspace into the
 * codespace. Only the into-codespace parts of the recovery unitaries are
 * kept, since every R_k is preceded by its own syndrome projector.
 */
#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "repsim/codes.hpp"
#include "repsim/errors.hpp"
#include "repsim/fock.hpp"

namespace repsim {

namespace detail {

inline Matrix outer(const Vector& ket, const Vector& bra) { return ket * bra.adjoint(); }

inline Vector fock_vec(std::size_t dim, std::initializer_list<std::pair<std::size_t, double>> terms) {
  Vector v = Vector::Zero(static_cast<Eigen::Index>(dim));
  for (auto [n, a] : terms) v(static_cast<Eigen::Index>(n)) = a;
  return v;
}

inline void check_gamma(double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw DomainError("loss probability must lie in [0, 1]");
}

}  // namespace detail

/**
 * No-loss recovery for the lower binomial code. The no-jump evolution
 * deforms |0> to (|0> + (1-g)^2 |4>)/sqrt(2) and leaves |1> = |2> up to
 * scale; R0 maps the normalized deformed words back onto the codewords.
 */
inline FockOperator lbc_r0(double gamma) {
  detail::check_gamma(gamma);
  const BinomialCode code = make_code(CodeKind::LBC);
  const double s = (1.0 - gamma) * (1.0 - gamma);
  Vector dz = detail::fock_vec(5, {{0, 1.0}, {4, s}});
  dz.normalize();
  const Vector d1 = detail::fock_vec(5, {{2, 1.0}});
  return FockOperator(code.mode_shape(), detail::outer(code.codeword0.amplitudes(), dz) +
                                             detail::outer(code.codeword1.amplitudes(), d1));
}

inline FockOperator lbc_r1() {
  const BinomialCode code = make_code(CodeKind::LBC);
  return FockOperator(code.mode_shape(),
                      detail::outer(code.codeword0.amplitudes(), detail::fock_vec(5, {{3, 1.0}})) +
                          detail::outer(code.codeword1.amplitudes(), detail::fock_vec(5, {{1, 1.0}})));
}

namespace detail {

struct HbcR0 {
  Matrix op;
  bool fallback = false;
};

/**
 * HBC no-loss recovery from the second-order expansion
 * B0 = 1 - log(1-g) n/2 + log(1-g)^2 n^2/8 of the inverse no-jump
 * deformation. For each codeword W, B0|W> splits into c|W> plus an
 * orthogonal remainder s|B>; the branch maps c<W| + s<B| back onto |W>.
 */
inline HbcR0 hbc_r0(double gamma) {
  check_gamma(gamma);
  const BinomialCode code = make_code(CodeKind::HBC);
  const auto d = static_cast<Eigen::Index>(code.fock_dim);
  const double lg = std::log(std::max(1.0 - gamma, std::numeric_limits<double>::min()));
  Matrix b0 = Matrix::Zero(d, d);
  for (Eigen::Index n = 0; n < d; ++n) {
    const double x = static_cast<double>(n);
    b0(n, n) = 1.0 - lg * x / 2.0 + lg * lg * x * x / 8.0;
  }
  HbcR0 out{Matrix::Zero(d, d), false};
  for (const FockKet* w : {&code.codeword0, &code.codeword1}) {
    const Vector& wv = w->amplitudes();
    const Vector bw = b0 * wv;
    const double beta = bw.squaredNorm();
    const Complex overlap = wv.dot(bw);
    const double rem = beta - std::norm(overlap);
    if (rem <= 1e-14) {
      out.op += outer(wv, wv);
      out.fallback = out.fallback || gamma > 0.0;
      continue;
    }
    const Vector perp = (bw - overlap * wv) / std::sqrt(rem);
    const Complex c = overlap / std::sqrt(beta);
    const double s = std::sqrt(std::max(0.0, 1.0 - std::norm(overlap) / beta));
    out.op += outer(wv, std::conj(c) * wv + s * perp);
  }
  return out;
}

}  // namespace detail

/// True when the no-loss HBC recovery at this gamma is degenerate and falls
/// back to the codespace projector.
inline bool hbc_r0_degenerate(double gamma) { return detail::hbc_r0(gamma).fallback; }

inline FockOperator hbc_recovery(std::size_t k, double gamma) {
  const BinomialCode code = make_code(CodeKind::HBC);
  const Vector& c0 = code.codeword0.amplitudes();
  const Vector& c1 = code.codeword1.amplitudes();
  switch (k) {
    case 0: return FockOperator(code.mode_shape(), detail::hbc_r0(gamma).op);
    case 1: {
      const double h = 1.0 / std::sqrt(2.0);
      return FockOperator(code.mode_shape(), detail::outer(c0, detail::fock_vec(10, {{5, 1.0}})) +
                                                 detail::outer(c1, detail::fock_vec(10, {{2, h}, {8, h}})));
    }
    case 2: {
      const double r5 = std::sqrt(5.0);
      return FockOperator(code.mode_shape(), detail::outer(c0, detail::fock_vec(10, {{4, 1.0}})) +
                                                 detail::outer(c1, detail::fock_vec(10, {{1, 1.0 / r5}, {7, 2.0 / r5}})));
    }
    default: throw DomainError("HBC corrects at most two losses");
  }
}

/// Branch operators R_k P_k for one code at one loss probability.
struct RecoveryMap {
  BinomialCode code;
  double gamma;
  std::vector<FockOperator> branch_ops;
  bool fallback = false;

  static RecoveryMap build(const BinomialCode& code, double gamma) {
    detail::check_gamma(gamma);
    const auto projectors = syndrome_projectors(code);
    std::vector<FockOperator> recov;
    bool fb = false;
    if (code.kind == CodeKind::LBC) {
      recov = {lbc_r0(gamma), lbc_r1()};
    } else {
      auto r0 = detail::hbc_r0(gamma);
      fb = r0.fallback;
      recov = {FockOperator(code.mode_shape(), std::move(r0.op)), hbc_recovery(1, gamma), hbc_recovery(2, gamma)};
    }
    std::vector<FockOperator> branches;
    for (std::size_t k = 0; k < recov.size(); ++k) branches.push_back(recov[k] * projectors[k]);
    return {code, gamma, std::move(branches), fb};
  }

  std::vector<Matrix> matrices() const {
    std::vector<Matrix> m;
    for (const auto& b : branch_ops) m.push_back(b.matrix());
    return m;
  }
};

inline DensityMatrix correct(const DensityMatrix& rho, std::size_t mode, const RecoveryMap& map) {
  if (mode >= rho.shape().modes()) throw ShapeMismatch("mode index out of range");
  if (rho.shape().dim(mode) != map.code.fock_dim) throw ShapeMismatch("mode dimension does not match the code");
  const auto m = map.matrices();
  return apply_kraus(m, mode, rho);
}

/// Syndrome measurement followed by the conditioned recovery, summed over
/// outcomes. Uncorrectable weight is dropped, so the trace may shrink.
inline DensityMatrix correct(const DensityMatrix& rho, std::size_t mode, const BinomialCode& code, double gamma) {
  if (code.kind == CodeKind::Unencoded) throw UnsupportedCode("unencoded memories have no recovery");
  return correct(rho, mode, RecoveryMap::build(code, gamma));
}

}  // namespace repsim
