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

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>

#include "repsim/errors.hpp"
#include "repsim/fock.hpp"

namespace repsim {

enum class CodeKind { Unencoded, LBC, HBC };
enum class LogicalBellKind { PhiPlus, PhiMinus, PsiPlus, PsiMinus };
enum class LogicalGate { Id, X, Z, H };

inline constexpr std::array<LogicalBellKind, 4> kAllBellKinds = {
    LogicalBellKind::PhiPlus, LogicalBellKind::PhiMinus, LogicalBellKind::PsiPlus, LogicalBellKind::PsiMinus};

inline std::string_view to_string(CodeKind k) {
  switch (k) {
    case CodeKind::Unencoded: return "none";
    case CodeKind::LBC: return "lbc";
    case CodeKind::HBC: return "hbc";
  }
  return "?";
}

inline std::string_view to_string(LogicalBellKind k) {
  switch (k) {
    case LogicalBellKind::PhiPlus: return "PhiPlus";
    case LogicalBellKind::PhiMinus: return "PhiMinus";
    case LogicalBellKind::PsiPlus: return "PsiPlus";
    case LogicalBellKind::PsiMinus: return "PsiMinus";
  }
  return "?";
}

inline CodeKind parse_code_kind(std::string_view s) {
  if (s == "none" || s == "unencoded") return CodeKind::Unencoded;
  if (s == "lbc") return CodeKind::LBC;
  if (s == "hbc") return CodeKind::HBC;
  throw Error("unknown code '" + std::string(s) + "'");
}

/// A single-mode bosonic qubit code: two orthonormal codewords in a
/// truncated Fock space plus the loss-syndrome structure.
struct BinomialCode {
  CodeKind kind;
  std::size_t fock_dim;
  FockKet codeword0;
  FockKet codeword1;
  std::size_t syndrome_modulus;
  std::size_t correctable_losses;

  ModeShape mode_shape() const { return ModeShape{fock_dim}; }

  const FockKet& codeword(std::size_t bit) const {
    if (bit > 1) throw DomainError("logical bit must be 0 or 1");
    return bit == 0 ? codeword0 : codeword1;
  }

  /// fock_dim x 2 isometry whose columns are the codewords.
  Matrix encoder() const {
    Matrix v(static_cast<Eigen::Index>(fock_dim), 2);
    v.col(0) = codeword0.amplitudes();
    v.col(1) = codeword1.amplitudes();
    return v;
  }

  /// Photon-number offset between the two codewords; the dispersive BSM
  /// phase per photon is pi divided by this.
  std::size_t photon_spacing() const { return kind == CodeKind::Unencoded ? 1 : syndrome_modulus; }
};

inline BinomialCode make_code(CodeKind kind) {
  const double r2 = std::sqrt(2.0);
  const double r3 = std::sqrt(3.0);
  switch (kind) {
    case CodeKind::Unencoded: {
      ModeShape s{2};
      return {kind, 2, FockKet::basis(s, {0}), FockKet::basis(s, {1}), 1, 0};
    }
    case CodeKind::LBC: {
      ModeShape s{5};
      return {kind, 5, FockKet::from_terms(s, {{{0}, 1.0 / r2}, {{4}, 1.0 / r2}}), FockKet::basis(s, {2}), 2, 1};
    }
    case CodeKind::HBC: {
      ModeShape s{10};
      return {kind, 10, FockKet::from_terms(s, {{{0}, 0.5}, {{6}, r3 / 2.0}}),
              FockKet::from_terms(s, {{{3}, r3 / 2.0}, {{9}, 0.5}}), 3, 2};
    }
  }
  throw UnsupportedCode("unknown code kind");
}

/// 2x2 coefficient matrix c with |bell> = sum_ij c(i,j) |i j>.
inline Eigen::Matrix2cd bell_coefficients(LogicalBellKind kind) {
  const double h = 1.0 / std::sqrt(2.0);
  Eigen::Matrix2cd c = Eigen::Matrix2cd::Zero();
  switch (kind) {
    case LogicalBellKind::PhiPlus: c(0, 0) = h; c(1, 1) = h; break;
    case LogicalBellKind::PhiMinus: c(0, 0) = h; c(1, 1) = -h; break;
    case LogicalBellKind::PsiPlus: c(0, 1) = h; c(1, 0) = h; break;
    case LogicalBellKind::PsiMinus: c(0, 1) = h; c(1, 0) = -h; break;
  }
  return c;
}

/// Two-mode logical Bell state built from a pair of single-mode word bases
/// (codewords by default, error words for flagged modes).
inline FockKet bell_state(LogicalBellKind kind, const FockKet& a0, const FockKet& a1, const FockKet& b0,
                          const FockKet& b1) {
  const Eigen::Matrix2cd c = bell_coefficients(kind);
  FockKet out = FockKet::zero(a0.shape().concat(b0.shape()));
  const FockKet* a[2] = {&a0, &a1};
  const FockKet* b[2] = {&b0, &b1};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      if (c(i, j) != Complex(0.0)) out = out + c(i, j) * tensor(*a[i], *b[j]);
  return out;
}

inline FockKet logical_bell(LogicalBellKind kind, const BinomialCode& code) {
  return bell_state(kind, code.codeword0, code.codeword1, code.codeword0, code.codeword1);
}

/// P_k projects onto photon numbers n = -k (mod syndrome_modulus), i.e. the
/// support reached from the codespace by exactly k losses.
inline std::vector<FockOperator> syndrome_projectors(const BinomialCode& code) {
  if (code.kind == CodeKind::Unencoded) throw UnsupportedCode("unencoded memories have no loss syndrome");
  const std::size_t mod = code.syndrome_modulus;
  std::vector<FockOperator> out;
  for (std::size_t k = 0; k <= code.correctable_losses; ++k) {
    const auto d = static_cast<Eigen::Index>(code.fock_dim);
    Matrix p = Matrix::Zero(d, d);
    for (std::size_t n = 0; n < code.fock_dim; ++n)
      if ((n + k) % mod == 0) p(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) = 1.0;
    out.emplace_back(code.mode_shape(), std::move(p));
  }
  return out;
}

inline Eigen::Matrix2cd gate_matrix(LogicalGate which) {
  Eigen::Matrix2cd g;
  switch (which) {
    case LogicalGate::Id: g << 1, 0, 0, 1; break;
    case LogicalGate::X: g << 0, 1, 1, 0; break;
    case LogicalGate::Z: g << 1, 0, 0, -1; break;
    case LogicalGate::H: g << 1, 1, 1, -1; g /= std::sqrt(2.0); break;
  }
  return g;
}

/// Lifts a 2x2 gate to the words spanned by the columns of `words`
/// (fock_dim x 2); zero on the orthocomplement.
inline FockOperator lift_gate(const Eigen::Matrix2cd& gate, const Matrix& words, const ModeShape& shape) {
  return FockOperator(shape, words * gate * words.adjoint());
}

inline FockOperator logical_operator(const BinomialCode& code, LogicalGate which) {
  return lift_gate(gate_matrix(which), code.encoder(), code.mode_shape());
}

/**
 * Normalized images a^k|sigma> of the codewords after k losses (the small-loss
 * limit of the damped state). k = 0 returns the codewords.
 */
inline FockKet error_word(const BinomialCode& code, std::size_t losses, std::size_t bit) {
  if (losses > code.correctable_losses) throw DomainError("loss count beyond the code's correctable range");
  FockKet w = code.codeword(bit);
  const FockOperator a = annihilation(code.fock_dim);
  for (std::size_t i = 0; i < losses; ++i) w = a(w);
  return w.normalized();
}

/// fock_dim x 2 matrix whose columns are the k-loss error words.
inline Matrix error_words(const BinomialCode& code, std::size_t losses) {
  Matrix w(static_cast<Eigen::Index>(code.fock_dim), 2);
  w.col(0) = error_word(code, losses, 0).amplitudes();
  w.col(1) = error_word(code, losses, 1).amplitudes();
  return w;
}

}  // namespace repsim
