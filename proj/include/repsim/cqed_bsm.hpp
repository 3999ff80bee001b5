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
 * Gate-level model of a transmon-mediated logical Bell measurement on two
 * cavities.
 *
 * Each round entangles the transmon with the joint photon-number phase of
 * both cavities through a dispersive interaction, reads the transmon out and
 * resets it. The first round reveals the Bell sector (Phi vs Psi); a logical
 * Hadamard on both cavities then maps the sign to a sector and a second round
 * reads it. Measurement branches are kept exactly with their Born weights.
 */
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include "repsim/codes.hpp"
#include "repsim/errors.hpp"
#include "repsim/fock.hpp"

namespace repsim {

enum class TransmonGateKind { Hadamard, PhaseCorrectedHadamard, MinusPhaseHadamard };

struct DispersiveGate {
  double phase_per_photon;

  explicit DispersiveGate(double phase) : phase_per_photon(phase) {
    if (!(phase > 0.0 && phase < 2.0 * std::numbers::pi)) throw DomainError("dispersive phase must lie in (0, 2pi)");
  }

  /// Phase that gives the two codewords opposite joint parity signs: pi
  /// over the photon spacing inside a codeword (pi/2 for the lower code).
  static DispersiveGate for_code(const BinomialCode& code) {
    return DispersiveGate(std::numbers::pi / static_cast<double>(code.photon_spacing()));
  }
};

inline ModeShape cqed_shape(std::size_t cavity_dim) { return ModeShape{cavity_dim, cavity_dim, 2}; }

/// exp(i phi (n1 + n2) |e><e|) on cavity (x) cavity (x) transmon.
inline FockOperator dispersive_unitary(std::size_t code_dim, const DispersiveGate& gate) {
  const ModeShape shape = cqed_shape(code_dim);
  const auto n = static_cast<Eigen::Index>(shape.total());
  Matrix u = Matrix::Zero(n, n);
  for (Eigen::Index f = 0; f < n; ++f) {
    const auto occ = shape.occupation(static_cast<std::size_t>(f));
    const double phase = occ[2] == 1 ? gate.phase_per_photon * static_cast<double>(occ[0] + occ[1]) : 0.0;
    u(f, f) = std::polar(1.0, phase);
  }
  return FockOperator(shape, std::move(u));
}

/// Hadamard preceded by a phase gate diag(1, e^{i phase}) that undoes the
/// relative phase picked up from missing photons.
inline Eigen::Matrix2cd phase_compensated_hadamard(double phase) {
  Eigen::Matrix2cd d = Eigen::Matrix2cd::Identity();
  d(1, 1) = std::polar(1.0, phase);
  return gate_matrix(LogicalGate::H) * d;
}

inline FockOperator transmon_gate(TransmonGateKind kind) {
  Eigen::Matrix2cd g;
  switch (kind) {
    case TransmonGateKind::Hadamard:
    case TransmonGateKind::MinusPhaseHadamard: g = gate_matrix(LogicalGate::H); break;
    case TransmonGateKind::PhaseCorrectedHadamard: g = phase_compensated_hadamard(std::numbers::pi / 2.0); break;
  }
  return FockOperator(ModeShape{2}, Matrix(g));
}

/// Joint cavity-cavity-transmon ket plus the per-cavity loss counts reported
/// by the preceding parity checks.
struct CqedState {
  FockKet joint;
  std::array<std::size_t, 2> syndrome{0, 0};

  CqedState(FockKet ket, std::array<std::size_t, 2> flags) : joint(std::move(ket)), syndrome(flags) {
    const ModeShape& s = joint.shape();
    if (s.modes() != 3 || s.dim(2) != 2) throw ShapeMismatch("cQED state must be cavity x cavity x qubit");
    if (s.dim(0) != s.dim(1)) throw ShapeMismatch("cavity dimensions differ");
  }

  /// Two-cavity ket with the transmon in |g>.
  static CqedState prepare(const FockKet& cavities, std::array<std::size_t, 2> flags = {0, 0}) {
    return CqedState(tensor(cavities, FockKet::basis(ModeShape{2}, {0})), flags);
  }
};

struct CqedBranch {
  LogicalBellKind label;
  double probability;
  FockKet post_state;
};

namespace detail {

struct RoundGate {
  Eigen::Matrix2cd pre;  // applied after the dispersive unitary
  bool flip_readout;
};

/// Selects the transmon gate that turns the joint phase back into a plain
/// parity readout for `losses` total missing photons.
inline RoundGate round_gate(const BinomialCode& code, std::size_t losses) {
  const DispersiveGate g = DispersiveGate::for_code(code);
  if (losses == 0) return {transmon_gate(TransmonGateKind::Hadamard).matrix(), false};
  if (code.kind == CodeKind::LBC && losses == 1)
    return {transmon_gate(TransmonGateKind::PhaseCorrectedHadamard).matrix(), false};
  if (code.kind == CodeKind::LBC && losses == 2)
    return {transmon_gate(TransmonGateKind::MinusPhaseHadamard).matrix(), true};
  return {phase_compensated_hadamard(g.phase_per_photon * static_cast<double>(losses)), false};
}

/// Applies a 2x2 transmon gate to the last mode of a cavity-cavity-qubit ket.
inline void apply_qubit(const Eigen::Matrix2cd& g, Vector& v) {
  for (Eigen::Index i = 0; i + 1 < v.size(); i += 2) {
    const Complex a = v(i), b = v(i + 1);
    v(i) = g(0, 0) * a + g(0, 1) * b;
    v(i + 1) = g(1, 0) * a + g(1, 1) * b;
  }
}

/// One parity round; returns the (unnormalized) kets for readout bit 0 and 1,
/// transmon reset to |g>.
inline std::array<Vector, 2> parity_round(const Vector& in, const Vector& dispersive_diag, const RoundGate& gate) {
  Vector v = in;
  apply_qubit(gate_matrix(LogicalGate::H), v);
  v = v.cwiseProduct(dispersive_diag);
  apply_qubit(gate.pre, v);
  Vector ground = Vector::Zero(v.size());
  Vector excited = Vector::Zero(v.size());
  for (Eigen::Index i = 0; i + 1 < v.size(); i += 2) {
    ground(i) = v(i);
    excited(i) = v(i + 1);  // conditional X resets the transmon
  }
  if (gate.flip_readout) return {excited, ground};
  return {ground, excited};
}

/// Logical Hadamard on both cavities in the word bases indicated by the flags.
inline Vector logical_hadamards(const Vector& v, const BinomialCode& code, std::array<std::size_t, 2> flags) {
  const ModeShape shape = cqed_shape(code.fock_dim);
  const FockKet k(shape, v);
  const ModeShape single = code.mode_shape();
  FockKet out = apply_local(lift_gate(gate_matrix(LogicalGate::H), error_words(code, flags[0]), single), 0, k);
  out = apply_local(lift_gate(gate_matrix(LogicalGate::H), error_words(code, flags[1]), single), 1, out);
  return out.amplitudes();
}

inline LogicalBellKind label_from_bits(int sector_bit, int sign_bit) {
  if (sector_bit == 0) return sign_bit == 0 ? LogicalBellKind::PhiPlus : LogicalBellKind::PhiMinus;
  return sign_bit == 0 ? LogicalBellKind::PsiPlus : LogicalBellKind::PsiMinus;
}

/// The protocol as a linear map: output kets for the four labels in
/// kAllBellKinds order. No support checks.
inline std::array<Vector, 4> protocol_outputs(const Vector& in, const BinomialCode& code,
                                              std::array<std::size_t, 2> flags) {
  const FockOperator u = dispersive_unitary(code.fock_dim, DispersiveGate::for_code(code));
  const Vector diag = u.matrix().diagonal();
  const RoundGate gate = round_gate(code, flags[0] + flags[1]);
  std::array<Vector, 4> out;
  const auto first = parity_round(in, diag, gate);
  for (int b1 = 0; b1 < 2; ++b1) {
    const Vector mid = logical_hadamards(first[static_cast<std::size_t>(b1)], code, flags);
    const auto second = parity_round(mid, diag, gate);
    for (int b2 = 0; b2 < 2; ++b2) {
      const LogicalBellKind label = label_from_bits(b1, b2);
      out[static_cast<std::size_t>(label)] = second[static_cast<std::size_t>(b2)];
    }
  }
  return out;
}

}  // namespace detail

/**
 * Runs both parity rounds and returns one branch per Bell label with its
 * Born probability (branches of zero weight included).
 *
 * Throws Unclassifiable if a flag exceeds the code's correctable losses or
 * the cavities are not supported on the flagged word spaces.
 */
inline std::vector<CqedBranch> run_bsm_protocol(const CqedState& state, const BinomialCode& code) {
  if (state.joint.shape() != cqed_shape(code.fock_dim)) throw ShapeMismatch("cQED state does not match the code");
  for (std::size_t f : state.syndrome)
    if (f > code.correctable_losses) throw Unclassifiable("loss count beyond the code's correctable range");

  // Support check: cavities in the flagged word spaces, transmon in |g>.
  const ModeShape single = code.mode_shape();
  FockKet proj = apply_local(lift_gate(Eigen::Matrix2cd::Identity(), error_words(code, state.syndrome[0]), single), 0,
                             state.joint);
  proj = apply_local(lift_gate(Eigen::Matrix2cd::Identity(), error_words(code, state.syndrome[1]), single), 1, proj);
  proj = apply_local(FockOperator(ModeShape{2}, Matrix(Eigen::Matrix2cd{{1, 0}, {0, 0}})), 2, proj);
  if ((proj.amplitudes() - state.joint.amplitudes()).norm() > 1e-10 * std::max(1.0, state.joint.norm()))
    throw Unclassifiable("state is not supported on the flagged codeword or error-word spaces");

  const auto outs = detail::protocol_outputs(state.joint.amplitudes(), code, state.syndrome);
  std::vector<CqedBranch> branches;
  for (std::size_t i = 0; i < kAllBellKinds.size(); ++i)
    branches.push_back({kAllBellKinds[i], outs[i].squaredNorm(), FockKet(state.joint.shape(), outs[i])});
  return branches;
}

}  // namespace repsim
