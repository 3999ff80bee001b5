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
 * Entanglement swapping between two stored pairs (modes 1-2 and 3-4): Bell
 * measurements on the middle modes and the Pauli frame on the outer pair.
 *
 * A Bell measurement is described by labelled branches, each a set of
 * functionals phi on the middle two modes; a branch leaves the outer modes in
 * sum_phi <phi| rho |phi>. Product inputs are contracted pairwise so the joint
 * four-mode matrix is never formed.
 */
#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "repsim/codes.hpp"
#include "repsim/cqed_bsm.hpp"
#include "repsim/errors.hpp"
#include "repsim/fock.hpp"

namespace repsim {

enum class PauliFrame { Identity, Z, X, XZ };

/// Pauli applied to mode 4 to turn a heralded Bell state into Psi+.
inline PauliFrame correction_for(LogicalBellKind kind) {
  switch (kind) {
    case LogicalBellKind::PsiPlus: return PauliFrame::Identity;
    case LogicalBellKind::PsiMinus: return PauliFrame::Z;
    case LogicalBellKind::PhiPlus: return PauliFrame::X;
    case LogicalBellKind::PhiMinus: return PauliFrame::XZ;
  }
  return PauliFrame::Identity;
}

inline Eigen::Matrix2cd frame_matrix(PauliFrame f) {
  switch (f) {
    case PauliFrame::Identity: return gate_matrix(LogicalGate::Id);
    case PauliFrame::Z: return gate_matrix(LogicalGate::Z);
    case PauliFrame::X: return gate_matrix(LogicalGate::X);
    case PauliFrame::XZ: return gate_matrix(LogicalGate::X) * gate_matrix(LogicalGate::Z);
  }
  return gate_matrix(LogicalGate::Id);
}

struct BsmOutcome {
  std::optional<LogicalBellKind> kind;  // empty for a failed measurement
  double probability;
  DensityMatrix post_state;  // modes 1 and 4, subnormalized
  PauliFrame correction;

  bool failed() const noexcept { return !kind.has_value(); }
};

struct ClickPattern {
  std::size_t n1;
  std::size_t n2;
};

/// Photon-counting patterns behind a balanced beam splitter that herald a
/// Psi state of the lower binomial code; anything else fails.
inline std::optional<LogicalBellKind> classify_clicks(ClickPattern p) {
  const auto is = [&](std::size_t a, std::size_t b) { return p.n1 == a && p.n2 == b; };
  if (is(1, 1) || is(1, 5) || is(3, 3) || is(5, 1)) return LogicalBellKind::PsiMinus;
  if (is(2, 0) || is(0, 2) || is(0, 6) || is(2, 4) || is(4, 2) || is(6, 0)) return LogicalBellKind::PsiPlus;
  return std::nullopt;
}

struct MeasurementBranch {
  LogicalBellKind label;
  std::vector<FockKet> functionals;
};

struct BellMeasurement {
  ModeShape pair_shape;  // shape of the two measured modes
  std::vector<MeasurementBranch> branches;
  /// When set, the weight not captured by any branch is reported as a
  /// failed outcome; otherwise it is simply absent (lost).
  bool reports_failure = false;
};

inline BellMeasurement ideal_measurement(const BinomialCode& code) {
  BellMeasurement m{ModeShape{code.fock_dim, code.fock_dim}, {}, false};
  for (LogicalBellKind k : kAllBellKinds) m.branches.push_back({k, {logical_bell(k, code)}});
  return m;
}

/// Beam splitter on the two middle modes followed by photon-number-resolving
/// detection. Defined for the lower binomial code only.
inline BellMeasurement linear_optics_measurement(const BinomialCode& code) {
  if (code.kind != CodeKind::LBC) throw UnsupportedCode("linear-optics Bell measurement needs the lower binomial code");
  const std::size_t d = code.fock_dim;
  const FockOperator bs = beam_splitter(d);
  const ModeShape& out = bs.shape_out();
  BellMeasurement m{ModeShape{d, d}, {}, true};
  MeasurementBranch plus{LogicalBellKind::PsiPlus, {}};
  MeasurementBranch minus{LogicalBellKind::PsiMinus, {}};
  for (std::size_t n1 = 0; n1 < out.dim(0); ++n1)
    for (std::size_t n2 = 0; n2 < out.dim(1); ++n2) {
      const auto label = classify_clicks({n1, n2});
      if (!label) continue;
      const auto row = static_cast<Eigen::Index>(out.index({n1, n2}));
      FockKet phi(bs.shape_in(), bs.matrix().row(row).adjoint());
      (*label == LogicalBellKind::PsiPlus ? plus : minus).functionals.push_back(std::move(phi));
    }
  m.branches = {std::move(plus), std::move(minus)};
  return m;
}

namespace detail {

/// Rank-revealing factorization of a POVM element into functionals.
inline std::vector<FockKet> povm_functionals(const Matrix& effect, const ModeShape& shape) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (effect + effect.adjoint()));
  std::vector<FockKet> out;
  const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double lam = es.eigenvalues()(i);
    if (lam > 1e-13 * scale) out.emplace_back(shape, std::sqrt(lam) * es.eigenvectors().col(i));
  }
  return out;
}

}  // namespace detail

/// Transmon-mediated two-round parity measurement on codespace inputs.
inline BellMeasurement cqed_measurement(const BinomialCode& code) {
  const std::size_t d = code.fock_dim;
  const ModeShape pair{d, d};
  const ModeShape joint = cqed_shape(d);
  const auto n = static_cast<Eigen::Index>(pair.total());
  std::array<Matrix, 4> maps;
  for (auto& a : maps) a = Matrix::Zero(n, n);
  for (Eigen::Index col = 0; col < n; ++col) {
    Vector in = Vector::Zero(static_cast<Eigen::Index>(joint.total()));
    in(2 * col) = 1.0;  // transmon in |g>
    const auto outs = detail::protocol_outputs(in, code, {0, 0});
    for (std::size_t r = 0; r < 4; ++r)
      for (Eigen::Index row = 0; row < n; ++row) maps[r](row, col) = outs[r](2 * row);
  }
  BellMeasurement m{pair, {}, false};
  for (std::size_t r = 0; r < 4; ++r)
    m.branches.push_back({kAllBellKinds[r], detail::povm_functionals(maps[r].adjoint() * maps[r], pair)});
  return m;
}

/// Restricts a measurement to codespace inputs: functionals become
/// two-qubit vectors, compressed to at most rank four per branch. Exact for
/// inputs supported on the codespace.
inline BellMeasurement compress_to_logical(const BellMeasurement& m, const BinomialCode& code) {
  const Matrix v = code.encoder();
  const Matrix vv = Eigen::kroneckerProduct(v, v).eval();
  const ModeShape logical{2, 2};
  BellMeasurement out{logical, {}, m.reports_failure};
  for (const auto& br : m.branches) {
    Matrix effect = Matrix::Zero(4, 4);
    for (const auto& phi : br.functionals) {
      const Vector c = vv.adjoint() * phi.amplitudes();
      effect += c * c.adjoint();
    }
    out.branches.push_back({br.label, detail::povm_functionals(effect, logical)});
  }
  return out;
}

namespace detail {

inline std::vector<BsmOutcome> collect(const BellMeasurement& m, double input_weight, const ModeShape& outer_shape,
                                       const auto& project) {
  std::vector<BsmOutcome> outcomes;
  double captured = 0.0;
  for (const auto& br : m.branches) {
    DensityMatrix acc = DensityMatrix::zero(outer_shape);
    for (const auto& phi : br.functionals) acc = acc + project(phi);
    const double w = acc.weight();
    captured += w;
    outcomes.push_back({br.label, w, std::move(acc), correction_for(br.label)});
  }
  if (m.reports_failure)
    outcomes.push_back({std::nullopt, std::max(0.0, input_weight - captured), DensityMatrix::zero(outer_shape),
                        PauliFrame::Identity});
  return outcomes;
}

}  // namespace detail

/// Factored measurement on rho_12 (x) rho_34; measures modes 2 and 3.
inline std::vector<BsmOutcome> measure(const BellMeasurement& m, const DensityMatrix& left,
                                       const DensityMatrix& right) {
  if (left.shape().modes() != 2 || right.shape().modes() != 2) throw ShapeMismatch("each pair must have two modes");
  if (ModeShape{left.shape().dim(1), right.shape().dim(0)} != m.pair_shape)
    throw ShapeMismatch("measured modes do not match the measurement");
  const ModeShape outer{left.shape().dim(0), right.shape().dim(1)};
  return detail::collect(m, left.weight() * right.weight(), outer,
                         [&](const FockKet& phi) { return project_middle(left, right, phi); });
}

/// Same measurement on an explicit four-mode state.
inline std::vector<BsmOutcome> measure_dense(const BellMeasurement& m, const DensityMatrix& rho) {
  if (rho.shape().modes() != 4) throw ShapeMismatch("swapping needs a four-mode state");
  if (ModeShape{rho.shape().dim(1), rho.shape().dim(2)} != m.pair_shape)
    throw ShapeMismatch("measured modes do not match the measurement");
  const ModeShape outer{rho.shape().dim(0), rho.shape().dim(3)};
  return detail::collect(m, rho.weight(), outer,
                         [&](const FockKet& phi) { return partial_project(rho, {1, 2}, phi); });
}

inline std::vector<BsmOutcome> ideal_bsm(const DensityMatrix& rho_1234, const BinomialCode& code) {
  return measure_dense(ideal_measurement(code), rho_1234);
}
inline std::vector<BsmOutcome> ideal_bsm(const DensityMatrix& left, const DensityMatrix& right,
                                         const BinomialCode& code) {
  return measure(ideal_measurement(code), left, right);
}
inline std::vector<BsmOutcome> linear_optics_bsm(const DensityMatrix& rho_1234, const BinomialCode& code) {
  return measure_dense(linear_optics_measurement(code), rho_1234);
}
inline std::vector<BsmOutcome> linear_optics_bsm(const DensityMatrix& left, const DensityMatrix& right,
                                                 const BinomialCode& code) {
  return measure(linear_optics_measurement(code), left, right);
}

/// Applies the outcome's Pauli frame to the last mode, lifted through the
/// word basis `words` (fock_dim x 2; identity 2x2 for logical states).
inline DensityMatrix apply_frame(const DensityMatrix& post, PauliFrame frame, const Matrix& words) {
  const std::size_t last = post.shape().modes() - 1;
  const Matrix g = words * frame_matrix(frame) * words.adjoint();
  const std::vector<Matrix> k{g};
  return apply_kraus(k, last, post);
}

/// Sum of the frame-corrected post states over the successful outcomes;
/// its weight is the swapping success probability.
inline DensityMatrix heralded_state(const std::vector<BsmOutcome>& outcomes, const Matrix& words) {
  if (outcomes.empty()) throw Error("no outcomes to combine");
  DensityMatrix acc = DensityMatrix::zero(outcomes.front().post_state.shape());
  for (const auto& o : outcomes)
    if (!o.failed()) acc = acc + apply_frame(o.post_state, o.correction, words);
  return acc;
}

}  // namespace repsim
