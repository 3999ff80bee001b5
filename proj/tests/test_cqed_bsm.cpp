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

#include <catch_amalgamated.hpp>

#include <numbers>

#include "repsim/cqed_bsm.hpp"
#include "test_support.hpp"

using namespace repsim;
using Catch::Matchers::WithinAbs;

namespace {

constexpr double kPi = std::numbers::pi;

/// Bell state written in the error-word bases selected by the flags.
FockKet flagged_bell(LogicalBellKind k, const BinomialCode& code, std::array<std::size_t, 2> flags) {
  const Eigen::Matrix2cd c = bell_coefficients(k);
  FockKet out = FockKet::zero(ModeShape{code.fock_dim, code.fock_dim});
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      out = out + c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) *
                      tensor(error_word(code, flags[0], i), error_word(code, flags[1], j));
  return out;
}

Eigen::Matrix4d confusion(const BinomialCode& code, std::array<std::size_t, 2> flags) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  for (std::size_t in = 0; in < 4; ++in) {
    const auto branches = run_bsm_protocol(CqedState::prepare(flagged_bell(kAllBellKinds[in], code, flags), flags), code);
    for (const auto& b : branches) m(static_cast<Eigen::Index>(in), static_cast<Eigen::Index>(b.label)) = b.probability;
  }
  return m;
}

}  // namespace

TEST_CASE("dispersive phase per code") {
  CHECK_THAT(DispersiveGate::for_code(make_code(CodeKind::LBC)).phase_per_photon, WithinAbs(kPi / 2, 1e-15));
  CHECK_THAT(DispersiveGate::for_code(make_code(CodeKind::HBC)).phase_per_photon, WithinAbs(kPi / 3, 1e-15));
  CHECK_THAT(DispersiveGate::for_code(make_code(CodeKind::Unencoded)).phase_per_photon, WithinAbs(kPi, 1e-15));
  CHECK_THROWS_AS(DispersiveGate(0.0), DomainError);
  CHECK_THROWS_AS(DispersiveGate(2 * kPi), DomainError);
  CHECK_THROWS_AS(DispersiveGate(-1.0), DomainError);
}

TEST_CASE("dispersive unitary is diagonal and unitary") {
  const FockOperator u = dispersive_unitary(5, DispersiveGate(kPi / 2));
  const Matrix& m = u.matrix();
  CHECK(testing::max_abs(m * m.adjoint() - Matrix::Identity(m.rows(), m.cols())) < 1e-14);
  CHECK(testing::max_abs(Matrix(m.diagonal().asDiagonal()) - m) == 0.0);
  const ModeShape s = cqed_shape(5);
  // |1,2,e> picks up exp(3 i pi/2); |1,2,g> is untouched.
  CHECK(std::abs(m(s.index({1, 2, 1}), s.index({1, 2, 1})) - std::polar(1.0, 1.5 * kPi)) < 1e-14);
  CHECK(std::abs(m(s.index({1, 2, 0}), s.index({1, 2, 0})) - 1.0) < 1e-14);
}

TEST_CASE("transmon gates") {
  const Eigen::Matrix2cd h = gate_matrix(LogicalGate::H);
  CHECK(testing::max_abs(transmon_gate(TransmonGateKind::Hadamard).matrix() - Matrix(h)) < 1e-15);
  CHECK(testing::max_abs(transmon_gate(TransmonGateKind::MinusPhaseHadamard).matrix() - Matrix(h)) < 1e-15);
  const Eigen::Matrix2cd s{{1, 0}, {0, Complex(0, 1)}};
  CHECK(testing::max_abs(transmon_gate(TransmonGateKind::PhaseCorrectedHadamard).matrix() - Matrix(h * s)) < 1e-15);
  for (double phi : {0.3, 1.0, 2.5}) {
    const Eigen::Matrix2cd g = phase_compensated_hadamard(phi);
    CHECK(testing::max_abs(Matrix(g * g.adjoint() - Eigen::Matrix2cd::Identity())) < 1e-15);
  }
}

TEST_CASE("confusion matrix is the identity without losses") {
  for (CodeKind k : {CodeKind::Unencoded, CodeKind::LBC, CodeKind::HBC}) {
    const auto m = confusion(make_code(k), {0, 0});
    CHECK((m - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("confusion matrix is the identity for every flagged loss pattern") {
  for (CodeKind k : {CodeKind::LBC, CodeKind::HBC}) {
    const auto code = make_code(k);
    for (std::size_t f1 = 0; f1 <= code.correctable_losses; ++f1)
      for (std::size_t f2 = 0; f2 <= code.correctable_losses; ++f2) {
        CAPTURE(to_string(k), f1, f2);
        const auto m = confusion(code, {f1, f2});
        CHECK((m - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() < 1e-12);
      }
  }
}

TEST_CASE("first readout separates the Bell sectors") {
  const auto code = make_code(CodeKind::LBC);
  const FockOperator u = dispersive_unitary(code.fock_dim, DispersiveGate::for_code(code));
  const Vector diag = u.matrix().diagonal();
  const auto gate = detail::round_gate(code, 0);
  for (LogicalBellKind k : kAllBellKinds) {
    const auto st = CqedState::prepare(logical_bell(k, code));
    const auto r = detail::parity_round(st.joint.amplitudes(), diag, gate);
    const bool psi = k == LogicalBellKind::PsiPlus || k == LogicalBellKind::PsiMinus;
    CHECK_THAT(r[1].squaredNorm(), WithinAbs(psi ? 1.0 : 0.0, 1e-12));
  }
}

TEST_CASE("post-measurement states keep the transmon in the ground state") {
  const auto code = make_code(CodeKind::HBC);
  const auto branches = run_bsm_protocol(CqedState::prepare(logical_bell(LogicalBellKind::PsiMinus, code)), code);
  const ModeShape s = cqed_shape(code.fock_dim);
  for (const auto& b : branches)
    for (std::size_t i = 0; i < s.total(); ++i)
      if (s.occupation(i)[2] == 1) CHECK(std::abs(b.post_state.amplitudes()(static_cast<Eigen::Index>(i))) == 0.0);
}

TEST_CASE("unclassifiable inputs") {
  const auto lbc = make_code(CodeKind::LBC);
  const FockKet bell = logical_bell(LogicalBellKind::PhiPlus, lbc);
  CHECK_THROWS_AS(run_bsm_protocol(CqedState::prepare(bell, {2, 0}), lbc), Unclassifiable);
  // Codespace state reported as having lost a photon.
  CHECK_THROWS_AS(run_bsm_protocol(CqedState::prepare(bell, {1, 0}), lbc), Unclassifiable);
  // Transmon starting excited.
  const FockKet excited = tensor(bell, FockKet::basis(ModeShape{2}, {1}));
  CHECK_THROWS_AS(run_bsm_protocol(CqedState(excited, {0, 0}), lbc), Unclassifiable);
  CHECK_THROWS_AS(CqedState(bell, {0, 0}), ShapeMismatch);
  CHECK_THROWS_AS(run_bsm_protocol(CqedState::prepare(bell), make_code(CodeKind::HBC)), ShapeMismatch);
}
