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

#include "repsim/channels.hpp"
#include "repsim/codes.hpp"
#include "repsim/recovery.hpp"
#include "test_support.hpp"

using namespace repsim;
using Catch::Matchers::WithinAbs;

namespace {

Matrix codespace_projector(const BinomialCode& c) {
  const Matrix v = c.encoder();
  return v * v.adjoint();
}

FockKet logical_state(const BinomialCode& c, Complex a, Complex b) {
  return (a * c.codeword0 + b * c.codeword1).normalized();
}

/// |<psi|phi>| for normalized kets, i.e. proportionality up to phase.
double alignment(const FockKet& psi, const FockKet& phi) { return std::abs(psi.inner(phi.normalized())); }

double logical_infidelity(double gamma) {
  const auto code = make_code(CodeKind::LBC);
  const FockKet plus = logical_state(code, 1.0, 1.0);
  DensityMatrix rho = DensityMatrix::pure(plus);
  rho = correct(apply_loss(rho, 0, kraus_ops(gamma, 5)), 0, code, gamma);
  return 1.0 - rho.expectation(plus);
}

}  // namespace

TEST_CASE("LBC no-loss recovery") {
  const auto code = make_code(CodeKind::LBC);
  const FockOperator r0 = lbc_r0(0.0);
  CHECK((r0(code.codeword0).amplitudes() - code.codeword0.amplitudes()).norm() < 1e-15);
  CHECK((r0(code.codeword1).amplitudes() - code.codeword1.amplitudes()).norm() < 1e-15);
  CHECK(lbc_r0(0.2)(FockKet::basis(ModeShape{5}, {3})).norm() == 0.0);

  // Oracle: the deformed word (|0> + (1-g)^2 |4>)/sqrt2, normalized, by hand.
  const double g = 0.1;
  const double s = (1 - g) * (1 - g);
  const FockKet deformed = FockKet::from_terms(ModeShape{5}, {{{0}, 1.0}, {{4}, s}}).normalized();
  const FockKet back = lbc_r0(g)(deformed);
  CHECK_THAT(alignment(code.codeword0, back), WithinAbs(1.0, 1e-14));
  CHECK_THAT(back.norm(), WithinAbs(1.0, 1e-14));

  // A superposition is only recovered up to O(g^2).
  const FockKet plus = logical_state(code, 1.0, 1.0);
  const FockKet damped = kraus_ops(g, 5).kraus[0](plus).normalized();
  const double infid = 1.0 - std::norm(plus.inner(lbc_r0(g)(damped).normalized()));
  CHECK(infid > 0.0);
  CHECK(infid < g * g);

  CHECK_THROWS_AS(lbc_r0(-0.1), DomainError);
  CHECK_THROWS_AS(lbc_r0(1.1), DomainError);
}

TEST_CASE("LBC one-loss recovery") {
  const auto code = make_code(CodeKind::LBC);
  const FockOperator r1 = lbc_r1();
  CHECK((r1(FockKet::basis(ModeShape{5}, {3})).amplitudes() - code.codeword0.amplitudes()).norm() < 1e-15);
  CHECK(r1(FockKet::basis(ModeShape{5}, {0})).norm() == 0.0);

  const double g = 0.2;
  const FockKet out = r1(kraus_ops(g, 5).kraus[1](code.codeword0));
  const double expected = std::sqrt(2.0) * std::pow(1 - g, 1.5) * std::sqrt(g);
  CHECK((out.amplitudes() - expected * code.codeword0.amplitudes()).norm() < 1e-14);
}

TEST_CASE("HBC recovery operators") {
  const auto code = make_code(CodeKind::HBC);
  const FockOperator r0 = hbc_recovery(0, 0.0);
  CHECK((r0(code.codeword0).amplitudes() - code.codeword0.amplitudes()).norm() < 1e-14);
  CHECK((r0(code.codeword1).amplitudes() - code.codeword1.amplitudes()).norm() < 1e-14);
  CHECK_FALSE(hbc_r0_degenerate(0.1));

  const FockKet r1 = hbc_recovery(1, 0.1)(FockKet::basis(ModeShape{10}, {5}));
  CHECK((r1.amplitudes() - code.codeword0.amplitudes()).norm() < 1e-15);

  // E2|1> = g sqrt(1-g) [3/2 |1> + 3 (1-g)^3 |7>] by direct substitution.
  const double g = 0.15;
  const FockKet e2 = kraus_ops(g, 10).kraus[2](code.codeword1);
  const double c1 = g * std::sqrt(1 - g) * 1.5, c7 = g * std::sqrt(1 - g) * 3.0 * std::pow(1 - g, 3);
  CHECK_THAT(e2.amplitude({1}).real(), WithinAbs(c1, 1e-14));
  CHECK_THAT(e2.amplitude({7}).real(), WithinAbs(c7, 1e-14));
  const FockKet back = hbc_recovery(2, g)(e2.normalized());
  CHECK_THAT(alignment(code.codeword1, back), WithinAbs(1.0, 1e-14));

  CHECK_THROWS_AS(hbc_recovery(3, 0.1), DomainError);
}

TEST_CASE("detected leading-order losses are corrected exactly") {
  // a^k is the small-loss limit of E_k / g^(k/2); recovery must map it back
  // onto the same logical state for every logical input.
  std::mt19937 rng(41);
  std::normal_distribution<double> n(0.0, 1.0);
  for (CodeKind k : {CodeKind::LBC, CodeKind::HBC}) {
    const auto code = make_code(k);
    const FockOperator a = annihilation(code.fock_dim);
    for (int trial = 0; trial < 10; ++trial) {
      const FockKet psi = logical_state(code, Complex(n(rng), n(rng)), Complex(n(rng), n(rng)));
      const RecoveryMap map = RecoveryMap::build(code, 0.0);
      FockKet lost = psi;
      for (std::size_t losses = 0; losses <= code.correctable_losses; ++losses) {
        const FockKet fixed = map.branch_ops[losses](lost);
        CHECK_THAT(alignment(psi, fixed), WithinAbs(1.0, 1e-10));
        lost = a(lost);
      }
    }
  }
}

TEST_CASE("finite-gamma one-loss recovery is faithful to second order") {
  const auto code = make_code(CodeKind::LBC);
  const FockKet plus = logical_state(code, 1.0, 1.0);
  for (double g : {1e-3, 1e-2, 1e-1}) {
    const FockKet fixed = lbc_r1()(kraus_ops(g, 5).kraus[1](plus));
    const double dev = 1.0 - alignment(plus, fixed);
    CHECK(dev < g * g);
  }
}

TEST_CASE("branch operators map into the codespace") {
  for (CodeKind k : {CodeKind::LBC, CodeKind::HBC})
    for (double g : {0.0, 0.05, 0.3, 0.7}) {
      const auto code = make_code(k);
      const Matrix p = codespace_projector(code);
      for (const auto& b : RecoveryMap::build(code, g).branch_ops)
        CHECK(testing::max_abs(p * b.matrix() - b.matrix()) < 1e-10);
    }
}

TEST_CASE("correct is trace non-increasing, positive and lands in the codespace") {
  std::mt19937 rng(43);
  for (CodeKind k : {CodeKind::LBC, CodeKind::HBC}) {
    const auto code = make_code(k);
    const std::size_t d = code.fock_dim;
    for (double g : {0.01, 0.2, 0.45}) {
      const DensityMatrix rho = testing::random_state(rng, ModeShape{d, 2});
      const DensityMatrix out = correct(rho, 0, code, g);
      CHECK(out.weight() <= rho.weight() + 1e-12);
      CHECK(out.is_valid());
      const Matrix leak = Matrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)) -
                          codespace_projector(code);
      const Matrix lk = Eigen::kroneckerProduct(leak, Matrix::Identity(2, 2)).eval();
      CHECK(std::abs((lk * out.matrix()).trace()) < 1e-10);
    }
  }
  CHECK_THROWS_AS(correct(DensityMatrix::zero(ModeShape{2}), 0, make_code(CodeKind::Unencoded), 0.1), UnsupportedCode);
}

TEST_CASE("correction on a noiseless pair is the identity") {
  for (CodeKind k : {CodeKind::LBC, CodeKind::HBC}) {
    const auto code = make_code(k);
    const DensityMatrix rho = DensityMatrix::pure(logical_bell(LogicalBellKind::PsiPlus, code));
    const DensityMatrix out = correct(correct(rho, 0, code, 0.0), 1, code, 0.0);
    CHECK(testing::max_abs(out.matrix() - rho.matrix()) < 1e-12);
    CHECK_THAT(out.weight(), WithinAbs(1.0, 1e-12));
  }
}

TEST_CASE("correction improves a damped Bell pair") {
  const auto code = make_code(CodeKind::LBC);
  const FockKet bell = logical_bell(LogicalBellKind::PsiPlus, code);
  const double g = 0.1;
  const DensityMatrix damped = apply_loss(DensityMatrix::pure(bell), 0, kraus_ops(g, 5));
  const DensityMatrix fixed = correct(damped, 0, code, g);
  CHECK(fixed.expectation(bell) > damped.expectation(bell));
}

TEST_CASE("residual infidelity after correction is second order") {
  const double f1 = logical_infidelity(1e-3);
  const double f2 = logical_infidelity(1e-2);
  const double slope = std::log(f2 / f1) / std::log(10.0);
  CHECK_THAT(slope, WithinAbs(2.0, 0.2));
}
