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
#include "repsim/rates.hpp"
#include "repsim/swapping.hpp"
#include "test_support.hpp"

using namespace repsim;
using Catch::Matchers::WithinAbs;

namespace {

DensityMatrix bell_pair(const BinomialCode& c, LogicalBellKind k = LogicalBellKind::PsiPlus) {
  return DensityMatrix::pure(logical_bell(k, c));
}

/// Random two-mode state supported on codespace (x) codespace.
DensityMatrix random_code_pair(std::mt19937& rng, const BinomialCode& c, double weight = 1.0) {
  const Matrix v = c.encoder();
  const Matrix vv = Eigen::kroneckerProduct(v, v).eval();
  const DensityMatrix logical = testing::random_state(rng, ModeShape{2, 2});
  return DensityMatrix(ModeShape{c.fock_dim, c.fock_dim}, weight * vv * logical.matrix() * vv.adjoint());
}

double total_probability(const std::vector<BsmOutcome>& outs) {
  double s = 0.0;
  for (const auto& o : outs) s += o.probability;
  return s;
}

const BsmOutcome& find(const std::vector<BsmOutcome>& outs, std::optional<LogicalBellKind> k) {
  for (const auto& o : outs)
    if (o.kind == k) return o;
  throw std::runtime_error("outcome missing");
}

}  // namespace

TEST_CASE("click pattern classification") {
  CHECK(classify_clicks({1, 1}) == LogicalBellKind::PsiMinus);
  CHECK(classify_clicks({2, 0}) == LogicalBellKind::PsiPlus);
  CHECK_FALSE(classify_clicks({4, 4}).has_value());
  CHECK_FALSE(classify_clicks({0, 0}).has_value());
  CHECK_FALSE(classify_clicks({2, 2}).has_value());
  CHECK_FALSE(classify_clicks({1, 0}).has_value());

  // Every pattern with 2 or 6 photons is labelled, and each label is unique.
  for (std::size_t total : {2, 6})
    for (std::size_t n1 = 0; n1 <= total; ++n1) CHECK(classify_clicks({n1, total - n1}).has_value());
  for (std::size_t n1 = 0; n1 < 12; ++n1)
    for (std::size_t n2 = 0; n2 < 12; ++n2) {
      const std::size_t t = n1 + n2;
      if (t != 2 && t != 6) CHECK_FALSE(classify_clicks({n1, n2}).has_value());
    }
}

TEST_CASE("Pauli frames turn every Bell state into Psi+") {
  const Eigen::Matrix2cd psi = bell_coefficients(LogicalBellKind::PsiPlus);
  for (LogicalBellKind k : kAllBellKinds) {
    // (I x C) applied to coefficient matrix c gives c C^T.
    const Eigen::Matrix2cd out = bell_coefficients(k) * frame_matrix(correction_for(k)).transpose();
    const Complex ov = (psi.adjoint() * out).trace();
    CHECK_THAT(std::abs(ov), WithinAbs(1.0, 1e-15));
  }
}

TEST_CASE("ideal swapping of perfect pairs") {
  for (CodeKind k : {CodeKind::Unencoded, CodeKind::LBC, CodeKind::HBC}) {
    const auto code = make_code(k);
    const DensityMatrix pair = bell_pair(code);
    const auto outs = ideal_bsm(pair, pair, code);
    REQUIRE(outs.size() == 4);
    for (const auto& o : outs) CHECK_THAT(o.probability, WithinAbs(0.25, 1e-12));
    const DensityMatrix h = heralded_state(outs, code.encoder());
    CHECK_THAT(h.weight(), WithinAbs(1.0, 1e-12));
    CHECK(testing::max_abs(h.matrix() - pair.matrix()) < 1e-12);
  }
}

TEST_CASE("ideal swapping of a damped unencoded pair") {
  const auto code = make_code(CodeKind::Unencoded);
  const DensityMatrix fresh = bell_pair(code);
  const auto ch = kraus_ops(0.2, 2);
  const DensityMatrix waiting = apply_loss(apply_loss(fresh, 0, ch), 1, ch);
  const auto outs = ideal_bsm(waiting, fresh, code);
  const double ps = total_probability(outs);
  // The four Bell states span the full two-qubit space, so nothing is lost.
  CHECK(ps <= 1.0 + 1e-12);
  CHECK_THAT(ps, WithinAbs(1.0, 1e-12));
  const Qber q = qbers(heralded_state(outs, code.encoder()), code);
  CHECK(q.ez > 0.0);
  // Each Psi+ term holds one photon, so the damped pair is
  // (1-g)|Psi+><Psi+| + g|00><00| and the swapped e_z is g.
  CHECK_THAT(q.ez, WithinAbs(0.2, 1e-12));
}

TEST_CASE("ideal measurement of a middle product state") {
  const auto code = make_code(CodeKind::LBC);
  const FockKet z = code.codeword0;
  const DensityMatrix left = DensityMatrix::pure(tensor(z, z));
  const auto outs = ideal_bsm(left, left, code);
  CHECK_THAT(find(outs, LogicalBellKind::PhiPlus).probability, WithinAbs(0.5, 1e-12));
  CHECK_THAT(find(outs, LogicalBellKind::PhiMinus).probability, WithinAbs(0.5, 1e-12));
  CHECK_THAT(find(outs, LogicalBellKind::PsiPlus).probability, WithinAbs(0.0, 1e-14));
  CHECK_THAT(find(outs, LogicalBellKind::PsiMinus).probability, WithinAbs(0.0, 1e-14));
}

TEST_CASE("ideal probabilities add up to the input weight on the codespace") {
  std::mt19937 rng(67);
  for (CodeKind k : {CodeKind::LBC, CodeKind::HBC}) {
    const auto code = make_code(k);
    const DensityMatrix a = random_code_pair(rng, code, 0.9);
    const DensityMatrix b = random_code_pair(rng, code, 0.8);
    CHECK_THAT(total_probability(ideal_bsm(a, b, code)), WithinAbs(0.72, 1e-10));
  }
}

TEST_CASE("factored and dense measurements agree") {
  std::mt19937 rng(71);
  const auto code = make_code(CodeKind::LBC);
  // Off-codespace inputs too: damp a random code pair.
  const auto ch = kraus_ops(0.2, 5);
  const DensityMatrix a = apply_loss(random_code_pair(rng, code), 1, ch);
  const DensityMatrix b = apply_loss(random_code_pair(rng, code), 0, ch);
  const DensityMatrix joint = tensor(a, b);
  for (const auto& m : {ideal_measurement(code), linear_optics_measurement(code), cqed_measurement(code)}) {
    const auto fact = measure(m, a, b);
    const auto dense = measure_dense(m, joint);
    REQUIRE(fact.size() == dense.size());
    for (std::size_t i = 0; i < fact.size(); ++i) {
      CHECK(fact[i].kind == dense[i].kind);
      CHECK_THAT(fact[i].probability, WithinAbs(dense[i].probability, 1e-10));
      CHECK(testing::max_abs(fact[i].post_state.matrix() - dense[i].post_state.matrix()) < 1e-10);
    }
  }
}

TEST_CASE("linear optics heralds half of the Bell states") {
  const auto code = make_code(CodeKind::LBC);
  const auto m = linear_optics_measurement(code);
  const ModeShape pair{5, 5};
  double mixture_success = 0.0;
  for (LogicalBellKind k : kAllBellKinds) {
    const DensityMatrix rho = DensityMatrix::pure(logical_bell(k, code));
    // Middle modes carry the Bell state; outer modes are a trivial product.
    const DensityMatrix left = tensor(DensityMatrix::pure(FockKet::basis(ModeShape{1}, {0})), rho);
    const DensityMatrix joint = tensor(left, DensityMatrix::pure(FockKet::basis(ModeShape{1}, {0})));
    const auto outs = measure_dense(m, joint);
    const double plus = find(outs, LogicalBellKind::PsiPlus).probability;
    const double minus = find(outs, LogicalBellKind::PsiMinus).probability;
    const double fail = find(outs, std::nullopt).probability;
    CHECK_THAT(plus + minus + fail, WithinAbs(1.0, 1e-12));
    if (k == LogicalBellKind::PsiPlus) {
      CHECK_THAT(plus, WithinAbs(1.0, 1e-12));
      CHECK(minus < 1e-12);
    } else if (k == LogicalBellKind::PsiMinus) {
      CHECK_THAT(minus, WithinAbs(1.0, 1e-12));
      CHECK(plus < 1e-12);
    } else {
      CHECK_THAT(fail, WithinAbs(1.0, 1e-12));
    }
    mixture_success += 0.25 * (plus + minus);
  }
  CHECK_THAT(mixture_success, WithinAbs(0.5, 1e-10));

  // The (1,1) pattern alone carries half of the Psi- weight.
  const FockOperator bs = beam_splitter(5);
  const Vector out = bs.matrix() * logical_bell(LogicalBellKind::PsiMinus, code).amplitudes();
  CHECK_THAT(std::norm(out(static_cast<Eigen::Index>(bs.shape_out().index({1, 1})))), WithinAbs(0.5, 1e-12));
}

TEST_CASE("linear optics never confuses Psi+ and Psi-") {
  const auto code = make_code(CodeKind::LBC);
  const auto m = linear_optics_measurement(code);
  for (const auto& br : m.branches) {
    const LogicalBellKind other =
        br.label == LogicalBellKind::PsiPlus ? LogicalBellKind::PsiMinus : LogicalBellKind::PsiPlus;
    const FockKet wrong = logical_bell(other, code);
    for (const auto& phi : br.functionals) {
      CHECK(std::abs(phi.inner(wrong)) < 1e-12);
      CHECK(std::abs(phi.inner(logical_bell(LogicalBellKind::PhiPlus, code))) < 1e-12);
      CHECK(std::abs(phi.inner(logical_bell(LogicalBellKind::PhiMinus, code))) < 1e-12);
    }
  }
  CHECK_THROWS_AS(linear_optics_measurement(make_code(CodeKind::HBC)), UnsupportedCode);
  CHECK_THROWS_AS(linear_optics_measurement(make_code(CodeKind::Unencoded)), UnsupportedCode);
}

TEST_CASE("logical compression is exact on codespace inputs") {
  std::mt19937 rng(73);
  for (CodeKind k : {CodeKind::LBC, CodeKind::HBC}) {
    const auto code = make_code(k);
    const Matrix v = code.encoder();
    const DensityMatrix la = testing::random_state(rng, ModeShape{2, 2});
    const DensityMatrix lb = testing::random_state(rng, ModeShape{2, 2});
    const Matrix vv = Eigen::kroneckerProduct(v, v).eval();
    const DensityMatrix fa(ModeShape{code.fock_dim, code.fock_dim}, vv * la.matrix() * vv.adjoint());
    const DensityMatrix fb(ModeShape{code.fock_dim, code.fock_dim}, vv * lb.matrix() * vv.adjoint());
    std::vector<BellMeasurement> ms{ideal_measurement(code), cqed_measurement(code)};
    if (k == CodeKind::LBC) ms.push_back(linear_optics_measurement(code));
    for (const auto& m : ms) {
      const auto full = measure(m, fa, fb);
      const auto small = measure(compress_to_logical(m, code), la, lb);
      REQUIRE(full.size() == small.size());
      for (std::size_t i = 0; i < full.size(); ++i) {
        CHECK_THAT(full[i].probability, WithinAbs(small[i].probability, 1e-12));
        const Matrix lifted = vv * small[i].post_state.matrix() * vv.adjoint();
        CHECK(testing::max_abs(full[i].post_state.matrix() - lifted) < 1e-12);
      }
    }
  }
}

TEST_CASE("cQED measurement resolves all four Bell states") {
  for (CodeKind k : {CodeKind::Unencoded, CodeKind::LBC, CodeKind::HBC}) {
    const auto code = make_code(k);
    const auto m = cqed_measurement(code);
    for (LogicalBellKind in : kAllBellKinds) {
      const DensityMatrix rho = DensityMatrix::pure(logical_bell(in, code));
      const DensityMatrix one = DensityMatrix::pure(FockKet::basis(ModeShape{1}, {0}));
      const auto outs = measure_dense(m, tensor(tensor(one, rho), one));
      for (const auto& o : outs) CHECK_THAT(o.probability, WithinAbs(o.kind == in ? 1.0 : 0.0, 1e-10));
    }
  }
}
