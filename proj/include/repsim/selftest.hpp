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

#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "repsim/rates.hpp"

namespace repsim {

struct SelfTestResult {
  std::string name;
  bool passed;
  std::string detail;
};

/// Fast invariant checks over the library, for `repeater-sim selftest`.
inline std::vector<SelfTestResult> run_selftest() {
  std::vector<SelfTestResult> out;
  const auto check = [&](std::string name, const std::function<double()>& err, double tol) {
    try {
      const double e = err();
      char buf[64];
      std::snprintf(buf, sizeof buf, "error %.3g (tol %.0e)", e, tol);
      out.push_back({std::move(name), e <= tol, buf});
    } catch (const std::exception& ex) {
      out.push_back({std::move(name), false, ex.what()});
    }
  };

  check("kraus completeness", [] {
    double worst = 0.0;
    for (std::size_t d : {2, 5, 10})
      for (int i = 0; i < 100; ++i) {
        const auto ch = kraus_ops(i / 100.0, d);
        Matrix s = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
        for (const auto& k : ch.kraus) s += k.matrix().adjoint() * k.matrix();
        worst = std::max(worst, (s - Matrix::Identity(s.rows(), s.cols())).cwiseAbs().maxCoeff());
      }
    return worst;
  }, 1e-10);

  check("codeword moments", [] {
    const auto moment = [](const BinomialCode& c, std::size_t bit, int power) {
      const Matrix n = number_operator(c.fock_dim).matrix();
      Matrix np = Matrix::Identity(n.rows(), n.cols());
      for (int i = 0; i < power; ++i) np = np * n;
      const Vector& v = c.codeword(bit).amplitudes();
      return v.dot(np * v).real();
    };
    const auto lbc = make_code(CodeKind::LBC);
    const auto hbc = make_code(CodeKind::HBC);
    return std::max({std::abs(moment(lbc, 0, 1) - 2.0), std::abs(moment(lbc, 1, 1) - 2.0),
                     std::abs(moment(hbc, 0, 1) - 4.5), std::abs(moment(hbc, 1, 1) - 4.5),
                     std::abs(moment(hbc, 0, 2) - 27.0), std::abs(moment(hbc, 1, 2) - 27.0)});
  }, 1e-12);

  check("beam splitter isometry", [] {
    double worst = 0.0;
    for (std::size_t d = 2; d <= 12; ++d) {
      const Matrix u = beam_splitter(d).matrix();
      worst = std::max(worst, (u.adjoint() * u - Matrix::Identity(u.cols(), u.cols())).cwiseAbs().maxCoeff());
    }
    return worst;
  }, 1e-10);

  check("chi concat vs superoperator product", [] {
    const auto code = make_code(CodeKind::LBC);
    const ChiMatrix a = extract_logical_channel(code, 0.05);
    const ChiMatrix b = extract_logical_channel(code, 0.2);
    return (concat(a, b).superop() - a.superop() * b.superop()).cwiseAbs().maxCoeff();
  }, 1e-12);

  check("noiseless swap", [] {
    double worst = 0.0;
    for (CodeKind k : {CodeKind::Unencoded, CodeKind::LBC, CodeKind::HBC}) {
      RepeaterConfig cfg;
      cfg.code = k;
      cfg.eta_m = 1.0;
      cfg.tau_coh_s = std::numeric_limits<double>::infinity();
      cfg.L0_km = 50.0;
      const RateResult r = run_sec(cfg);
      worst = std::max({worst, std::abs(r.avg_ps - 1.0), r.avg_ex, r.avg_ez});
    }
    return worst;
  }, 1e-10);

  check("cQED classifier", [] {
    const auto code = make_code(CodeKind::LBC);
    double worst = 0.0;
    for (LogicalBellKind k : kAllBellKinds) {
      const auto branches = run_bsm_protocol(CqedState::prepare(logical_bell(k, code)), code);
      for (const auto& b : branches) worst = std::max(worst, std::abs(b.probability - (b.label == k ? 1.0 : 0.0)));
    }
    return worst;
  }, 1e-10);

  return out;
}

}  // namespace repsim
