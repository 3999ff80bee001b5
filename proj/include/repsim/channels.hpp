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
#include <cstddef>
#include <limits>
#include <vector>

#include "repsim/errors.hpp"
#include "repsim/fock.hpp"

namespace repsim {

/// Single-mode amplitude damping with loss probability gamma, all dim Kraus
/// operators retained.
struct DampingChannel {
  double gamma;
  std::size_t dim;
  std::vector<FockOperator> kraus;

  std::vector<Matrix> matrices() const {
    std::vector<Matrix> m;
    m.reserve(kraus.size());
    for (const auto& k : kraus) m.push_back(k.matrix());
    return m;
  }
};

inline DampingChannel kraus_ops(double gamma, std::size_t dim) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw DomainError("loss probability must lie in [0, 1]");
  if (dim < 1) throw InvalidDimension("Fock dimension must be positive");
  ModeShape shape{dim};
  const auto d = static_cast<Eigen::Index>(dim);
  std::vector<FockOperator> ops;
  ops.reserve(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    Matrix e = Matrix::Zero(d, d);
    for (std::size_t n = k; n < dim; ++n) {
      // C(n, k) (1-g)^(n-k) g^k; std::pow(0, 0) == 1 keeps the edges exact.
      const double binom = std::round(std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)));
      const double w = binom * std::pow(1.0 - gamma, static_cast<double>(n - k)) * std::pow(gamma, static_cast<double>(k));
      e(static_cast<Eigen::Index>(n - k), static_cast<Eigen::Index>(n)) = std::sqrt(w);
    }
    ops.emplace_back(shape, std::move(e));
  }
  return {gamma, dim, std::move(ops)};
}

inline DensityMatrix apply_loss(const DensityMatrix& rho, std::size_t mode, const DampingChannel& channel) {
  if (mode >= rho.shape().modes()) throw ShapeMismatch("mode index out of range");
  if (rho.shape().dim(mode) != channel.dim) throw ShapeMismatch("channel dimension does not match mode");
  const auto m = channel.matrices();
  return apply_kraus(m, mode, rho);
}

/// Timing of one elementary link attempt and memory quality. tau_coh may be
/// +infinity for an ideal memory.
struct TimeModel {
  double T0;
  double tau_coh;
  double eta_m = 1.0;

  TimeModel(double t0, double tau, double eta = 1.0) : T0(t0), tau_coh(tau), eta_m(eta) {
    if (!(T0 > 0.0)) throw DomainError("attempt time T0 must be positive");
    if (!(tau_coh > 0.0)) throw DomainError("coherence time must be positive");
    if (!(eta_m > 0.0 && eta_m <= 1.0)) throw DomainError("memory efficiency must lie in (0, 1]");
  }
};

inline double gamma_from_wait(std::size_t n_steps, const TimeModel& tm) {
  return -std::expm1(-static_cast<double>(n_steps) * tm.T0 / tm.tau_coh);
}

inline double compose_gammas(double g1, double g2) {
  if (!(g1 >= 0.0 && g1 <= 1.0 && g2 >= 0.0 && g2 <= 1.0)) throw DomainError("loss probabilities must lie in [0, 1]");
  return 1.0 - (1.0 - g1) * (1.0 - g2);
}

}  // namespace repsim
