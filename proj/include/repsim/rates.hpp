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
 * Two-segment repeater pipeline: waiting-time statistics, memory decay with
 * single (SEC) or periodic (MEC) error correction, swapping, QBERs and the
 * resulting BB84 key rate.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <string_view>
#include <vector>

#include "repsim/channels.hpp"
#include "repsim/codes.hpp"
#include "repsim/errors.hpp"
#include "repsim/fock.hpp"
#include "repsim/logical_channel.hpp"
#include "repsim/recovery.hpp"
#include "repsim/swapping.hpp"

namespace repsim {

enum class Scheme { SEC, MEC };
enum class BsmKind { Ideal, LinearOptics, Cqed };

/// Logical: per-mode 4x4 channels on codespace pairs (exact whenever every
/// stored mode is corrected). Fock: explicit two-mode density matrices.
enum class Engine { Logical, Fock };

/// Which pairs are error-corrected before swapping.
enum class RecoveryScope { AllPairs, WaitingPairOnly };

inline std::string_view to_string(Scheme s) { return s == Scheme::SEC ? "sec" : "mec"; }

inline std::string_view to_string(BsmKind b) {
  switch (b) {
    case BsmKind::Ideal: return "ideal";
    case BsmKind::LinearOptics: return "optics";
    case BsmKind::Cqed: return "cqed";
  }
  return "?";
}

inline Scheme parse_scheme(std::string_view s) {
  if (s == "sec") return Scheme::SEC;
  if (s == "mec") return Scheme::MEC;
  throw Error("unknown scheme '" + std::string(s) + "'");
}

inline BsmKind parse_bsm(std::string_view s) {
  if (s == "ideal") return BsmKind::Ideal;
  if (s == "optics") return BsmKind::LinearOptics;
  if (s == "cqed") return BsmKind::Cqed;
  throw Error("unknown bsm '" + std::string(s) + "'");
}

struct RepeaterConfig {
  double L0_km = 10.0;
  double L_att_km = 22.0;
  double c_m_per_s = 2e8;
  double p_link = 1.0;
  double tau_coh_s = 1.0;
  double eta_m = 1.0;
  CodeKind code = CodeKind::LBC;
  Scheme scheme = Scheme::SEC;
  BsmKind bsm = BsmKind::Ideal;
  double mec_gamma_interval = 0.1;
  std::size_t mec_max_recoveries = 100;
  double sec_gamma_cutoff = 0.5;
  Engine engine = Engine::Logical;
  RecoveryScope recovery_scope = RecoveryScope::AllPairs;

  double T0() const { return L0_km * 1e3 / c_m_per_s; }
  TimeModel time_model() const { return TimeModel(T0(), tau_coh_s, eta_m); }

  void validate() const {
    if (!(L0_km > 0.0 && L_att_km > 0.0 && c_m_per_s > 0.0)) throw DomainError("lengths and speeds must be positive");
    if (!(tau_coh_s > 0.0)) throw DomainError("coherence time must be positive");
    if (!(p_link > 0.0 && p_link <= 1.0)) throw DomainError("p_link must lie in (0, 1]");
    if (!(eta_m > 0.0 && eta_m <= 1.0)) throw DomainError("eta_m must lie in (0, 1]");
    if (!(sec_gamma_cutoff > 0.0 && sec_gamma_cutoff < 1.0)) throw DomainError("SEC cutoff must lie in (0, 1)");
    if (!(mec_gamma_interval > 0.0 && mec_gamma_interval < 1.0)) throw DomainError("MEC interval must lie in (0, 1)");
    if (mec_max_recoveries < 1) throw DomainError("MEC needs at least one recovery");
  }
};

inline constexpr std::size_t kUnbounded = std::numeric_limits<std::size_t>::max();

/// Smallest step count n with gamma_from_wait(n) >= target.
inline std::size_t steps_to_reach(double target, const TimeModel& tm) {
  if (target <= 0.0) return 0;
  if (std::isinf(tm.tau_coh)) return kUnbounded;
  const double guess = std::ceil(-std::log1p(-target) * tm.tau_coh / tm.T0);
  if (!(guess < 1e18)) return kUnbounded;
  auto n = static_cast<std::size_t>(guess);
  while (n > 0 && gamma_from_wait(n - 1, tm) >= target) --n;
  while (gamma_from_wait(n, tm) < target) ++n;
  return n;
}

/**
 * Distribution of the waiting time |n12 - n34| between two independent
 * geometric link generations, truncated at d_max and renormalized.
 */
struct WaitDistribution {
  double p;
  std::size_t d_max;
  double mean_n_max;

  WaitDistribution(double success, std::size_t cutoff) : p(success), d_max(cutoff) {
    if (!(p > 0.0 && p <= 1.0)) throw DomainError("link success probability must lie in (0, 1]");
    mean_n_max = 2.0 / p - 1.0 / (2.0 * p - p * p);
    norm_ = (p - 2.0 * std::expm1(log_q(d_max)) * (1.0 - p)) / (2.0 - p);
  }

  /// Untruncated probability of a waiting time d.
  double raw(std::size_t d) const {
    if (d == 0) return p / (2.0 - p);
    return 2.0 * p * std::exp(log_q(d)) / (2.0 - p);
  }

  double pmf(std::size_t d) const { return d > d_max ? 0.0 : raw(d) / norm_; }

  /// Last waiting time whose mass is relevant at double precision.
  std::size_t support_end() const {
    if (p >= 1.0) return 0;
    // tail beyond D: 2 (1-p)^(D+1) / (2-p)
    const double target = std::log(1e-18 * norm_ * (2.0 - p) / 2.0);
    const double d = std::ceil(target / std::log1p(-p));
    if (!(d < static_cast<double>(d_max))) return d_max;
    return static_cast<std::size_t>(std::max(0.0, d));
  }

 private:
  double log_q(std::size_t d) const {
    if (d == 0) return 0.0;
    if (d == kUnbounded) return -std::numeric_limits<double>::infinity();
    return static_cast<double>(d) * std::log1p(-p);
  }
  double norm_ = 1.0;
};

inline double link_success_probability(const RepeaterConfig& cfg) {
  return cfg.p_link * std::exp(-cfg.L0_km / cfg.L_att_km);
}

/// Interval length (in attempts) between MEC recoveries.
inline std::size_t mec_interval_steps(const RepeaterConfig& cfg) {
  return std::max<std::size_t>(1, steps_to_reach(cfg.mec_gamma_interval, cfg.time_model()));
}

inline std::size_t waiting_cutoff(const RepeaterConfig& cfg) {
  const TimeModel tm = cfg.time_model();
  const std::size_t sec = steps_to_reach(cfg.sec_gamma_cutoff, tm);
  if (cfg.scheme == Scheme::SEC) return sec;
  const std::size_t k = mec_interval_steps(cfg);
  const std::size_t mec = k > kUnbounded / cfg.mec_max_recoveries ? kUnbounded : k * cfg.mec_max_recoveries;
  return std::min(sec, mec);
}

inline WaitDistribution wait_distribution(const RepeaterConfig& cfg) {
  const double p = link_success_probability(cfg);
  if (!(p > 0.0)) throw DomainError("link success probability underflows to zero");
  return WaitDistribution(p, waiting_cutoff(cfg));
}

struct Qber {
  double ez;
  double ex;
  double leakage;  // weight outside codespace (x) codespace
};

/// QBERs of a two-mode state relative to Psi+, renormalized over the
/// codespace. Accepts either Fock-level (fock_dim per mode) or logical
/// (2 per mode) states.
inline Qber qbers(const DensityMatrix& rho14, const BinomialCode& code) {
  const ModeShape& s = rho14.shape();
  if (s.modes() != 2 || s.dim(0) != s.dim(1)) throw ShapeMismatch("QBERs need a two-mode state");
  Eigen::Matrix4cd r;
  if (s.dim(0) == code.fock_dim) {
    const Matrix v = code.encoder();
    const Matrix vv = Eigen::kroneckerProduct(v, v).eval();
    r = vv.adjoint() * rho14.matrix() * vv;
  } else if (s.dim(0) == 2) {
    r = rho14.matrix();
  } else {
    throw ShapeMismatch("state does not match the code dimension");
  }
  const double total = rho14.weight();
  const double inside = r.trace().real();
  if (!(inside > 0.0)) throw DomainError("state has no weight in the codespace");
  r /= inside;
  const double ez = (r(0, 0) + r(3, 3)).real();
  const Eigen::Matrix2cd h = gate_matrix(LogicalGate::H);
  const Eigen::Matrix4cd hh = Eigen::kroneckerProduct(h, h).eval();
  const Eigen::Matrix4cd rx = hh * r * hh.adjoint();
  const double ex = (rx(1, 1) + rx(2, 2)).real();
  return {std::clamp(ez, 0.0, 1.0), std::clamp(ex, 0.0, 1.0), std::max(0.0, 1.0 - inside / total)};
}

inline double binary_entropy(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

inline double skf(double avg_ex, double avg_ez) { return 1.0 - binary_entropy(avg_ex) - binary_entropy(avg_ez); }

struct RateResult {
  double raw_rate_hz = 0.0;
  double skf = 0.0;
  double skr_hz = 0.0;
  double avg_ex = 0.0;
  double avg_ez = 0.0;
  double avg_ps = 0.0;
  std::size_t d_max = 0;
  double leakage = 0.0;  // mean weight dropped by recovery before swapping
  double p = 0.0;
  double mean_n_max = 0.0;
};

/// Swapping statistics for one waiting time.
struct SwapPoint {
  double ps;
  double ez;
  double ex;
  double leakage;
};

namespace detail {

inline BellMeasurement fock_measurement(const BinomialCode& code, BsmKind kind) {
  switch (kind) {
    case BsmKind::Ideal: return ideal_measurement(code);
    case BsmKind::LinearOptics: return linear_optics_measurement(code);
    case BsmKind::Cqed: return cqed_measurement(code);
  }
  throw Error("unknown Bell measurement");
}

inline DensityMatrix logical_pair(const Superop& s) {
  const Eigen::Matrix2cd c = bell_coefficients(LogicalBellKind::PsiPlus);
  Eigen::Vector4cd psi{c(0, 0), c(0, 1), c(1, 0), c(1, 1)};
  const Eigen::Matrix4cd rho = psi * psi.adjoint();
  return DensityMatrix(ModeShape{2, 2}, Matrix(apply_pair(s, s, rho)));
}

/**
 * Evaluates P_s, QBERs and leakage per waiting time for one configuration.
 * Per-mode channels and intermediate states are cached across d.
 */
class Pipeline {
 public:
  explicit Pipeline(const RepeaterConfig& cfg)
      : cfg_(cfg), code_(make_code(cfg.code)), tm_(cfg.time_model()), eta_loss_(1.0 - cfg.eta_m) {
    cfg_.validate();
    encoded_ = code_.kind != CodeKind::Unencoded;
    if (cfg_.scheme == Scheme::MEC) {
      if (!encoded_) throw UnsupportedCode("multiple error correction needs an encoded memory");
      interval_ = mec_interval_steps(cfg_);
    }
    // A logical treatment is exact only when every stored mode is corrected.
    fock_ = cfg_.engine == Engine::Fock || (encoded_ && cfg_.recovery_scope == RecoveryScope::WaitingPairOnly);
    const BellMeasurement m = fock_measurement(code_, cfg_.bsm);
    if (fock_) {
      measurement_ = m;
      words_ = code_.encoder();
      fresh_ = fock_pair_after(fock_bell(), eta_loss_, cfg_.recovery_scope == RecoveryScope::AllPairs);
    } else {
      measurement_ = compress_to_logical(m, code_);
      words_ = Matrix::Identity(2, 2);
      fresh_ = logical_pair(cycle_superop(code_, eta_loss_));
    }
  }

  const BinomialCode& code() const noexcept { return code_; }

  SwapPoint evaluate(std::size_t d) {
    const DensityMatrix waiting = waiting_pair(d);
    const auto outcomes = measure(measurement_, waiting, fresh_);
    double ps = 0.0;
    for (const auto& o : outcomes)
      if (!o.failed()) ps += o.probability;
    const double leak = std::max(0.0, 1.0 - waiting.weight() * fresh_.weight());
    if (ps <= 0.0) return {0.0, 0.5, 0.5, leak};
    const Qber q = qbers(heralded_state(outcomes, words_), code_);
    return {ps, q.ez, q.ex, leak};
  }

 private:
  FockKet fock_bell() const { return logical_bell(LogicalBellKind::PsiPlus, code_); }

  /// Loss gamma on both modes of a Fock-level pair, then optional recovery.
  DensityMatrix fock_cycle(const DensityMatrix& rho, double gamma, bool recover) const {
    const DampingChannel ch = kraus_ops(gamma, code_.fock_dim);
    DensityMatrix out = apply_loss(apply_loss(rho, 0, ch), 1, ch);
    if (encoded_ && recover) {
      const RecoveryMap rec = RecoveryMap::build(code_, gamma);
      out = correct(correct(out, 0, rec), 1, rec);
    }
    return out;
  }

  DensityMatrix fock_pair_after(const FockKet& bell, double gamma, bool recover) const {
    return fock_cycle(DensityMatrix::pure(bell), gamma, recover);
  }

  const ChiMatrix& chi(double gamma) {
    auto it = chi_cache_.find(gamma);
    if (it == chi_cache_.end()) it = chi_cache_.emplace(gamma, chi_from_superop(cycle_superop(code_, gamma))).first;
    return it->second;
  }

  DensityMatrix waiting_pair(std::size_t d) {
    if (cfg_.scheme == Scheme::SEC) {
      const double g = compose_gammas(eta_loss_, gamma_from_wait(d, tm_));
      if (fock_) return fock_pair_after(fock_bell(), g, true);
      return logical_pair(cycle_superop(code_, g));
    }
    const std::size_t m = d / interval_;
    const std::size_t rem = d % interval_;
    if (m == 0) {
      const double g = compose_gammas(eta_loss_, gamma_from_wait(rem, tm_));
      if (fock_) return fock_pair_after(fock_bell(), g, true);
      return logical_pair(chi(g).superop());
    }
    // Interval cycles in temporal order (the first one carries the interface
    // loss), then the remainder.
    const double g_interval = gamma_from_wait(interval_, tm_);
    const double g_first = compose_gammas(eta_loss_, g_interval);
    if (fock_) {
      if (fock_intervals_.empty()) fock_intervals_.push_back(fock_pair_after(fock_bell(), g_first, true));
      while (fock_intervals_.size() < m) fock_intervals_.push_back(fock_cycle(fock_intervals_.back(), g_interval, true));
      const DensityMatrix& base = fock_intervals_[m - 1];
      return rem == 0 ? base : fock_cycle(base, gamma_from_wait(rem, tm_), true);
    }
    if (chi_intervals_.empty()) chi_intervals_.push_back(chi(g_first));
    while (chi_intervals_.size() < m) chi_intervals_.push_back(concat(chi(g_interval), chi_intervals_.back()));
    ChiMatrix total = chi_intervals_[m - 1];
    if (rem > 0) total = concat(chi(gamma_from_wait(rem, tm_)), total);
    return logical_pair(total.superop());
  }

  RepeaterConfig cfg_;
  BinomialCode code_;
  TimeModel tm_;
  double eta_loss_;
  bool encoded_ = false;
  bool fock_ = false;
  std::size_t interval_ = 1;
  BellMeasurement measurement_;
  Matrix words_;
  DensityMatrix fresh_ = DensityMatrix::zero(ModeShape{1});
  std::map<double, ChiMatrix> chi_cache_;
  std::vector<ChiMatrix> chi_intervals_;
  std::vector<DensityMatrix> fock_intervals_;
};

inline RateResult run_pipeline(const RepeaterConfig& cfg) {
  cfg.validate();
  const WaitDistribution wd = wait_distribution(cfg);
  Pipeline pipe(cfg);
  const std::size_t last = wd.support_end();
  double ws = 0.0, ex = 0.0, ez = 0.0, leak = 0.0, mass = 0.0;
  for (std::size_t d = 0; d <= last; ++d) {
    const double w = wd.pmf(d);
    if (w == 0.0) continue;
    const SwapPoint pt = pipe.evaluate(d);
    ws += w * pt.ps;
    ez += w * pt.ps * pt.ez;
    ex += w * pt.ps * pt.ex;
    leak += w * pt.leakage;
    mass += w;
  }
  RateResult r;
  r.p = wd.p;
  r.mean_n_max = wd.mean_n_max;
  r.d_max = wd.d_max;
  r.avg_ps = std::clamp(ws, 0.0, 1.0);
  r.avg_ez = ws > 0.0 ? ez / ws : 0.5;
  r.avg_ex = ws > 0.0 ? ex / ws : 0.5;
  r.leakage = mass > 0.0 ? leak / mass : 0.0;
  r.raw_rate_hz = r.avg_ps / (wd.mean_n_max * cfg.T0());
  r.skf = skf(r.avg_ex, r.avg_ez);
  r.skr_hz = r.skf > 0.0 ? r.skf * r.raw_rate_hz : 0.0;
  return r;
}

}  // namespace detail

inline RateResult run_sec(RepeaterConfig cfg) {
  cfg.scheme = Scheme::SEC;
  return detail::run_pipeline(cfg);
}

inline RateResult run_mec(RepeaterConfig cfg) {
  cfg.scheme = Scheme::MEC;
  if (cfg.code == CodeKind::Unencoded) throw UnsupportedCode("multiple error correction needs an encoded memory");
  return detail::run_pipeline(cfg);
}

inline RateResult run(const RepeaterConfig& cfg) {
  return cfg.scheme == Scheme::SEC ? run_sec(cfg) : run_mec(cfg);
}

}  // namespace repsim
