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
 * Parameter sweeps: config parsing, concurrent evaluation and CSV I/O.
 *
 * Config files are flat `key = value` / `key = [v1, v2]` text with `#`
 * comments. Grids default to a single SEC/LBC/ideal point at
 * tau_coh = 1 s and eta_m = 0.95 over L0 = 10..200 km.
 */
#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "repsim/errors.hpp"
#include "repsim/rates.hpp"

namespace repsim {

inline constexpr std::string_view kVersion = "1.0.0";

struct SweepSpec {
  std::vector<double> L0_km;
  std::vector<CodeKind> codes{CodeKind::LBC};
  std::vector<Scheme> schemes{Scheme::SEC};
  std::vector<BsmKind> bsms{BsmKind::Ideal};
  std::vector<double> tau_coh_s{1.0};
  std::vector<double> eta_m{0.95};
  RepeaterConfig base;  // scalar parameters shared by every point
  std::string output;

  SweepSpec() {
    for (int l = 10; l <= 200; l += 10) L0_km.push_back(l);
  }

  std::size_t points() const {
    return L0_km.size() * codes.size() * schemes.size() * bsms.size() * eta_m.size() * tau_coh_s.size();
  }

  /// Grid points in output order: L0, code, scheme, bsm, eta_m, tau_coh.
  std::vector<RepeaterConfig> expand() const {
    std::vector<RepeaterConfig> out;
    out.reserve(points());
    for (double l : L0_km)
      for (CodeKind c : codes)
        for (Scheme s : schemes)
          for (BsmKind b : bsms)
            for (double e : eta_m)
              for (double t : tau_coh_s) {
                RepeaterConfig cfg = base;
                cfg.L0_km = l;
                cfg.code = c;
                cfg.scheme = s;
                cfg.bsm = b;
                cfg.eta_m = e;
                cfg.tau_coh_s = t;
                out.push_back(cfg);
              }
    return out;
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_number(std::string_view s, std::size_t line) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    throw ParseError(line, "malformed number '" + std::string(s) + "'");
  return v;
}

inline std::vector<std::string_view> parse_list(std::string_view value, std::size_t line) {
  value = trim(value);
  std::vector<std::string_view> items;
  if (value.empty()) throw ParseError(line, "missing value");
  if (value.front() != '[') {
    items.push_back(value);
    return items;
  }
  if (value.back() != ']') throw ParseError(line, "unterminated list");
  value = trim(value.substr(1, value.size() - 2));
  if (value.empty()) throw ParseError(line, "empty grid");
  while (true) {
    const auto comma = value.find(',');
    const auto item = trim(value.substr(0, comma));
    if (item.empty()) throw ParseError(line, "empty list element");
    items.push_back(item);
    if (comma == std::string_view::npos) break;
    value.remove_prefix(comma + 1);
  }
  return items;
}

template <class F>
auto map_items(const std::vector<std::string_view>& items, std::size_t line, F f) {
  std::vector<decltype(f(items.front()))> out;
  for (auto it : items) {
    try {
      out.push_back(f(it));
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError(line, e.what());
    }
  }
  return out;
}

inline double scalar(const std::vector<std::string_view>& items, std::size_t line) {
  if (items.size() != 1) throw ParseError(line, "expected a single value");
  return parse_number(items.front(), line);
}

}  // namespace detail

inline SweepSpec parse_config(std::string_view text) {
  SweepSpec spec;
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected 'key = value'");
    const std::string key(detail::trim(line.substr(0, eq)));
    if (!seen.insert(key).second) throw ParseError(line_no, "duplicate key '" + key + "'");
    const auto items = detail::parse_list(line.substr(eq + 1), line_no);
    const auto num = [&](std::string_view s) { return detail::parse_number(s, line_no); };
    const auto positive = [&](const std::vector<double>& v, const char* what) {
      for (double x : v)
        if (!(x > 0.0)) throw ParseError(line_no, std::string(what) + " values must be positive");
      return v;
    };

    if (key == "L0") {
      spec.L0_km = positive(detail::map_items(items, line_no, num), "L0");
    } else if (key == "codes" || key == "code") {
      spec.codes = detail::map_items(items, line_no, [](std::string_view s) { return parse_code_kind(s); });
    } else if (key == "schemes" || key == "scheme") {
      spec.schemes = detail::map_items(items, line_no, [](std::string_view s) { return parse_scheme(s); });
    } else if (key == "bsm") {
      spec.bsms = detail::map_items(items, line_no, [](std::string_view s) { return parse_bsm(s); });
    } else if (key == "tau_coh") {
      spec.tau_coh_s = positive(detail::map_items(items, line_no, num), "tau_coh");
    } else if (key == "eta_m") {
      spec.eta_m = detail::map_items(items, line_no, num);
      for (double e : spec.eta_m)
        if (!(e > 0.0 && e <= 1.0)) throw ParseError(line_no, "eta_m values must lie in (0, 1]");
    } else if (key == "L_att") {
      spec.base.L_att_km = positive({detail::scalar(items, line_no)}, "L_att").front();
    } else if (key == "c") {
      spec.base.c_m_per_s = positive({detail::scalar(items, line_no)}, "c").front();
    } else if (key == "p_link") {
      spec.base.p_link = detail::scalar(items, line_no);
      if (!(spec.base.p_link > 0.0 && spec.base.p_link <= 1.0)) throw ParseError(line_no, "p_link must lie in (0, 1]");
    } else if (key == "mec_gamma_interval") {
      spec.base.mec_gamma_interval = detail::scalar(items, line_no);
    } else if (key == "mec_max_recoveries") {
      const double v = detail::scalar(items, line_no);
      if (!(v >= 1.0) || v != std::floor(v)) throw ParseError(line_no, "mec_max_recoveries must be a positive integer");
      spec.base.mec_max_recoveries = static_cast<std::size_t>(v);
    } else if (key == "sec_gamma_cutoff") {
      spec.base.sec_gamma_cutoff = detail::scalar(items, line_no);
    } else if (key == "engine") {
      if (items.size() != 1) throw ParseError(line_no, "expected a single value");
      if (items[0] == "logical") spec.base.engine = Engine::Logical;
      else if (items[0] == "fock") spec.base.engine = Engine::Fock;
      else throw ParseError(line_no, "engine must be 'logical' or 'fock'");
    } else if (key == "recovery_scope") {
      if (items.size() != 1) throw ParseError(line_no, "expected a single value");
      if (items[0] == "all") spec.base.recovery_scope = RecoveryScope::AllPairs;
      else if (items[0] == "waiting") spec.base.recovery_scope = RecoveryScope::WaitingPairOnly;
      else throw ParseError(line_no, "recovery_scope must be 'all' or 'waiting'");
    } else if (key == "output") {
      if (items.size() != 1) throw ParseError(line_no, "expected a single path");
      spec.output = std::string(items[0]);
    } else {
      throw ParseError(line_no, "unknown key '" + key + "'");
    }
  }
  try {
    RepeaterConfig probe = spec.base;
    probe.validate();
  } catch (const std::exception& e) {
    throw ParseError(line_no, e.what());
  }
  return spec;
}

struct CsvRow {
  double L0_km = 0.0;
  std::string code;
  std::string scheme;
  std::string bsm;
  double eta_m = 0.0;
  double tau_coh_s = 0.0;
  double p_link = 0.0;
  std::size_t d_max = 0;
  double raw_rate_hz = 0.0;
  double skf = 0.0;
  double skr_hz = 0.0;
  double avg_ex = 0.0;
  double avg_ez = 0.0;
  double avg_ps = 0.0;
  double leakage = 0.0;
  std::string status = "ok";

  bool ok() const { return status == "ok"; }
  bool operator==(const CsvRow&) const = default;
};

inline constexpr std::string_view kCsvHeader =
    "L0_km,code,scheme,bsm,eta_m,tau_coh_s,p_link,d_max,raw_rate_hz,skf,skr_hz,avg_ex,avg_ez,avg_ps,leakage,status";

inline CsvRow evaluate_point(const RepeaterConfig& cfg) {
  CsvRow row;
  row.L0_km = cfg.L0_km;
  row.code = std::string(to_string(cfg.code));
  row.scheme = std::string(to_string(cfg.scheme));
  row.bsm = std::string(to_string(cfg.bsm));
  row.eta_m = cfg.eta_m;
  row.tau_coh_s = cfg.tau_coh_s;
  row.p_link = cfg.p_link;
  try {
    const RateResult r = run(cfg);
    row.d_max = r.d_max;
    row.raw_rate_hz = r.raw_rate_hz;
    row.skf = r.skf;
    row.skr_hz = r.skr_hz;
    row.avg_ex = r.avg_ex;
    row.avg_ez = r.avg_ez;
    row.avg_ps = r.avg_ps;
    row.leakage = r.leakage;
  } catch (const std::exception& e) {
    std::string msg = e.what();
    std::replace_if(msg.begin(), msg.end(), [](char ch) { return ch == ',' || ch == '\n' || ch == '\r'; }, ';');
    row.status = "error: " + msg;
  }
  return row;
}

/// Worker count: REPEATER_SIM_THREADS if set, else the hardware count.
inline std::size_t worker_count(std::size_t jobs) {
  std::size_t n = std::max(1U, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("REPEATER_SIM_THREADS")) {
    std::size_t cap = 0;
    const std::string_view s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), cap);
    if (ec == std::errc() && ptr == s.data() + s.size() && cap > 0) n = std::min(n, cap);
  }
  return std::max<std::size_t>(1, std::min(n, jobs));
}

/// Evaluates every grid point; rows come back in grid order regardless of
/// the number of workers.
inline std::vector<CsvRow> run_sweep(const SweepSpec& spec, std::size_t workers = 0) {
  const auto grid = spec.expand();
  std::vector<CsvRow> rows(grid.size());
  if (workers == 0) workers = worker_count(grid.size());
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) rows[i] = evaluate_point(grid[i]);
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  return rows;
}

/// 64-bit FNV-1a.
inline std::uint64_t config_hash(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string emit_rows(const std::vector<CsvRow>& rows) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : rows) {
    const std::string fields[] = {format_double(r.L0_km), r.code, r.scheme, r.bsm, format_double(r.eta_m),
                                  format_double(r.tau_coh_s), format_double(r.p_link), std::to_string(r.d_max),
                                  format_double(r.raw_rate_hz), format_double(r.skf), format_double(r.skr_hz),
                                  format_double(r.avg_ex), format_double(r.avg_ez), format_double(r.avg_ps),
                                  format_double(r.leakage), r.status};
    for (std::size_t i = 0; i < std::size(fields); ++i) {
      if (i) out += ',';
      out += fields[i];
    }
    out += '\n';
  }
  return out;
}

/// Full CSV document with the provenance comment line.
inline std::string emit_csv(const std::vector<CsvRow>& rows, std::string_view config_text,
                            const std::string& timestamp = utc_timestamp()) {
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash(config_text)));
  std::string out = "# repeater-sim " + std::string(kVersion) + " config_hash=" + hash + " timestamp=" + timestamp + "\n";
  return out + emit_rows(rows);
}

inline std::vector<CsvRow> parse_csv(std::string_view text) {
  std::vector<CsvRow> rows;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (!header) {
      if (line != kCsvHeader) throw ParseError(line_no, "unexpected CSV header");
      header = true;
      continue;
    }
    std::vector<std::string_view> f;
    std::string_view rest = line;
    while (true) {
      const auto comma = rest.find(',');
      f.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (f.size() != 16) throw ParseError(line_no, "expected 16 columns");
    const auto num = [&](std::size_t i) { return detail::parse_number(f[i], line_no); };
    CsvRow r;
    r.L0_km = num(0);
    r.code = std::string(f[1]);
    r.scheme = std::string(f[2]);
    r.bsm = std::string(f[3]);
    r.eta_m = num(4);
    r.tau_coh_s = num(5);
    r.p_link = num(6);
    const auto dm = f[7];
    const auto [ptr, ec] = std::from_chars(dm.data(), dm.data() + dm.size(), r.d_max);
    if (ec != std::errc() || ptr != dm.data() + dm.size()) throw ParseError(line_no, "malformed d_max");
    r.raw_rate_hz = num(8);
    r.skf = num(9);
    r.skr_hz = num(10);
    r.avg_ex = num(11);
    r.avg_ez = num(12);
    r.avg_ps = num(13);
    r.leakage = num(14);
    r.status = std::string(f[15]);
    rows.push_back(std::move(r));
  }
  if (!header) throw ParseError(line_no, "missing CSV header");
  return rows;
}

}  // namespace repsim
