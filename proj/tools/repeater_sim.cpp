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

// Command-line driver: `repeater-sim run` evaluates a parameter sweep and
// writes CSV; `repeater-sim selftest` runs the built-in invariant checks.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "repsim/selftest.hpp"
#include "repsim/sweep.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw repsim::Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_command(const std::string& config_path, std::string output, const std::optional<std::string>& scheme,
                const std::optional<std::string>& code, const std::optional<std::string>& bsm,
                const std::optional<double>& l0) {
  const std::string text = read_file(config_path);
  repsim::SweepSpec spec = repsim::parse_config(text);
  if (scheme) spec.schemes = {repsim::parse_scheme(*scheme)};
  if (code) spec.codes = {repsim::parse_code_kind(*code)};
  if (bsm) spec.bsms = {repsim::parse_bsm(*bsm)};
  if (l0) {
    if (!(*l0 > 0.0)) throw repsim::Error("--l0 must be positive");
    spec.L0_km = {*l0};
  }
  if (output.empty()) output = spec.output;
  if (output.empty()) throw repsim::Error("no output path (use --output or the 'output' key)");

  // Overrides change the effective sweep, so they take part in the hash.
  std::string hashed = text;
  for (const auto& [flag, val] : {std::pair{"scheme", scheme}, std::pair{"code", code}, std::pair{"bsm", bsm}})
    if (val) hashed += "\n#override " + std::string(flag) + "=" + *val;
  if (l0) hashed += "\n#override l0=" + repsim::format_double(*l0);

  const auto rows = repsim::run_sweep(spec);
  std::ofstream out(output, std::ios::binary);
  if (!out) throw repsim::Error("cannot write '" + output + "'");
  out << repsim::emit_csv(rows, hashed);
  if (!out) throw repsim::Error("failed writing '" + output + "'");

  std::size_t failed = 0;
  for (const auto& r : rows)
    if (!r.ok()) {
      ++failed;
      std::cerr << "point L0=" << r.L0_km << " code=" << r.code << " scheme=" << r.scheme << " bsm=" << r.bsm
                << ": " << r.status << '\n';
    }
  std::cout << rows.size() << " points written to " << output;
  if (failed) std::cout << " (" << failed << " failed)";
  std::cout << '\n';
  return failed == 0 ? 0 : 1;
}

int selftest_command() {
  bool all = true;
  for (const auto& r : repsim::run_selftest()) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
    all = all && r.passed;
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Secret key rates of a two-segment repeater with bosonic code memories"};
  app.set_version_flag("--version", std::string(repsim::kVersion));
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Evaluate a parameter sweep and write CSV");
  std::string config_path, output;
  std::optional<std::string> scheme, code, bsm;
  std::optional<double> l0;
  run->add_option("--config", config_path, "Sweep configuration file")->required()->check(CLI::ExistingFile);
  run->add_option("--output", output, "CSV output path");
  run->add_option("--scheme", scheme, "Override scheme")->check(CLI::IsMember({"sec", "mec"}));
  run->add_option("--code", code, "Override code")->check(CLI::IsMember({"none", "lbc", "hbc"}));
  run->add_option("--bsm", bsm, "Override Bell measurement")->check(CLI::IsMember({"ideal", "optics", "cqed"}));
  run->add_option("--l0", l0, "Override segment length (km)");

  app.add_subcommand("selftest", "Run the built-in invariant checks");

  CLI11_PARSE(app, argc, argv);
  try {
    if (run->parsed()) return run_command(config_path, output, scheme, code, bsm, l0);
    return selftest_command();
  } catch (const repsim::ParseError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
