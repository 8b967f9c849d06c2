// Copyright 2026 The vetomech Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end. run() is kept in a header so tests can drive it
// with in-memory streams.
//
// Exit codes: 0 success, 1 reproduction mismatch, 2 invalid input,
// 3 numerical failure.

#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vetomech/analysis.hpp"
#include "vetomech/closedform.hpp"
#include "vetomech/io.hpp"
#include "vetomech/oracle.hpp"
#include "vetomech/reproduce.hpp"

namespace vetomech {

inline constexpr int kExitOk = 0;
inline constexpr int kExitMismatch = 1;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitNumerical = 3;

namespace cli {

struct Options {
  std::string spec;
  std::string out;
  std::string format;
  std::optional<double> tol;
  // oracle
  std::size_t n_states = OracleConfig{}.n_states;
  std::size_t n_actions = OracleConfig{}.n_actions;
  std::size_t n_vhat = OracleConfig{}.n_vhat;
  bool rows = false;
  // solve
  std::string curve;
  std::size_t curve_points = 101;
  // sweep
  std::string param;
  std::vector<double> grid;
  // simulate
  std::size_t n_draws = 100000;
  std::uint64_t seed = 1;
  // reproduce
  std::string reproduce_case;
  std::string manifest = VETOMECH_MANIFEST_PATH;
};

// --spec accepts a path, "-" for stdin, or inline JSON.
inline json load_input(const std::string& spec, std::istream& in) {
  if (spec == "-") {
    const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    return parse_json(text, "stdin");
  }
  const auto first = spec.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && spec[first] == '{') return parse_json(spec, "--spec");
  return parse_json(read_text(spec), spec);
}

inline SolverConfig solver_config(const Options& o) {
  SolverConfig cfg;
  if (o.tol) {
    require(*o.tol > 0.0, "--tol must be positive");
    cfg.quadrature.abs_tol = *o.tol;
    cfg.root.abs_tol = *o.tol;
  }
  return cfg;
}

// Flat key,value CSV for single-record results.
inline void write_flat_csv(std::ostream& os, const json& j, const std::string& prefix = "") {
  if (prefix.empty()) os << "key,value\n";
  for (const auto& [key, value] : j.items()) {
    const std::string name = prefix.empty() ? key : prefix + "." + key;
    if (value.is_object()) {
      write_flat_csv(os, value, name);
    } else if (value.is_number_float()) {
      os << name << ',' << format_number(value.get<double>()) << '\n';
    } else if (value.is_string()) {
      os << name << ',' << value.get<std::string>() << '\n';
    } else if (!value.is_array()) {
      os << name << ',' << value.dump() << '\n';
    }
  }
}

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : path_(path), fallback_(fallback) {}

  std::ostream& stream() { return path_.empty() ? fallback_ : buffer_; }

  void commit() {
    if (path_.empty()) return;
    std::ofstream file(path_);
    if (!file) fail(ErrorKind::kInvalidInput, "cannot open " + path_ + " for writing");
    file << buffer_.str();
    if (!file) fail(ErrorKind::kInvalidInput, "failed writing " + path_);
  }

 private:
  std::string path_;
  std::ostream& fallback_;
  std::ostringstream buffer_;
};

inline void emit(const json& j, const std::string& format, Output& out) {
  if (format == "csv") write_flat_csv(out.stream(), j);
  else out.stream() << j.dump(2) << '\n';
}

inline int cmd_solve(const Options& o, std::istream& in, Output& out) {
  const ProblemSpec spec = spec_from_json(load_input(o.spec, in));
  const SolveReport r = solve(spec, solver_config(o));
  emit(to_json(r), o.format.empty() ? "json" : o.format, out);
  if (!o.curve.empty()) emit_mechanism_curve(r.mechanism, o.curve_points, o.curve);
  return kExitOk;
}

inline int cmd_oracle(const Options& o, std::istream& in, Output& out) {
  const ProblemSpec spec = spec_from_json(load_input(o.spec, in));
  OracleConfig cfg;
  cfg.n_states = o.n_states;
  cfg.n_actions = o.n_actions;
  cfg.n_vhat = o.n_vhat;
  const OracleResult r = oracle_continuous(spec, cfg);
  emit(to_json(r, o.rows), o.format.empty() ? "json" : o.format, out);
  return kExitOk;
}

inline int cmd_finite(const Options& o, std::istream& in, Output& out) {
  const FiniteInstance inst = finite_from_json(load_input(o.spec, in));
  const OracleResult r = oracle_finite(inst);
  emit(to_json(r, true), o.format.empty() ? "json" : o.format, out);
  return kExitOk;
}

inline int cmd_sweep(const Options& o, std::istream& in, Output& out) {
  const ProblemSpec spec = spec_from_json(load_input(o.spec, in));
  require(o.param == "v0" || o.param == "u0", "--param must be v0 or u0");
  const SweepResult s = o.param == "v0" ? sweep_v0(spec, o.grid, solver_config(o))
                                        : sweep_u0(spec, o.grid, solver_config(o));
  if (o.format == "json") out.stream() << to_json(s).dump(2) << '\n';
  else write_sweep_csv(out.stream(), s);
  return kExitOk;
}

inline int cmd_simulate(const Options& o, std::istream& in, Output& out) {
  const ProblemSpec spec = spec_from_json(load_input(o.spec, in));
  const SolveReport r = solve(spec, solver_config(o));
  const SimulationReport sim = simulate(r.mechanism, spec, o.n_draws, o.seed);
  if (o.format == "json") {
    out.stream() << to_json(sim).dump(2) << '\n';
  } else {
    const SimulationReport one[] = {sim};
    write_simulation_csv(out.stream(), one);
  }
  return kExitOk;
}

inline int cmd_reproduce(const Options& o, Output& out) {
  const ReproduceResult r = reproduce(o.reproduce_case, load_manifest(o.manifest));
  if (o.format == "json") out.stream() << to_json(r).dump(2) << '\n';
  else write_reproduce_csv(out.stream(), r);
  return r.pass() ? kExitOk : kExitMismatch;
}

}  // namespace cli

/// Runs one command. args excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout,
               std::ostream& err = std::cerr, std::istream& in = std::cin) {
  CLI::App app{"Optimal stochastic veto mechanisms: solver, oracles, sweeps, simulation", "vetomech"};
  app.require_subcommand(1, 1);
  cli::Options o;

  const auto formats = CLI::IsMember({"json", "csv"});
  auto add_io = [&](CLI::App* sub, bool needs_spec) {
    if (needs_spec) sub->add_option("--spec", o.spec, "Input JSON: a path, - for stdin, or inline JSON")->required();
    sub->add_option("--out", o.out, "Write output to this path instead of stdout");
    sub->add_option("--format", o.format, "Output format")->check(formats);
  };
  auto add_tol = [&](CLI::App* sub) {
    sub->add_option("--tol", o.tol, "Absolute tolerance for quadrature and root finding");
  };

  CLI::App* solve_cmd = app.add_subcommand("solve", "Closed-form optimal mechanism (JSON by default)");
  add_io(solve_cmd, true);
  add_tol(solve_cmd);
  solve_cmd->add_option("--curve", o.curve, "Also write the theta,a_tilde,p_tilde curve CSV here");
  solve_cmd->add_option("--curve-points", o.curve_points, "Uniform points in the curve CSV")
      ->check(CLI::Range(std::size_t{2}, std::size_t{10000000}));

  CLI::App* oracle_cmd = app.add_subcommand("oracle", "Discretized brute-force solver");
  add_io(oracle_cmd, true);
  oracle_cmd->add_option("--n-states", o.n_states, "State grid size");
  oracle_cmd->add_option("--n-actions", o.n_actions, "Action grid size");
  oracle_cmd->add_option("--n-vhat", o.n_vhat, "Agent-utility grid size");
  oracle_cmd->add_flag("--rows", o.rows, "Include the per-state lotteries");

  CLI::App* finite_cmd = app.add_subcommand("finite", "Exact solver for a finite instance");
  add_io(finite_cmd, true);

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Comparative statics in v0 or u0 (CSV by default)");
  add_io(sweep_cmd, true);
  add_tol(sweep_cmd);
  sweep_cmd->add_option("--param", o.param, "Parameter to vary")->required()->check(CLI::IsMember({"v0", "u0"}));
  sweep_cmd->add_option("--grid", o.grid, "Comma-separated, strictly increasing values")
      ->required()
      ->delimiter(',');

  CLI::App* sim_cmd = app.add_subcommand("simulate", "Monte Carlo check of the solved mechanism (CSV by default)");
  add_io(sim_cmd, true);
  add_tol(sim_cmd);
  sim_cmd->add_option("--n", o.n_draws, "Number of draws")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--seed", o.seed, "RNG seed");

  CLI::App* repro_cmd = app.add_subcommand("reproduce", "Compare a reference case against the manifest");
  repro_cmd->add_option("case", o.reproduce_case, "Case name")
      ->required()
      ->check(CLI::IsMember(reproduce_cases()));
  repro_cmd->add_option("--manifest", o.manifest, "Manifest path");
  add_io(repro_cmd, false);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    cli::Output output(o.out, out);
    int code = kExitOk;
    if (*solve_cmd) code = cli::cmd_solve(o, in, output);
    else if (*oracle_cmd) code = cli::cmd_oracle(o, in, output);
    else if (*finite_cmd) code = cli::cmd_finite(o, in, output);
    else if (*sweep_cmd) code = cli::cmd_sweep(o, in, output);
    else if (*sim_cmd) code = cli::cmd_simulate(o, in, output);
    else code = cli::cmd_reproduce(o, output);
    output.commit();
    return code;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.is_numerical() ? kExitNumerical : kExitInvalid;
  } catch (const json::exception& e) {
    err << "error: malformed input: " << e.what() << '\n';
    return kExitInvalid;
  }
}

inline int run(int argc, const char* const* argv) {
  return run(std::vector<std::string>(argv + 1, argv + argc));
}

}  // namespace vetomech
