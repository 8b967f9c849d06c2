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

// JSON and CSV formats.
//
// Problem specs and finite instances are written with full round-trip
// precision so that parse(serialize(x)) == x. Computed results are rounded
// to 12 significant digits so golden files do not depend on the last bits of
// a platform's libm.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vetomech/analysis.hpp"
#include "vetomech/error.hpp"
#include "vetomech/mechanism.hpp"
#include "vetomech/model.hpp"
#include "vetomech/oracle.hpp"

namespace vetomech {

using nlohmann::json;

/// x rounded to 12 significant digits.
inline double round12(double x) {
  if (!std::isfinite(x) || x == 0.0) return x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

// ---------------------------------------------------------------------------
// Problem specs

inline json prior_to_json(const Prior& prior) {
  return std::visit(
      [](const auto& f) -> json {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, UniformDensity>) {
          return {{"type", "uniform"}};
        } else if constexpr (std::is_same_v<T, PowerDensity>) {
          return {{"type", "power"}, {"exponent", f.exponent}};
        } else if constexpr (std::is_same_v<T, PiecewiseLinearDensity>) {
          json points = json::array();
          for (const auto& k : f.knots) points.push_back({k.theta, k.density});
          return {{"type", "piecewise_linear"}, {"points", points}};
        } else {
          return {{"type", "table"}, {"grid", f.grid}, {"values", f.values}};
        }
      },
      prior.form());
}

namespace detail {

// Field access that reports the offending key instead of a library message.
inline const json& field(const json& j, const char* key, const std::string& where) {
  require(j.is_object(), where + " must be a JSON object");
  const auto it = j.find(key);
  require(it != j.end(), where + " is missing \"" + key + "\"");
  return *it;
}

inline double number(const json& j, const std::string& what) {
  require(j.is_number(), what + " must be a number");
  return j.get<double>();
}

inline std::vector<double> number_array(const json& j, const std::string& what) {
  require(j.is_array(), what + " must be an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& x : j) out.push_back(number(x, what + " entry"));
  return out;
}

}  // namespace detail

inline Prior prior_from_json(const json& j) {
  const json& type = detail::field(j, "type", "prior");
  require(type.is_string(), "prior.type must be a string");
  const std::string t = type.get<std::string>();
  if (t == "uniform") return Prior::uniform();
  if (t == "power") return Prior::power(detail::number(detail::field(j, "exponent", "prior"), "prior.exponent"));
  if (t == "piecewise_linear") {
    const json& pts = detail::field(j, "points", "prior");
    require(pts.is_array(), "prior.points must be an array of [theta, density] pairs");
    std::vector<DensityKnot> knots;
    for (const auto& p : pts) {
      require(p.is_array() && p.size() == 2, "prior.points entries must be [theta, density] pairs");
      knots.push_back({detail::number(p[0], "prior.points theta"), detail::number(p[1], "prior.points density")});
    }
    return Prior::piecewise_linear(std::move(knots));
  }
  if (t == "table") {
    return Prior::tabulated(detail::number_array(detail::field(j, "grid", "prior"), "prior.grid"),
                            detail::number_array(detail::field(j, "values", "prior"), "prior.values"));
  }
  fail(ErrorKind::kInvalidInput,
       "prior.type \"" + t + "\" is not one of uniform, power, piecewise_linear, table");
}

inline json to_json(const ProblemSpec& spec) {
  return {{"u0", spec.u0}, {"v0", spec.v0}, {"M", spec.M}, {"prior", prior_to_json(spec.prior)}};
}

inline ProblemSpec spec_from_json(const json& j) {
  require(j.is_object(), "problem spec must be a JSON object");
  ProblemSpec spec;
  spec.u0 = detail::number(detail::field(j, "u0", "problem spec"), "u0");
  spec.v0 = detail::number(detail::field(j, "v0", "problem spec"), "v0");
  if (j.contains("M")) spec.M = detail::number(j.at("M"), "M");
  if (j.contains("prior")) spec.prior = prior_from_json(j.at("prior"));
  spec.validate();
  return spec;
}

inline json to_json(const FiniteInstance& inst) {
  return {{"state_probs", inst.state_probs},
          {"agent_payoffs", inst.agent_payoffs},
          {"principal_payoffs", inst.principal_payoffs},
          {"a0_index", inst.a0_index}};
}

inline FiniteInstance finite_from_json(const json& j) {
  FiniteInstance inst;
  inst.state_probs = detail::number_array(detail::field(j, "state_probs", "finite instance"), "state_probs");
  inst.agent_payoffs =
      detail::number_array(detail::field(j, "agent_payoffs", "finite instance"), "agent_payoffs");
  const json& rows = detail::field(j, "principal_payoffs", "finite instance");
  require(rows.is_array(), "principal_payoffs must be an array of rows");
  for (const auto& row : rows) inst.principal_payoffs.push_back(detail::number_array(row, "principal_payoffs row"));
  if (j.contains("a0_index")) {
    const json& a0 = j.at("a0_index");
    require(a0.is_number_unsigned(), "a0_index must be a non-negative integer");
    inst.a0_index = a0.get<std::size_t>();
  }
  inst.validate();
  return inst;
}

/// Parses JSON text, turning syntax errors into InvalidInput.
inline json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::kInvalidInput, source + ": " + e.what());
  }
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kInvalidInput, "cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// ---------------------------------------------------------------------------
// Results

inline json to_json(const VetoMechanism& mech) {
  json j = std::visit(
      [](const auto& m) -> json {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, TrivialPool>) {
          return {{"action", round12(m.action)}};
        } else if constexpr (std::is_same_v<T, PoolThenSeparate> || std::is_same_v<T, SeparateThenPool>) {
          return {{"pool_action", round12(m.pool_action)}, {"threshold", round12(m.threshold)}};
        } else if constexpr (std::is_same_v<T, UShaped>) {
          return {{"v_hat", round12(m.v_hat)}, {"lower", round12(m.lower)}, {"upper", round12(m.upper)}};
        } else if constexpr (std::is_same_v<T, DeterministicPool>) {
          return {{"lower", round12(m.lower)}, {"upper", round12(m.upper)}};
        } else {
          return json::object();
        }
      },
      mech.form());
  j["kind"] = std::string(mech.kind_name());
  j["v0"] = round12(mech.status_quo_agent_payoff());
  return j;
}

inline json optional_number(const std::optional<double>& x) {
  return x ? json(round12(*x)) : json(nullptr);
}

inline json to_json(const SolveReport& r) {
  return {{"case", std::string(to_string(r.case_label))},
          {"mechanism", to_json(r.mechanism)},
          {"v_hat", round12(r.v_hat)},
          {"principal_value", round12(r.principal_value)},
          {"pool_action", optional_number(r.pool_action)},
          {"lower_threshold", optional_number(r.lower_threshold)},
          {"upper_threshold", optional_number(r.upper_threshold)},
          {"threshold", optional_number(r.threshold())},
          {"diagnostics",
           {{"foc_residual", round12(r.diagnostics.foc_residual)},
            {"quadrature_evaluations", r.diagnostics.quadrature_evaluations},
            {"u0_plus_v0_sq", round12(r.diagnostics.u0_plus_v0_sq)},
            {"u0_plus_one_minus_v0_sq", round12(r.diagnostics.u0_plus_one_minus_v0_sq)}}}};
}

/// Oracle summary; per-state rows are included when include_rows is set
/// (they are large for the continuous oracle).
inline json to_json(const OracleResult& r, bool include_rows) {
  json j = {{"value", round12(r.value)},
            {"v_hat", round12(r.v_hat)},
            {"veto_structure", verify_veto_structure(r.mechanism, r.mechanism.a0_index)},
            {"unrestricted_beats_anchor", r.unrestricted_beats_anchor},
            {"max_unrestricted_gain", round12(r.max_unrestricted_gain)},
            {"vhat_candidates", r.vhat_candidates},
            {"skipped_vhat", r.skipped_vhat}};
  if (include_rows) {
    json rows = json::array();
    for (const auto& row : r.mechanism.rows) {
      json out = json::array();
      for (double x : row) out.push_back(round12(x));
      rows.push_back(out);
    }
    j["mechanism"] = {{"state_grid", r.mechanism.state_grid},
                      {"action_values", r.mechanism.action_values},
                      {"a0_index", r.mechanism.a0_index},
                      {"rows", rows}};
  }
  return j;
}

inline json to_json(const SweepResult& s) {
  json points = json::array();
  for (const auto& p : s.points) {
    points.push_back({{"param", round12(p.param)},
                      {"abar", round12(p.abar)},
                      {"thetabar", round12(p.thetabar)},
                      {"p_at_1", round12(p.p_at_1)},
                      {"value", round12(p.value)},
                      {"case", std::string(to_string(p.case_label))}});
  }
  return {{"parameter", s.parameter},
          {"points", points},
          {"abar_monotone", s.abar_monotone},
          {"thetabar_monotone", s.thetabar_monotone},
          {"pointwise_monotone", s.pointwise_monotone}};
}

inline json to_json(const SimulationReport& r) {
  return {{"seed", r.seed},
          {"n", r.n_draws},
          {"value_hat", round12(r.value_hat)},
          {"se", round12(r.se)},
          {"agent_value_hat", round12(r.agent_value_hat)},
          {"ic_gain", round12(r.ic_gain)}};
}

// ---------------------------------------------------------------------------
// Mechanism curves

/// CSV of the proposal on n_points uniform states plus the mechanism's
/// switch points.
inline void write_mechanism_curve(std::ostream& os, const VetoMechanism& mech, std::size_t n_points) {
  require(n_points >= 2, "mechanism curve needs n_points >= 2");
  std::vector<double> thetas = linspace(0.0, 1.0, n_points);
  for (double b : mech.breakpoints()) thetas.push_back(b);
  std::sort(thetas.begin(), thetas.end());
  thetas.erase(std::unique(thetas.begin(), thetas.end()), thetas.end());
  os << "theta,a_tilde,p_tilde\n";
  for (double t : thetas) {
    const Proposal p = mech.evaluate(t);
    os << format_number(t) << ',' << format_number(p.action) << ',' << format_number(p.veto_prob) << '\n';
  }
}

inline void emit_mechanism_curve(const VetoMechanism& mech, std::size_t n_points, const std::string& path) {
  std::ostringstream buffer;
  write_mechanism_curve(buffer, mech, n_points);
  std::ofstream out(path);
  if (!out) fail(ErrorKind::kInvalidInput, "cannot open " + path + " for writing");
  out << buffer.str();
  if (!out) fail(ErrorKind::kInvalidInput, "failed writing " + path);
}

}  // namespace vetomech
