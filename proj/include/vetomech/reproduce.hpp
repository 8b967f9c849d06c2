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

// Reference cases. Each case computes a handful of named quantities; the
// manifest (data/reproduce_manifest.json) supplies the reference value and
// tolerance for each one.

#pragma once

#include <cmath>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "vetomech/analysis.hpp"
#include "vetomech/closedform.hpp"
#include "vetomech/io.hpp"
#include "vetomech/oracle.hpp"

#ifndef VETOMECH_MANIFEST_PATH
#define VETOMECH_MANIFEST_PATH "data/reproduce_manifest.json"
#endif

namespace vetomech {

inline const std::vector<std::string>& reproduce_cases() {
  static const std::vector<std::string> kCases = {"motivating",    "ushape",      "deterministic",   "v0-sweep",
                                                  "kinked-priors", "power-prior", "pooling-boundary"};
  return kCases;
}

/// Two equally likely states, actions (a0, a1, a2) worth 0, 1, 2 to the
/// agent; each new action pays the principal 1 in its own state and -3 in
/// the other, the status quo pays 0.
inline FiniteInstance motivating_instance() {
  return {{0.5, 0.5}, {0.0, 1.0, 2.0}, {{0.0, 1.0, -3.0}, {0.0, -3.0, 1.0}}, 0};
}

inline Prior kinked_prior_high() {
  return Prior::piecewise_linear({{0.0, 1.0 / 3.0}, {0.9, 1.0 / 3.0}, {0.9, 0.0}, {1.0, 14.0}});
}

inline Prior kinked_prior_low() {
  return Prior::piecewise_linear({{0.0, 1.0 / 3.0}, {0.9, 1.0 / 3.0}, {0.9, 14.0}, {1.0, 0.0}});
}

/// Named quantities for one case.
inline std::map<std::string, double> compute_case(const std::string& name) {
  std::map<std::string, double> out;
  const auto flag = [](bool b) { return b ? 1.0 : 0.0; };
  if (name == "motivating") {
    const OracleResult r = oracle_finite(motivating_instance());
    out["value"] = r.value;
    out["theta2_prob_a0"] = r.mechanism.rows[1][0];
    out["theta2_prob_a2"] = r.mechanism.rows[1][2];
    out["veto_structure"] = flag(verify_veto_structure(r.mechanism, 0));
  } else if (name == "ushape" || name == "deterministic") {
    const ProblemSpec spec = name == "ushape" ? ProblemSpec{-0.1, 0.38, 2.0, Prior::uniform()}
                                              : ProblemSpec{-0.09, 0.5, 2.0, Prior::uniform()};
    const SolveReport r = solve_mid_v0(spec);
    out["lower_threshold"] = r.lower_threshold.value_or(NAN);
    out["upper_threshold"] = r.upper_threshold.value_or(NAN);
    out["v_hat"] = r.v_hat;
  } else if (name == "v0-sweep") {
    const std::vector<double> grid{-0.5, -0.3};
    const SweepResult s = sweep_v0({-0.2, -0.5, 2.0, Prior::uniform()}, grid);
    for (const auto& p : s.points) {
      const std::string tag = p.param == -0.5 ? "-0.5" : "-0.3";
      out["thetabar_v0_" + tag] = p.thetabar;
      out["p_at_1_v0_" + tag] = p.p_at_1;
    }
  } else if (name == "kinked-priors") {
    const double high = threshold_for_prior(kinked_prior_high(), -0.2, -0.6);
    const double low = threshold_for_prior(kinked_prior_low(), -0.2, -0.6);
    out["thetabar_g_H"] = high;
    out["thetabar_g_L"] = low;
    out["g_H_below_g_L"] = flag(high < low);
  } else if (name == "power-prior") {
    const double power = threshold_for_prior(Prior::power(9.0), -0.2, -0.6);
    const double uniform = threshold_for_prior(Prior::uniform(), -0.2, -0.6);
    out["thetabar_power"] = power;
    out["thetabar_uniform"] = uniform;
    out["power_above_uniform"] = flag(power > uniform);
  } else if (name == "pooling-boundary") {
    const SolveReport trivial = solve({-0.76, 0.0, 2.0, Prior::uniform()});
    const SolveReport valuable = solve({-0.74, 0.0, 2.0, Prior::uniform()});
    out["trivial_at_-0.76"] = flag(trivial.case_label == CaseLabel::kTrivialPool);
    out["trivial_value"] = trivial.principal_value;
    out["valuable_at_-0.74"] = flag(valuable.case_label != CaseLabel::kTrivialPool &&
                                    valuable.principal_value > trivial.principal_value);
  } else {
    fail(ErrorKind::kInvalidInput, "unknown reproduce case \"" + name + "\"");
  }
  return out;
}

struct ReproduceRow {
  std::string quantity;
  double expected;
  double computed;
  double abs_diff;
  double tol;
  bool pass;
};

struct ReproduceResult {
  std::string name;
  std::vector<ReproduceRow> rows;
  bool pass() const {
    for (const auto& r : rows) if (!r.pass) return false;
    return true;
  }
};

inline json load_manifest(const std::string& path = VETOMECH_MANIFEST_PATH) {
  const json manifest = parse_json(read_text(path), path);
  require(manifest.is_object() && manifest.contains("cases"), path + " has no \"cases\" object");
  return manifest;
}

inline ReproduceResult reproduce(const std::string& name, const json& manifest) {
  const json& cases = manifest.at("cases");
  require(cases.contains(name), "manifest has no case \"" + name + "\"");
  const std::map<std::string, double> computed = compute_case(name);
  ReproduceResult out{name, {}};
  for (const json& check : cases.at(name).at("checks")) {
    const std::string q = check.at("quantity").get<std::string>();
    const auto it = computed.find(q);
    require(it != computed.end(), "case \"" + name + "\" does not compute \"" + q + "\"");
    const double expected = check.at("expected").get<double>();
    const double tol = check.at("tol").get<double>();
    const double diff = std::abs(it->second - expected);
    out.rows.push_back({q, expected, it->second, diff, tol, diff <= tol});
  }
  return out;
}

inline void write_reproduce_csv(std::ostream& os, const ReproduceResult& r) {
  os << "quantity,reference,computed,abs_diff,tol,pass\n";
  for (const auto& row : r.rows) {
    os << row.quantity << ',' << format_number(row.expected) << ',' << format_number(row.computed) << ','
       << format_number(row.abs_diff) << ',' << format_number(row.tol) << ','
       << (row.pass ? "pass" : "FAIL") << '\n';
  }
}

inline json to_json(const ReproduceResult& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"quantity", row.quantity},
                    {"reference", row.expected},
                    {"computed", round12(row.computed)},
                    {"abs_diff", round12(row.abs_diff)},
                    {"tol", row.tol},
                    {"pass", row.pass}});
  }
  return {{"case", r.name}, {"pass", r.pass()}, {"rows", rows}};
}

}  // namespace vetomech
