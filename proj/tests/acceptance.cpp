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

// Acceptance checks: prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "vetomech/vetomech.hpp"

using namespace vetomech;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

ProblemSpec uniform_spec(double u0, double v0) { return {u0, v0, 2.0, Prior::uniform()}; }

// Random valuable instance: v0 in [-1, 0], u0 strictly inside the valuable
// range for the uniform prior.
ProblemSpec random_valuable(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double v0 = -unit(rng);
  const double floor = (0.5 - v0) * (0.5 - v0) - (1.0 - v0) * (1.0 - v0);
  double s = 0.0;
  while (s == 0.0) s = unit(rng);
  return uniform_spec(floor * s, v0);
}

std::vector<double> theta_grid() { return linspace(0.0, 1.0, 1001); }

Outcome criterion1() {
  const auto start = Clock::now();
  const OracleResult r = oracle_finite(motivating_instance());
  const double t = seconds_since(start);
  const auto& row = r.mechanism.rows[1];
  const bool ok = r.value == 0.75 && row[0] == 0.5 && row[1] == 0.0 && row[2] == 0.5 && t < 1.0;
  return {ok, fmt("value=%.17g, second state mixes a0/a2 at %g/%g, %.3f s", r.value, row[0], row[2], t)};
}

Outcome criterion2() {
  const auto start = Clock::now();
  const SolveReport r = solve_mid_v0(uniform_spec(-0.1, 0.38));
  const double t = seconds_since(start);
  const double lo = r.lower_threshold.value_or(NAN), hi = r.upper_threshold.value_or(NAN);
  const bool ok = r.case_label == CaseLabel::kUShaped && std::abs(lo - 0.063) <= 1e-3 &&
                  std::abs(hi - 0.697) <= 1e-3 && std::abs(r.v_hat - 0.397) <= 1e-3 && t < 5.0;
  return {ok, fmt("(%.6f, %.6f, %.6f), %.3f s", lo, hi, r.v_hat, t)};
}

Outcome criterion3() {
  const SolveReport r = solve_mid_v0(uniform_spec(-0.09, 0.5));
  const auto* det = r.mechanism.get_if<DeterministicPool>();
  const bool ok = det != nullptr && std::abs(det->lower - 0.2) <= 1e-6 && std::abs(det->upper - 0.8) <= 1e-6 &&
                  r.v_hat == 0.5;
  return {ok, fmt("%s [%.9f, %.9f], v_hat=%.17g", std::string(r.mechanism.kind_name()).c_str(),
                  det ? det->lower : NAN, det ? det->upper : NAN, r.v_hat)};
}

Outcome criterion4() {
  const double h = threshold_for_prior(kinked_prior_high(), -0.2, -0.6);
  const double l = threshold_for_prior(kinked_prior_low(), -0.2, -0.6);
  const double p = threshold_for_prior(Prior::power(9.0), -0.2, -0.6);
  const double u = threshold_for_prior(Prior::uniform(), -0.2, -0.6);
  const bool ok = std::abs(h - 0.647) <= 2e-3 && std::abs(l - 0.652) <= 2e-3 && std::abs(p - 0.970) <= 2e-3 &&
                  std::abs(u - 0.424) <= 2e-3 && h < l && p > u;
  return {ok, fmt("kinked %.6f < %.6f, power %.6f > uniform %.6f", h, l, p, u)};
}

Outcome criterion5() {
  const std::vector<double> grid{-0.5, -0.3};
  const SweepResult s = sweep_v0(uniform_spec(-0.2, 0.0), grid);
  const auto& a = s.points[0];
  const auto& b = s.points[1];
  const bool ok = s.all_valuable() && std::abs(a.thetabar - 0.44) <= 1e-2 && std::abs(b.thetabar - 0.49) <= 1e-2 &&
                  std::abs(a.p_at_1 - 0.42) <= 1e-2 && std::abs(b.p_at_1 - 0.47) <= 1e-2;
  return {ok, fmt("thetabar %.4f -> %.4f, p(1) %.4f -> %.4f", a.thetabar, b.thetabar, a.p_at_1, b.p_at_1)};
}

Outcome criterion6() {
  const SolveReport t = solve(uniform_spec(-0.76, 0.0));
  const SolveReport v = solve(uniform_spec(-0.74, 0.0));
  const bool ok = t.case_label == CaseLabel::kTrivialPool && v.case_label == CaseLabel::kValuable &&
                  std::abs(t.principal_value + 1.0 / 12.0) <= 1e-10;
  return {ok, fmt("u0=-0.76 %s (value %.12f), u0=-0.74 %s", std::string(to_string(t.case_label)).c_str(),
                  t.principal_value, std::string(to_string(v.case_label)).c_str())};
}

struct OracleRun {
  ProblemSpec spec;
  SolveReport closed;
  OracleResult coarse;
  OracleResult fine;
};

std::vector<OracleRun> oracle_runs(double* elapsed) {
  const auto start = Clock::now();
  std::mt19937_64 rng(20261015);
  std::vector<OracleRun> runs;
  for (int i = 0; i < 20; ++i) {
    const ProblemSpec spec = random_valuable(rng);
    runs.push_back({spec, solve(spec), oracle_continuous(spec), oracle_continuous(spec, OracleConfig{}.refined())});
  }
  *elapsed = seconds_since(start);
  return runs;
}

// The gap is measured over the whole batch: each instance's own gap depends
// on where its pooling action falls between grid points, so it need not halve
// at every refinement even though the batch error does.
Outcome criterion7(const std::vector<OracleRun>& runs, double elapsed) {
  bool within = elapsed < 60.0;
  double max0 = 0.0, max1 = 0.0, sum0 = 0.0, sum1 = 0.0;
  int halved = 0;
  for (const auto& r : runs) {
    const double d0 = std::abs(r.coarse.value - r.closed.principal_value);
    const double d1 = std::abs(r.fine.value - r.closed.principal_value);
    within = within && r.closed.case_label == CaseLabel::kValuable && d0 <= 2e-3;
    max0 = std::max(max0, d0);
    max1 = std::max(max1, d1);
    sum0 += d0;
    sum1 += d1;
    if (d1 <= 0.5 * d0) ++halved;
  }
  const bool ok = within && max1 <= 0.5 * max0 && sum1 <= 0.5 * sum0;
  return {ok, fmt("20 instances, max |diff| %.3g -> %.3g (%.2fx), mean %.3g -> %.3g (%.2fx), "
                  "%d/20 halve individually, %.1f s",
                  max0, max1, max0 / max1, sum0 / 20, sum1 / 20, sum0 / sum1, halved, elapsed)};
}

Outcome criterion8(const std::vector<OracleRun>& runs) {
  bool ok = true;
  double gain = -INFINITY;
  for (const auto& r : runs) {
    for (const OracleResult* o : {&r.coarse, &r.fine}) {
      ok = ok && verify_veto_structure(o->mechanism, o->mechanism.a0_index) && !o->unrestricted_beats_anchor;
      gain = std::max(gain, o->max_unrestricted_gain);
    }
  }
  return {ok, fmt("veto structure on every row, max unrestricted gain %.3g", gain)};
}

// A valuable mechanism proposes and vetoes monotonically in the state, leans
// below the state past the threshold, and keeps the agent indifferent.
bool shape_ok(const SolveReport& r) {
  const auto grid = theta_grid();
  const double tb = *r.threshold();
  Proposal prev = r.mechanism.evaluate(0.0);
  for (double t : grid) {
    const Proposal p = r.mechanism.evaluate(t);
    if (p.action < prev.action - 1e-12 || p.veto_prob < prev.veto_prob - 1e-12) return false;
    if (t > tb && !(p.action < t)) return false;
    prev = p;
  }
  return ic_residual(r.mechanism, grid) <= 1e-9;
}

Outcome criterion9(std::vector<SolveReport>& solved) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int draws = 60;
  int failures = 0;
  // shape and incentive compatibility
  for (int i = 0; i < draws; ++i) {
    const SolveReport r = solve(random_valuable(rng));
    if (r.case_label != CaseLabel::kValuable || !shape_ok(r)) ++failures;
    solved.push_back(r);
  }
  // v0 comparative statics
  for (int i = 0; i < draws; ++i) {
    const double v_lo = -unit(rng);
    const double v_hi = v_lo * (0.1 + 0.8 * unit(rng));
    const double floor = (0.5 - v_hi) * (0.5 - v_hi) - (1.0 - v_hi) * (1.0 - v_hi);
    const std::vector<double> grid{v_lo, v_hi};
    const SweepResult s = sweep_v0(uniform_spec(floor * (0.05 + 0.9 * unit(rng)), 0.0), grid);
    if (!s.all_valuable() || !s.monotone()) ++failures;
  }
  // u0 comparative statics
  for (int i = 0; i < draws; ++i) {
    const double v0 = -unit(rng);
    const double floor = (0.5 - v0) * (0.5 - v0) - (1.0 - v0) * (1.0 - v0);
    const double u_lo = floor * (0.5 + 0.45 * unit(rng));
    const std::vector<double> grid{u_lo, u_lo * (0.05 + 0.9 * unit(rng))};
    const SweepResult s = sweep_u0(uniform_spec(0.0, v0), grid);
    if (!s.all_valuable() || !s.monotone()) ++failures;
  }
  // incentive compatibility beyond the low-v0 case
  for (int i = 0; i < draws; ++i) {
    const double u0 = -0.02 - 0.3 * unit(rng);
    const SolveReport mid = solve(uniform_spec(u0, 0.05 + 0.9 * unit(rng)));
    const SolveReport high = solve(uniform_spec(u0, 1.0 + unit(rng)));
    for (const SolveReport* r : {&mid, &high}) {
      if (ic_residual(r->mechanism, theta_grid()) > 1e-9) ++failures;
      solved.push_back(*r);
    }
  }
  return {failures == 0, fmt("%d draws per property, %d failures", draws, failures)};
}

Outcome criterion10(const std::vector<SolveReport>& solved) {
  const SimulationReport sim = simulate(VetoMechanism(TrivialPool{0.5, 0.0}), uniform_spec(-0.8, 0.0), 1000000, 1);
  const double z = std::abs(sim.value_hat + 1.0 / 12.0) / sim.se;
  double worst_gain = 0.0;
  for (const auto& r : solved) worst_gain = std::max(worst_gain, ic_deviation_gain(r.mechanism, r.mechanism.breakpoints()));
  const bool ok = z <= 3.0 && worst_gain <= 1e-9;
  return {ok, fmt("estimate %.6f, se %.2g (%.2f SE off), max IC gain %.3g over %zu mechanisms", sim.value_hat,
                  sim.se, z, worst_gain, solved.size())};
}

}  // namespace

int main() {
  int failed = 0;
  auto report = [&](int n, const std::function<Outcome()>& check) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %d: %s (%s)\n", n, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  };
  report(1, criterion1);
  report(2, criterion2);
  report(3, criterion3);
  report(4, criterion4);
  report(5, criterion5);
  report(6, criterion6);
  double elapsed = 0.0;
  std::vector<OracleRun> runs;
  try {
    runs = oracle_runs(&elapsed);
  } catch (const std::exception& e) {
    std::printf("oracle runs failed: %s\n", e.what());
  }
  report(7, [&] { return runs.size() == 20 ? criterion7(runs, elapsed) : Outcome{false, "oracle runs incomplete"}; });
  report(8, [&] { return runs.size() == 20 ? criterion8(runs) : Outcome{false, "oracle runs incomplete"}; });
  std::vector<SolveReport> solved;
  for (const auto& r : runs) solved.push_back(r.closed);
  report(9, [&] { return criterion9(solved); });
  report(10, [&] { return criterion10(solved); });
  return failed == 0 ? 0 : 1;
}
