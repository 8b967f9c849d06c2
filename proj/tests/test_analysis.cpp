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

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "vetomech/analysis.hpp"
#include "vetomech/closedform.hpp"
#include "vetomech/reproduce.hpp"

using Catch::Matchers::WithinAbs;
using namespace vetomech;

namespace {

ProblemSpec uniform_spec(double u0, double v0) { return {u0, v0, 2.0, Prior::uniform()}; }

// A solved mechanism whose promised utility slips above one half.
struct LeakyAbove {
  VetoMechanism inner;
  Proposal evaluate(double t) const {
    Proposal p = inner.evaluate(t);
    if (t > 0.5) p.veto_prob = std::max(0.0, p.veto_prob - 0.01);
    return p;
  }
  double agent_value() const { return inner.agent_value(); }
  double status_quo_agent_payoff() const { return inner.status_quo_agent_payoff(); }
};

template <typename F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an exception");
  return ErrorKind::kInvalidInput;
}

struct ThreadCap {
  explicit ThreadCap(const char* n) {
    if (const char* s = std::getenv("VETO_MECH_THREADS")) saved = s;
    setenv("VETO_MECH_THREADS", n, 1);
  }
  ~ThreadCap() {
    if (saved.empty()) unsetenv("VETO_MECH_THREADS");
    else setenv("VETO_MECH_THREADS", saved.c_str(), 1);
  }
  std::string saved;
};

}  // namespace

TEST_CASE("v0 sweep reference points", "[analysis][sweep]") {
  const std::vector<double> grid{-0.5, -0.4, -0.3};
  const SweepResult s = sweep_v0(uniform_spec(-0.2, 0.0), grid);
  REQUIRE(s.points.size() == 3);
  CHECK(s.parameter == "v0");
  CHECK(s.all_valuable());
  CHECK(s.monotone());
  CHECK_THAT(s.points[0].thetabar, WithinAbs(0.44, 1e-2));
  CHECK_THAT(s.points[2].thetabar, WithinAbs(0.49, 1e-2));
  CHECK_THAT(s.points[0].p_at_1, WithinAbs(0.42, 1e-2));
  CHECK_THAT(s.points[2].p_at_1, WithinAbs(0.47, 1e-2));
}

TEST_CASE("veto probability curves cross as v0 rises", "[analysis][sweep]") {
  const SolveReport lo = solve(uniform_spec(-0.2, -0.5));
  const SolveReport hi = solve(uniform_spec(-0.2, -0.3));
  bool higher_somewhere = false, lower_somewhere = false;
  for (double t : linspace(0.0, 1.0, 1001)) {
    const double d = hi.mechanism.evaluate(t).veto_prob - lo.mechanism.evaluate(t).veto_prob;
    higher_somewhere = higher_somewhere || d > 1e-6;
    lower_somewhere = lower_somewhere || d < -1e-6;
  }
  CHECK(higher_somewhere);
  CHECK(lower_somewhere);
}

TEST_CASE("u0 sweep is monotone", "[analysis][sweep]") {
  const std::vector<double> grid{-0.3, -0.2, -0.1, -0.05};
  const SweepResult s = sweep_u0(uniform_spec(0.0, -0.6), grid);
  CHECK(s.all_valuable());
  CHECK(s.monotone());
  CHECK(s.points[1].thetabar > s.points[2].thetabar);
  for (std::size_t i = 1; i < s.points.size(); ++i) CHECK(s.points[i].p_at_1 >= s.points[i - 1].p_at_1);
}

TEST_CASE("sweeps flag pooling points and reject bad grids", "[analysis][sweep]") {
  const std::vector<double> grid{-0.8, -0.5};
  const SweepResult s = sweep_u0(uniform_spec(0.0, 0.0), grid);
  CHECK_FALSE(s.points[0].valuable);
  CHECK(s.points[1].valuable);
  CHECK(kind_of([&] { s.require_valuable(); }) == ErrorKind::kNotValuable);
  const std::vector<double> unsorted{-0.3, -0.5};
  CHECK(kind_of([&] { sweep_v0(uniform_spec(-0.2, 0.0), unsorted); }) == ErrorKind::kInvalidInput);
  const std::vector<double> positive{-0.3, 0.1};
  CHECK(kind_of([&] { sweep_v0(uniform_spec(-0.2, 0.0), positive); }) == ErrorKind::kInvalidInput);
  CHECK(kind_of([&] { sweep_u0(uniform_spec(-0.2, 0.0), positive); }) == ErrorKind::kInvalidInput);
}

TEST_CASE("thresholds under different priors", "[analysis][prior]") {
  const double high = threshold_for_prior(kinked_prior_high(), -0.2, -0.6);
  const double low = threshold_for_prior(kinked_prior_low(), -0.2, -0.6);
  const double power = threshold_for_prior(Prior::power(9.0), -0.2, -0.6);
  const double uniform = threshold_for_prior(Prior::uniform(), -0.2, -0.6);
  CHECK_THAT(high, WithinAbs(0.647, 2e-3));
  CHECK_THAT(low, WithinAbs(0.652, 2e-3));
  CHECK_THAT(power, WithinAbs(0.970, 2e-3));
  CHECK_THAT(uniform, WithinAbs(0.424, 2e-3));
  // likelihood-ratio dominance signs the threshold either way
  CHECK(high < low);
  CHECK(power > uniform);
  CHECK(kind_of([] { threshold_for_prior(Prior::uniform(), -0.76, 0.0); }) == ErrorKind::kNotValuable);
  CHECK(kind_of([] { threshold_for_prior(Prior::uniform(), 0.0, -1.0); }) == ErrorKind::kNotValuable);
}

TEST_CASE("prior sampler inverts the CDF", "[analysis][sampler]") {
  for (const Prior& g : {Prior::uniform(), Prior::power(9.0), kinked_prior_low(), kinked_prior_high()}) {
    const PriorSampler sampler(g);
    CHECK(sampler.quantile(0.0) == 0.0);
    CHECK(sampler.quantile(1.0) == 1.0);
    // compared in probability: a flat CDF pins the state only loosely
    for (double u : {1e-6, 0.05, 0.3, 0.5, 0.89, 0.91, 0.97, 1.0 - 1e-6}) {
      CHECK_THAT(g.cdf(sampler.quantile(u)), WithinAbs(u, 1e-10));
    }
  }
  CHECK(counter_uniform(1, 7, 0) == counter_uniform(1, 7, 0));
  CHECK(counter_uniform(1, 7, 0) != counter_uniform(1, 7, 1));
  CHECK(counter_uniform(1, 7, 0) != counter_uniform(2, 7, 0));
}

TEST_CASE("simulated values agree with the exact ones", "[analysis][simulate]") {
  const ProblemSpec spec = uniform_spec(-0.8, 0.0);
  const SimulationReport trivial = simulate(VetoMechanism(TrivialPool{0.5, 0.0}), spec, 400000, 5);
  CHECK(std::abs(trivial.value_hat + 1.0 / 12.0) <= 3.0 * trivial.se);
  CHECK(trivial.agent_value_hat == 0.5);

  const SimulationReport fs = simulate(fully_separating(-1.0), uniform_spec(0.0, -1.0), 100000, 5);
  CHECK(std::abs(fs.value_hat) <= 3.0 * fs.se + 1e-15);

  const ProblemSpec valuable = uniform_spec(-0.2, -0.6);
  const SolveReport r = solve(valuable);
  const SimulationReport sim = simulate(r.mechanism, valuable, 400000, 9);
  CHECK(std::abs(sim.value_hat - r.principal_value) <= 3.0 * sim.se);
  CHECK(std::abs(sim.agent_value_hat - r.v_hat) <= 0.01);
}

TEST_CASE("deviation scan", "[analysis][simulate]") {
  for (const auto& [u0, v0] : std::vector<std::pair<double, double>>{
           {-0.2, -0.6}, {-0.1, 0.38}, {-0.09, 0.5}, {-0.2, 1.5}, {-0.8, 0.0}, {0.0, -1.0}}) {
    const SolveReport r = solve(uniform_spec(u0, v0));
    CHECK(ic_deviation_gain(r.mechanism, r.mechanism.breakpoints()) <= 1e-9);
  }
  const LeakyAbove leaky{solve(uniform_spec(-0.2, -0.6)).mechanism};
  CHECK(ic_deviation_gain(leaky) > 1e-3);
}

TEST_CASE("standard error shrinks like one over root n", "[analysis][simulate]") {
  const ProblemSpec spec = uniform_spec(-0.2, -0.6);
  const VetoMechanism mech = solve(spec).mechanism;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const double se_n = simulate(mech, spec, 20000, seed).se;
    const double se_4n = simulate(mech, spec, 80000, seed).se;
    CHECK(se_4n <= 0.6 * se_n);
  }
}

TEST_CASE("simulation is reproducible and independent of workers", "[analysis][simulate]") {
  const ProblemSpec spec = uniform_spec(-0.2, -0.6);
  const VetoMechanism mech = solve(spec).mechanism;
  const std::size_t n = 3 * kSimulationChunk + 17;
  SimulationReport one, four;
  {
    ThreadCap cap("1");
    one = simulate(mech, spec, n, 42);
  }
  {
    ThreadCap cap("4");
    four = simulate(mech, spec, n, 42);
  }
  CHECK(one.value_hat == four.value_hat);
  CHECK(one.se == four.se);
  CHECK(one.agent_value_hat == four.agent_value_hat);
  CHECK(simulate(mech, spec, n, 43).value_hat != one.value_hat);
}

TEST_CASE("CSV layouts", "[analysis][csv]") {
  const std::vector<double> grid{-0.5, -0.3};
  std::ostringstream sweep;
  write_sweep_csv(sweep, sweep_v0(uniform_spec(-0.2, 0.0), grid));
  std::istringstream lines(sweep.str());
  std::string line;
  std::getline(lines, line);
  CHECK(line == "param,abar,thetabar,p_at_1,value,case");
  std::getline(lines, line);
  CHECK(line.rfind("-0.5,", 0) == 0);
  CHECK(line.substr(line.rfind(',') + 1) == "Valuable");

  std::ostringstream sim;
  const SimulationReport r = simulate(VetoMechanism(TrivialPool{0.5}), uniform_spec(-0.8, 0.0), 1000, 3);
  const SimulationReport rs[] = {r};
  write_simulation_csv(sim, rs);
  CHECK(sim.str().rfind("seed,n,value_hat,se,ic_gain\n3,1000,", 0) == 0);
}
