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

#include <cstdlib>
#include <random>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "vetomech/closedform.hpp"
#include "vetomech/oracle.hpp"
#include "vetomech/reproduce.hpp"

using Catch::Matchers::WithinAbs;
using namespace vetomech;

namespace {

ProblemSpec uniform_spec(double u0, double v0) { return {u0, v0, 2.0, Prior::uniform()}; }

OracleConfig small_grids() {
  OracleConfig cfg;
  cfg.n_states = 101;
  cfg.n_actions = 201;
  cfg.n_vhat = 201;
  return cfg;
}

}  // namespace

TEST_CASE("finite oracle on the two-state example", "[oracle][finite]") {
  const OracleResult r = oracle_finite(motivating_instance());
  CHECK(r.value == 0.75);
  CHECK(r.v_hat == 1.0);
  const std::vector<double> first{0.0, 1.0, 0.0};
  const std::vector<double> second{0.5, 0.0, 0.5};
  CHECK(r.mechanism.rows[0] == first);
  CHECK(r.mechanism.rows[1] == second);
  CHECK(verify_veto_structure(r.mechanism, 0));
  CHECK_NOTHROW(r.mechanism.validate());
}

TEST_CASE("finite oracle degenerate instances", "[oracle][finite]") {
  // One state: the principal simply takes its favourite action.
  const OracleResult one = oracle_finite({{1.0}, {0.0, 1.0, 2.0}, {{0.0, 1.0, -3.0}}, 0});
  CHECK(one.value == 1.0);
  CHECK(one.mechanism.rows[0] == std::vector<double>{0.0, 1.0, 0.0});

  // Two copies of the same state behave like one.
  const OracleResult two = oracle_finite({{0.5, 0.5}, {0.0, 1.0, 2.0}, {{0.0, 1.0, -3.0}, {0.0, 1.0, -3.0}}, 0});
  CHECK(two.value == 1.0);
  CHECK(two.mechanism.rows[0] == two.mechanism.rows[1]);

  // Status quo only.
  const OracleResult sq = oracle_finite({{0.3, 0.7}, {0.0}, {{-1.0}, {2.0}}, 0});
  CHECK_THAT(sq.value, WithinAbs(0.3 * -1.0 + 0.7 * 2.0, 1e-15));
}

TEST_CASE("finite oracle on random general instances", "[oracle][finite][property]") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int draw = 0; draw < 60; ++draw) {
    const std::size_t n_states = 2 + draw % 4;
    const std::size_t n_actions = 2 + draw % 5;
    FiniteInstance inst;
    double total = 0.0;
    for (std::size_t s = 0; s < n_states; ++s) {
      inst.state_probs.push_back(0.1 + unit(rng));
      total += inst.state_probs.back();
    }
    for (double& p : inst.state_probs) p /= total;
    for (std::size_t j = 0; j < n_actions; ++j) inst.agent_payoffs.push_back(std::round(4.0 * unit(rng)) - 2.0);
    inst.principal_payoffs.assign(n_states, std::vector<double>(n_actions));
    for (auto& row : inst.principal_payoffs)
      for (double& x : row) x = 4.0 * unit(rng) - 2.0;
    inst.a0_index = draw % n_actions;
    const OracleResult r = oracle_finite(inst);
    REQUIRE_NOTHROW(r.mechanism.validate());
    // the status quo in every state is always available
    double sq = 0.0;
    for (std::size_t s = 0; s < n_states; ++s) sq += inst.state_probs[s] * inst.principal_payoffs[s][inst.a0_index];
    CHECK(r.value >= sq - 1e-12);
    // keeping only the status-quo row on one state can't beat the optimum
    CHECK(r.max_unrestricted_gain >= -1e-12);
  }
}

TEST_CASE("finite oracle with quadratic loss keeps the veto structure", "[oracle][finite][property]") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int draw = 0; draw < 60; ++draw) {
    const double u0 = -0.05 - 0.5 * unit(rng);
    const double v0 = -unit(rng);
    const std::size_t n_states = 2 + draw % 6;
    FiniteInstance inst;
    std::vector<double> thetas;
    for (std::size_t s = 0; s < n_states; ++s) {
      thetas.push_back(unit(rng));
      inst.state_probs.push_back(1.0 / static_cast<double>(n_states));
    }
    inst.agent_payoffs.push_back(v0);
    for (double a : linspace(-2.0, 2.0, 41)) inst.agent_payoffs.push_back(a);
    inst.agent_payoffs.push_back(v0);  // a non-status-quo action worth v0
    inst.a0_index = 0;
    for (double t : thetas) {
      std::vector<double> row{u0};
      for (std::size_t j = 1; j < inst.agent_payoffs.size(); ++j) {
        const double miss = inst.agent_payoffs[j] - t;
        row.push_back(-miss * miss);
      }
      inst.principal_payoffs.push_back(row);
    }
    const OracleResult r = oracle_finite(inst);
    REQUIRE_NOTHROW(r.mechanism.validate());
    CHECK(verify_veto_structure(r.mechanism, 0));
    CHECK_FALSE(r.unrestricted_beats_anchor);
  }
}

TEST_CASE("continuous oracle matches the closed form", "[oracle]") {
  for (const auto& [u0, v0] : std::vector<std::pair<double, double>>{{-0.2, -0.6}, {-0.5, -0.2}, {-0.1, 0.38}, {-0.2, 1.5}}) {
    const ProblemSpec spec = uniform_spec(u0, v0);
    const SolveReport r = solve(spec);
    const OracleResult o = oracle_continuous(spec);
    CHECK_THAT(o.value, WithinAbs(r.principal_value, 2e-3));
    CHECK_THAT(o.v_hat, WithinAbs(r.v_hat, 5e-3));
    CHECK(verify_veto_structure(o.mechanism, o.mechanism.a0_index));
    CHECK_FALSE(o.unrestricted_beats_anchor);
  }
}

TEST_CASE("continuous oracle with u0 = 0 and v0 < 0 reaches full value", "[oracle]") {
  const OracleResult o = oracle_continuous(uniform_spec(0.0, -1.0));
  CHECK_THAT(o.value, WithinAbs(0.0, 1e-9));
}

TEST_CASE("finer action and utility grids never lose value", "[oracle]") {
  const ProblemSpec spec = uniform_spec(-0.3, -0.4);
  OracleConfig cfg = small_grids();
  double prev = oracle_continuous(spec, cfg).value;
  for (int level = 0; level < 2; ++level) {
    cfg.n_actions = 2 * cfg.n_actions - 1;
    cfg.n_vhat = 2 * cfg.n_vhat - 1;
    const double next = oracle_continuous(spec, cfg).value;
    CHECK(next >= prev - 1e-9);
    prev = next;
  }
}

TEST_CASE("oracle result does not depend on the worker count", "[oracle]") {
  const ProblemSpec spec = uniform_spec(-0.2, -0.6);
  const char* saved = std::getenv("VETO_MECH_THREADS");
  const std::string restore = saved ? saved : "";
  setenv("VETO_MECH_THREADS", "1", 1);
  const OracleResult a = oracle_continuous(spec, small_grids());
  setenv("VETO_MECH_THREADS", "4", 1);
  const OracleResult b = oracle_continuous(spec, small_grids());
  if (saved) setenv("VETO_MECH_THREADS", restore.c_str(), 1);
  else unsetenv("VETO_MECH_THREADS");
  CHECK(a.value == b.value);
  CHECK(a.v_hat == b.v_hat);
  CHECK(a.mechanism.rows == b.mechanism.rows);
}

TEST_CASE("oracle config validation", "[oracle]") {
  OracleConfig cfg;
  cfg.n_states = 2;
  CHECK_THROWS_AS(oracle_continuous(uniform_spec(-0.2, -0.6), cfg), Error);
  cfg = OracleConfig{};
  cfg.action_bound = -1.0;
  CHECK_THROWS_AS(oracle_continuous(uniform_spec(-0.2, -0.6), cfg), Error);
  const OracleConfig r = OracleConfig{}.refined();
  CHECK(r.n_states == 401);
  CHECK(r.n_actions == 801);
  CHECK(r.n_vhat == 801);
}

TEST_CASE("structure flag ignores utilities between action grid points", "[oracle]") {
  OracleConfig cfg = small_grids();
  cfg.n_vhat = 301;  // most utility candidates fall between actions
  const OracleResult o = oracle_continuous(uniform_spec(-0.2, -0.6), cfg);
  CHECK_FALSE(o.unrestricted_beats_anchor);
  CHECK(verify_veto_structure(o.mechanism, o.mechanism.a0_index));
}
