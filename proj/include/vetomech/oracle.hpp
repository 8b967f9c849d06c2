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

// Brute-force solvers used to cross-check the closed-form module.
//
// Both oracles use the same decomposition: fix the agent's utility v_hat,
// solve every state's problem separately, then search over v_hat. The
// per-state problem is linear in the lottery with a single equality
// constraint, so an optimal lottery has at most two atoms. The oracles
// enumerate those supports exhaustively rather than trusting the structure
// the closed forms assume.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "vetomech/error.hpp"
#include "vetomech/mechanism.hpp"
#include "vetomech/model.hpp"
#include "vetomech/numerics.hpp"
#include "vetomech/parallel.hpp"

namespace vetomech {

struct OracleConfig {
  std::size_t n_states = 201;
  std::size_t n_actions = 401;
  std::size_t n_vhat = 401;
  // Half-width of the action grid; unset means the problem's M.
  std::optional<double> action_bound;

  void validate() const {
    require(n_states >= 3, "oracle n_states must be >= 3");
    require(n_actions >= 3, "oracle n_actions must be >= 3");
    require(n_vhat >= 3, "oracle n_vhat must be >= 3");
    if (action_bound) require(std::isfinite(*action_bound) && *action_bound > 0.0,
                              "oracle action_bound must be positive");
  }

  /// Next level of refinement: n -> 2n - 1 keeps every old grid point.
  OracleConfig refined() const {
    OracleConfig out = *this;
    out.n_states = 2 * n_states - 1;
    out.n_actions = 2 * n_actions - 1;
    out.n_vhat = 2 * n_vhat - 1;
    return out;
  }
};

struct OracleResult {
  double value = 0.0;
  DiscretizedMechanism mechanism;
  double v_hat = 0.0;
  // Largest amount by which a two-point lottery avoiding the status quo beat
  // the best status-quo-anchored lottery, over every (v_hat, state) pair.
  double max_unrestricted_gain = 0.0;
  bool unrestricted_beats_anchor = false;
  std::size_t vhat_candidates = 0;
  std::size_t skipped_vhat = 0;  // v_hat values some state could not reach
};

inline constexpr double kStructureTolerance = 1e-9;

namespace detail {

struct StateChoice {
  double value = -std::numeric_limits<double>::infinity();
  std::size_t action = 0;  // index of the non-status-quo atom
  std::size_t other = 0;   // second atom (the status quo for anchored lotteries)
  double weight_other = 0.0;
  bool feasible = false;
};

// Evaluation of one v_hat for every state; slots are filled independently.
struct VhatOutcome {
  double value = -std::numeric_limits<double>::infinity();
  double gain = -std::numeric_limits<double>::infinity();
  bool feasible = false;
};

// Sorted union with exact-duplicate removal.
inline std::vector<double> merged_grid(std::vector<double> a, const std::vector<double>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

}  // namespace detail

/// Discretized version of the continuous problem. States sit at cell
/// midpoints weighted by density times cell width (renormalized to sum to
/// one); actions form a uniform grid on [-M, M] plus v0, and the status quo
/// is an extra action with payoffs (u0, v0).
inline OracleResult oracle_continuous(const ProblemSpec& spec, const OracleConfig& cfg = {}) {
  spec.validate();
  cfg.validate();
  const double bound = cfg.action_bound.value_or(spec.M);
  const double u0 = spec.u0;
  const double v0 = spec.v0;

  std::vector<double> states(cfg.n_states);
  std::vector<double> weights(cfg.n_states);
  const double width = 1.0 / static_cast<double>(cfg.n_states);
  double total_weight = 0.0;
  for (std::size_t i = 0; i < cfg.n_states; ++i) {
    states[i] = (static_cast<double>(i) + 0.5) * width;
    weights[i] = spec.prior.density(states[i]) * width;
    total_weight += weights[i];
  }
  require(total_weight > 0.0, "prior puts no weight on the oracle's state grid");
  for (double& w : weights) w /= total_weight;

  // The action equal to v0 is kept on the grid: without it a lottery with
  // agent value v0 could only be the status quo itself.
  std::vector<double> actions = linspace(-bound, bound, cfg.n_actions);
  if (v0 >= -bound && v0 <= bound) actions = detail::merged_grid(std::move(actions), {v0});
  // The per-state value is piecewise smooth in v_hat with kinks at the
  // agent payoffs, so those are always candidates.
  std::vector<double> vhats = detail::merged_grid(linspace(-bound, bound, cfg.n_vhat), actions);
  vhats = detail::merged_grid(std::move(vhats), {v0});

  // Best lottery anchored on the status quo: (p on a0, 1 - p on a) with
  // p v0 + (1 - p) a = v_hat.
  auto anchored = [&](double v_hat, double theta) {
    detail::StateChoice best;
    if (v_hat == v0) {
      best = {u0, 0, 0, 1.0, true};
    }
    for (std::size_t j = 0; j < actions.size(); ++j) {
      const double a = actions[j];
      double p;
      if (a == v_hat) {
        p = 0.0;
      } else if (a == v0) {
        continue;
      } else {
        p = (a - v_hat) / (a - v0);
        if (!(p >= 0.0 && p <= 1.0)) continue;
      }
      const double loss = (a - theta) * (a - theta);
      const double value = p * u0 - (1.0 - p) * loss;
      if (value > best.value) best = {value, j, 0, p, true};
    }
    return best;
  };

  // Lotteries over two grid actions a1 <= v_hat <= a2 lose
  // (v_hat - theta)^2 + (v_hat - a1)(a2 - v_hat), so the best such pair is
  // the one with the smallest variance whatever the state.
  auto min_pair_variance = [&](double v_hat) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < actions.size() && actions[i] <= v_hat; ++i) {
      for (std::size_t k = actions.size(); k-- > i;) {
        if (actions[k] < v_hat) break;
        best = std::min(best, (v_hat - actions[i]) * (actions[k] - v_hat));
      }
    }
    return best;
  };

  std::vector<detail::VhatOutcome> outcomes(vhats.size());
  parallel_for(vhats.size(), [&](std::size_t t) {
    const double v_hat = vhats[t];
    const double variance = min_pair_variance(v_hat);
    // The families are compared only where a single grid action is worth
    // v_hat to the agent; between grid points a tight pair can beat every
    // anchored lottery purely because the grid is coarse.
    const bool on_action_grid = std::binary_search(actions.begin(), actions.end(), v_hat);
    detail::VhatOutcome out;
    out.feasible = true;
    double sum = 0.0;
    for (std::size_t s = 0; s < states.size(); ++s) {
      const detail::StateChoice c = anchored(v_hat, states[s]);
      if (!c.feasible) {
        out.feasible = false;
        break;
      }
      sum += weights[s] * c.value;
      if (on_action_grid && std::isfinite(variance)) {
        const double pair = -(v_hat - states[s]) * (v_hat - states[s]) - variance;
        out.gain = std::max(out.gain, pair - c.value);
      }
    }
    if (out.feasible) out.value = sum;
    outcomes[t] = out;
  });

  OracleResult result;
  result.vhat_candidates = vhats.size();
  result.max_unrestricted_gain = -std::numeric_limits<double>::infinity();
  std::optional<std::size_t> best_index;
  for (std::size_t t = 0; t < outcomes.size(); ++t) {
    const auto& o = outcomes[t];
    if (!o.feasible) {
      ++result.skipped_vhat;
      continue;
    }
    result.max_unrestricted_gain = std::max(result.max_unrestricted_gain, o.gain);
    if (!best_index || o.value > outcomes[*best_index].value) best_index = t;
  }
  if (!best_index) fail(ErrorKind::kInfeasible, "no v_hat on the oracle grid is reachable in every state");
  result.unrestricted_beats_anchor = result.max_unrestricted_gain > kStructureTolerance;
  result.v_hat = vhats[*best_index];
  result.value = outcomes[*best_index].value;

  // Action list for the returned mechanism: status quo first, then the grid.
  DiscretizedMechanism& mech = result.mechanism;
  mech.state_grid = states;
  mech.a0_index = 0;
  mech.action_values.reserve(actions.size() + 1);
  mech.action_values.push_back(v0);
  mech.action_values.insert(mech.action_values.end(), actions.begin(), actions.end());
  mech.rows.assign(states.size(), std::vector<double>(mech.action_values.size(), 0.0));
  for (std::size_t s = 0; s < states.size(); ++s) {
    const detail::StateChoice c = anchored(result.v_hat, states[s]);
    auto& row = mech.rows[s];
    if (c.weight_other >= 1.0) {
      row[0] = 1.0;
    } else {
      row[0] = c.weight_other;
      row[c.action + 1] = 1.0 - c.weight_other;
    }
  }
  return result;
}

/// Exact solver for a finite instance. For a fixed v_hat the best value in
/// each state is the upper concave envelope of that state's (agent payoff,
/// principal payoff) points, so the total is concave and piecewise linear in
/// v_hat with kinks only at agent payoffs. Evaluating every agent payoff
/// (plus midpoints between them, as a cross-check) is therefore exact.
inline OracleResult oracle_finite(const FiniteInstance& inst) {
  inst.validate();
  const std::size_t n_states = inst.state_probs.size();
  const std::size_t n_actions = inst.agent_payoffs.size();
  const auto& v = inst.agent_payoffs;
  const std::size_t a0 = inst.a0_index;

  std::vector<double> kinks = detail::merged_grid(v, {});
  std::vector<double> vhats = kinks;
  for (std::size_t i = 0; i + 1 < kinks.size(); ++i) vhats.push_back(0.5 * (kinks[i] + kinks[i + 1]));
  std::sort(vhats.begin(), vhats.end());

  // Best lottery in one state: singletons with v == v_hat, or pairs
  // straddling v_hat. Returns the overall best and the best anchored on a0.
  auto solve_state = [&](std::size_t s, double v_hat) {
    const auto& u = inst.principal_payoffs[s];
    detail::StateChoice best;
    detail::StateChoice best_anchored;
    bool best_is_anchored = false;
    auto offer = [&](const detail::StateChoice& c, bool is_anchored) {
      if (is_anchored && c.value > best_anchored.value) best_anchored = c;
      // Ties go to the anchored lottery so the reported mechanism keeps the
      // veto structure whenever that is optimal.
      if (c.value > best.value || (c.value == best.value && is_anchored && !best_is_anchored)) {
        best = c;
        best_is_anchored = is_anchored;
      }
    };
    for (std::size_t j = 0; j < n_actions; ++j) {
      if (v[j] == v_hat) offer({u[j], j, j, 0.0, true}, true);
    }
    for (std::size_t j = 0; j < n_actions; ++j) {
      if (!(v[j] < v_hat)) continue;
      for (std::size_t k = 0; k < n_actions; ++k) {
        if (!(v[k] > v_hat)) continue;
        // weight on the low atom j
        const double w = (v[k] - v_hat) / (v[k] - v[j]);
        const double value = w * u[j] + (1.0 - w) * u[k];
        if (j == a0) offer({value, k, j, w, true}, true);
        else if (k == a0) offer({value, j, k, 1.0 - w, true}, true);
        else offer({value, k, j, w, true}, false);
      }
    }
    return std::pair{best, best_anchored};
  };

  OracleResult result;
  result.vhat_candidates = vhats.size();
  result.max_unrestricted_gain = -std::numeric_limits<double>::infinity();
  std::optional<double> best_value;
  for (double v_hat : vhats) {
    // Compare the two families only where some action other than the
    // status quo is worth exactly v_hat to the agent (see oracle_continuous).
    bool on_payoff = false;
    for (std::size_t j = 0; j < n_actions; ++j) on_payoff = on_payoff || (j != a0 && v[j] == v_hat);
    double total = 0.0;
    bool feasible = true;
    for (std::size_t s = 0; s < n_states && feasible; ++s) {
      const auto [best, anchored] = solve_state(s, v_hat);
      if (!best.feasible) {
        feasible = false;
        break;
      }
      total += inst.state_probs[s] * best.value;
      // States where no anchored lottery reaches v_hat have nothing to compare.
      if (on_payoff && anchored.feasible) {
        result.max_unrestricted_gain = std::max(result.max_unrestricted_gain, best.value - anchored.value);
      }
    }
    if (!feasible) {
      ++result.skipped_vhat;
      continue;
    }
    if (!best_value || total > *best_value) {
      best_value = total;
      result.v_hat = v_hat;
    }
  }
  if (!best_value) fail(ErrorKind::kInfeasible, "no common agent utility is reachable in every state");
  result.value = *best_value;
  result.unrestricted_beats_anchor = result.max_unrestricted_gain > kStructureTolerance;

  DiscretizedMechanism& mech = result.mechanism;
  mech.state_grid.resize(n_states);
  for (std::size_t s = 0; s < n_states; ++s) mech.state_grid[s] = static_cast<double>(s);
  mech.action_values = v;
  mech.a0_index = a0;
  mech.rows.assign(n_states, std::vector<double>(n_actions, 0.0));
  for (std::size_t s = 0; s < n_states; ++s) {
    const detail::StateChoice c = solve_state(s, result.v_hat).first;
    mech.rows[s][c.other] += c.weight_other;
    mech.rows[s][c.action] += 1.0 - c.weight_other;
  }
  return result;
}

}  // namespace vetomech
