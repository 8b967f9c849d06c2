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

// Optimal veto mechanisms from the first-order characterization.
//
// For a fixed agent utility v_hat the principal's problem separates by
// state (see curves.hpp). What remains is a one-dimensional choice of v_hat,
// whose stationarity condition is
//
//   G(v_hat) = \int_{S(v_hat)} (c(theta) - v_hat) dmu + v_hat - E[theta] = 0,
//
// where c is eta (v_hat >= v0) or phi (v_hat <= v0) and S(v_hat) is the set of
// states that separate, |theta - v0| > sqrt((v_hat - v0)^2 - u0). The
// objective's derivative is -2 G, and G is increasing wherever the
// objective is concave.
//
//  - v0 <= 0: G has a unique root in (0, E[theta]) unless pooling is optimal.
//  - v0 >= 1: G has a unique root in (E[theta], 1) unless pooling is optimal.
//  - 0 < v0 < 1: no global closed form; both sides of v0 are searched on a
//    grid, then refined on the stationarity condition or at a corner.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "vetomech/curves.hpp"
#include "vetomech/error.hpp"
#include "vetomech/mechanism.hpp"
#include "vetomech/model.hpp"
#include "vetomech/numerics.hpp"
#include "vetomech/parallel.hpp"

namespace vetomech {

struct SolverConfig {
  QuadratureConfig quadrature;
  RootFindConfig root;
  std::size_t coarse_grid = 2001;  // v_hat grid per side for 0 < v0 < 1
  double golden_width = 1e-10;
  double branch_tie = 1e-10;  // mid-v0 sides closer than this prefer v_hat >= v0
};

/// Principal's expected payoff under a mechanism.
inline double principal_value(const VetoMechanism& mech, const ProblemSpec& spec,
                              const QuadratureConfig& cfg = {}, QuadratureStats* stats = nullptr) {
  const double u0 = spec.u0;
  const auto breaks = mech.breakpoints();
  return spec.prior.integrate_density(
      [&](double theta) { return principal_payoff(mech.evaluate(theta), theta, u0); }, 0.0, 1.0,
      breaks, cfg, stats);
}

/// The u0 = 0 separating mechanism: propose theta, veto with probability
/// theta / (theta - v0).
inline VetoMechanism fully_separating(double v0) {
  if (!(v0 < 0.0)) {
    fail(ErrorKind::kDomainError, "fully separating mechanism needs v0 < 0, got " + std::to_string(v0));
  }
  return FullySeparating{v0};
}

namespace detail {

inline double clip01(double x) { return std::clamp(x, 0.0, 1.0); }

// States that separate rather than pool at v_hat: [0, lo) and (hi, 1].
struct SeparationRegion {
  double lo;
  double hi;
};

inline SeparationRegion separation_region(double v_hat, double u0, double v0) {
  const double s = pooling_half_width(v_hat, u0, v0);
  return {v0 - s, v0 + s};
}

inline double curve_value(Side side, double theta, double u0, double v0) {
  return side == Side::kAbove ? eta_clamped(theta, u0, v0) : phi_clamped(theta, u0, v0);
}

}  // namespace detail

/// G(v_hat) for either side; see the file comment.
inline double stationarity_residual(Side side, double v_hat, const ProblemSpec& spec,
                                    const QuadratureConfig& cfg = {},
                                    QuadratureStats* stats = nullptr) {
  const double u0 = spec.u0;
  const double v0 = spec.v0;
  if (side == Side::kAbove && v_hat < v0) {
    fail(ErrorKind::kDomainError, "eta inverse undefined for v_hat < v0");
  }
  if (side == Side::kBelow && v_hat > v0) {
    fail(ErrorKind::kDomainError, "phi inverse undefined for v_hat > v0");
  }
  const auto region = detail::separation_region(v_hat, u0, v0);
  const auto gap = [&](double theta) { return detail::curve_value(side, theta, u0, v0) - v_hat; };
  double sum = v_hat - spec.prior.mean();
  if (region.lo > 0.0) {
    sum += spec.prior.integrate_density(gap, 0.0, std::min(region.lo, 1.0), {}, cfg, stats);
  }
  if (region.hi < 1.0) {
    sum += spec.prior.integrate_density(gap, std::max(region.hi, 0.0), 1.0, {}, cfg, stats);
  }
  return sum;
}

/// Stationarity condition for v0 <= 0; increasing in v_hat, root is a-bar.
inline double foc_low_v0(double v_hat, const ProblemSpec& spec, const QuadratureConfig& cfg = {}) {
  require(spec.v0 <= 0.0, "foc_low_v0 needs v0 <= 0");
  return stationarity_residual(Side::kAbove, v_hat, spec, cfg);
}

/// Stationarity condition for v0 >= 1; increasing in v_hat, root is a-bar.
inline double foc_high_v0(double v_hat, const ProblemSpec& spec, const QuadratureConfig& cfg = {}) {
  require(spec.v0 >= 1.0, "foc_high_v0 needs v0 >= 1");
  return stationarity_residual(Side::kBelow, v_hat, spec, cfg);
}

/// Principal's value when every state plays its pointwise-optimal proposal
/// for agent utility v_hat on the given side of v0.
inline double pointwise_objective(Side side, double v_hat, const ProblemSpec& spec,
                                  const QuadratureConfig& cfg = {},
                                  QuadratureStats* stats = nullptr) {
  const double u0 = spec.u0;
  const double v0 = spec.v0;
  const auto region = detail::separation_region(v_hat, u0, v0);
  const double breaks[] = {region.lo, region.hi};
  return spec.prior.integrate_density(
      [&](double theta) {
        return principal_payoff(pointwise_action(side, theta, v_hat, u0, v0), theta, u0);
      },
      0.0, 1.0, breaks, cfg, stats);
}

/// Best v_hat found on one side of v0.
struct BranchOptimum {
  Side side;
  double v_hat;
  double value;
  double foc_residual;
  bool interior;  // stationary point rather than an end of the search interval
};

/// Maximizes pointwise_objective over v_hat in [lo, hi] on one side: coarse
/// grid, then the stationarity root when the grid maximum brackets one, the
/// exact endpoint when the maximum sits at a corner, golden section otherwise.
inline BranchOptimum maximize_agent_utility(Side side, double lo, double hi, const ProblemSpec& spec,
                                            const SolverConfig& cfg = {},
                                            QuadratureStats* stats = nullptr) {
  require(lo <= hi, "v_hat search interval reversed");
  require(cfg.coarse_grid >= 3, "coarse grid needs at least three points");
  const auto objective = [&](double v) { return pointwise_objective(side, v, spec, cfg.quadrature); };
  const auto residual = [&](double v) {
    return stationarity_residual(side, v, spec, cfg.quadrature);
  };
  if (lo == hi) {
    return {side, lo, objective(lo), std::abs(residual(lo)), false};
  }

  const std::vector<double> grid = linspace(lo, hi, cfg.coarse_grid);
  std::vector<double> values(grid.size());
  std::vector<QuadratureStats> costs(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    values[i] = pointwise_objective(side, grid[i], spec, cfg.quadrature, &costs[i]);
  });
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  if (stats) {
    for (const auto& c : costs) stats->evaluations += c.evaluations;
  }

  const std::size_t left = best == 0 ? 0 : best - 1;
  const std::size_t right = std::min(best + 1, grid.size() - 1);

  // The objective's slope is -2 G, so a maximum is a sign change of G from - to +.
  std::optional<double> root;
  const double g_best = residual(grid[best]);
  if (g_best == 0.0) {
    root = grid[best];
  } else {
    for (auto [a, b] : {std::pair{left, best}, std::pair{best, right}}) {
      if (a == b) continue;
      const double ga = residual(grid[a]);
      const double gb = residual(grid[b]);
      if (ga <= 0.0 && gb >= 0.0) {
        root = find_root_monotone(residual, grid[a], grid[b], cfg.root);
        break;
      }
    }
  }

  if (root) {
    const double value = objective(*root);
    if (value >= values[best]) return {side, *root, value, std::abs(residual(*root)), true};
    return {side, grid[best], values[best], std::abs(g_best), false};
  }
  const bool at_end = best == 0 || best + 1 == grid.size();
  if (at_end) return {side, grid[best], values[best], std::abs(g_best), false};

  const double x = golden_section_maximize(objective, grid[left], grid[right], cfg.golden_width);
  const double value = objective(x);
  if (value >= values[best]) return {side, x, value, std::abs(residual(x)), false};
  return {side, grid[best], values[best], std::abs(g_best), false};
}

namespace detail {

inline SolveReport make_report(VetoMechanism mech, CaseLabel label, double v_hat,
                               const ProblemSpec& spec, const SolverConfig& cfg,
                               QuadratureStats& stats) {
  SolveReport report{std::move(mech), label, v_hat, 0.0, {}, {}, {}, {}};
  report.principal_value = principal_value(report.mechanism, spec, cfg.quadrature, &stats);
  report.diagnostics.u0_plus_v0_sq = spec.u0 + spec.v0 * spec.v0;
  report.diagnostics.u0_plus_one_minus_v0_sq = spec.u0 + (1.0 - spec.v0) * (1.0 - spec.v0);
  return report;
}

inline SolveReport trivial_pool_report(const ProblemSpec& spec, const SolverConfig& cfg,
                                       QuadratureStats& stats) {
  const double e = spec.prior.mean();
  SolveReport r = make_report(TrivialPool{e, spec.v0}, CaseLabel::kTrivialPool, e, spec, cfg, stats);
  r.pool_action = e;
  r.lower_threshold = 0.0;
  r.upper_threshold = 1.0;
  return r;
}

}  // namespace detail

/// Optimal mechanism for 0 < v0 < 1 (and u0 < 0): searches v_hat on both
/// sides of v0 and labels the winner by shape.
inline SolveReport solve_mid_v0(const ProblemSpec& spec, const SolverConfig& cfg = {}) {
  spec.validate();
  require(spec.v0 > 0.0 && spec.v0 < 1.0, "solve_mid_v0 needs 0 < v0 < 1");
  require(spec.u0 < 0.0, "solve_mid_v0 needs u0 < 0");
  const double u0 = spec.u0;
  const double v0 = spec.v0;
  const double e = spec.prior.mean();
  QuadratureStats stats;

  // Beyond the curve's extreme values every state pools, which is never
  // better than pooling at E[theta]; E[theta] is kept inside the interval.
  double above_hi = std::max(v0, e);
  double below_lo = std::min(v0, e);
  for (double theta : {0.0, 1.0}) {
    if (detail::curve_defined(theta, u0, v0)) {
      above_hi = std::max(above_hi, eta(theta, u0, v0));
      below_lo = std::min(below_lo, phi(theta, u0, v0));
    }
  }
  above_hi = std::min(above_hi, spec.M);
  below_lo = std::max(below_lo, -spec.M);

  const BranchOptimum above = maximize_agent_utility(Side::kAbove, v0, above_hi, spec, cfg, &stats);
  const BranchOptimum below = maximize_agent_utility(Side::kBelow, below_lo, v0, spec, cfg, &stats);
  const BranchOptimum& win = (above.value >= below.value - cfg.branch_tie) ? above : below;
  const double v_hat = win.v_hat;

  SolveReport report = [&] {
    if (v_hat == v0) {
      const double w = std::sqrt(-u0);
      SolveReport r = detail::make_report(
          DeterministicPool{v0, detail::clip01(v0 - w), detail::clip01(v0 + w)},
          CaseLabel::kDeterministic, v_hat, spec, cfg, stats);
      r.lower_threshold = detail::clip01(v0 - w);
      r.upper_threshold = detail::clip01(v0 + w);
      return r;
    }
    const auto region = detail::separation_region(v_hat, u0, v0);
    const bool separate_low = region.lo > 0.0;
    const bool separate_high = region.hi < 1.0;
    const double lower = detail::clip01(region.lo);
    const double upper = detail::clip01(region.hi);
    SolveReport r = [&] {
      if (!separate_low && !separate_high) {
        return detail::make_report(TrivialPool{v_hat, v0}, CaseLabel::kTrivialPool, v_hat, spec,
                                   cfg, stats);
      }
      if (win.side == Side::kAbove && separate_high && !separate_low) {
        return detail::make_report(PoolThenSeparate{v_hat, upper, u0, v0}, CaseLabel::kValuable,
                                   v_hat, spec, cfg, stats);
      }
      if (win.side == Side::kBelow && separate_low && !separate_high) {
        return detail::make_report(SeparateThenPool{v_hat, lower, u0, v0},
                                   CaseLabel::kSeparateThenPool, v_hat, spec, cfg, stats);
      }
      return detail::make_report(UShaped{v_hat, lower, upper, u0, v0}, CaseLabel::kUShaped, v_hat,
                                 spec, cfg, stats);
    }();
    r.lower_threshold = lower;
    r.upper_threshold = upper;
    return r;
  }();
  report.pool_action = v_hat;
  report.diagnostics.foc_residual = win.foc_residual;
  report.diagnostics.quadrature_evaluations = stats.evaluations;
  return report;
}

/// Optimal veto mechanism for u0 <= 0, dispatching on v0.
inline SolveReport solve(const ProblemSpec& spec, const SolverConfig& cfg = {}) {
  spec.validate();
  if (spec.u0 > 0.0) {
    fail(ErrorKind::kUnsupported,
         "u0 = " + std::to_string(spec.u0) +
             " > 0: the solvers assume u0 <= 0 (otherwise the status quo is the principal's "
             "best option in every state)");
  }
  const double u0 = spec.u0;
  const double v0 = spec.v0;
  const double e = spec.prior.mean();
  QuadratureStats stats;

  if (u0 == 0.0 && v0 < 0.0) {
    SolveReport r = detail::make_report(fully_separating(v0), CaseLabel::kFullySeparating, 0.0,
                                        spec, cfg, stats);
    r.diagnostics.quadrature_evaluations = stats.evaluations;
    return r;
  }
  if (u0 == 0.0 && v0 >= 0.0 && v0 < 1.0) {
    // Pooling band of zero width: veto almost surely, worth 0 to the principal.
    const double c = detail::clip01(v0);
    SolveReport r = detail::make_report(DeterministicPool{v0, c, c}, CaseLabel::kDeterministic, v0,
                                        spec, cfg, stats);
    r.lower_threshold = c;
    r.upper_threshold = c;
    r.diagnostics.quadrature_evaluations = stats.evaluations;
    return r;
  }

  if (v0 <= 0.0) {
    const double top = (1.0 - v0) * (1.0 - v0) + u0;
    if (top <= (e - v0) * (e - v0)) {
      SolveReport r = detail::trivial_pool_report(spec, cfg, stats);
      r.diagnostics.quadrature_evaluations = stats.evaluations;
      return r;
    }
    // eta(0) <= 0 whenever it is real, so the bracket starts at 0.
    const auto g = [&](double v) { return stationarity_residual(Side::kAbove, v, spec, cfg.quadrature, &stats); };
    const double hi = std::min(eta(1.0, u0, v0), e);
    const double a_bar = find_root_monotone(g, std::max(0.0, v0), hi, cfg.root);
    const double theta_bar = detail::clip01(eta_inverse(a_bar, u0, v0));
    SolveReport r = detail::make_report(PoolThenSeparate{a_bar, theta_bar, u0, v0},
                                        CaseLabel::kValuable, a_bar, spec, cfg, stats);
    r.pool_action = a_bar;
    r.lower_threshold = 0.0;
    r.upper_threshold = theta_bar;
    r.diagnostics.foc_residual = std::abs(g(a_bar));
    r.diagnostics.quadrature_evaluations = stats.evaluations;
    return r;
  }

  if (v0 >= 1.0) {
    if ((v0 - e) * (v0 - e) >= v0 * v0 + u0) {
      SolveReport r = detail::trivial_pool_report(spec, cfg, stats);
      r.diagnostics.quadrature_evaluations = stats.evaluations;
      return r;
    }
    const auto f = [&](double v) { return stationarity_residual(Side::kBelow, v, spec, cfg.quadrature, &stats); };
    const double a_bar = find_root_monotone(f, e, 1.0, cfg.root);
    const double theta_bar = detail::clip01(phi_inverse(a_bar, u0, v0));
    SolveReport r = detail::make_report(SeparateThenPool{a_bar, theta_bar, u0, v0},
                                        CaseLabel::kSeparateThenPool, a_bar, spec, cfg, stats);
    r.pool_action = a_bar;
    r.lower_threshold = theta_bar;
    r.upper_threshold = 1.0;
    r.diagnostics.foc_residual = std::abs(f(a_bar));
    r.diagnostics.quadrature_evaluations = stats.evaluations;
    return r;
  }

  return solve_mid_v0(spec, cfg);
}

}  // namespace vetomech
