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

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "vetomech/closedform.hpp"
#include "vetomech/curves.hpp"
#include "vetomech/error.hpp"
#include "vetomech/mechanism.hpp"
#include "vetomech/model.hpp"
#include "vetomech/numerics.hpp"
#include "vetomech/parallel.hpp"

namespace vetomech {

// ---------------------------------------------------------------------------
// Comparative statics

struct SweepPoint {
  double param = 0.0;
  double abar = 0.0;      // pooling action
  double thetabar = 0.0;  // state where pooling meets separation
  double p_at_1 = 0.0;    // veto probability in the top state
  double value = 0.0;
  CaseLabel case_label = CaseLabel::kValuable;
  bool valuable = true;
};

struct SweepResult {
  std::string parameter;  // "v0" or "u0"
  std::vector<double> grid;
  std::vector<SweepPoint> points;
  // Checks over the valuable points, in grid order.
  bool abar_monotone = true;
  bool thetabar_monotone = true;
  // v0 sweeps: eta decreases pointwise. u0 sweeps: the veto probability
  // increases pointwise.
  bool pointwise_monotone = true;

  bool all_valuable() const {
    return std::all_of(points.begin(), points.end(), [](const SweepPoint& p) { return p.valuable; });
  }
  bool monotone() const { return abar_monotone && thetabar_monotone && pointwise_monotone; }

  /// Throws NotValuable naming the first flagged grid point.
  void require_valuable() const {
    for (const auto& p : points) {
      if (!p.valuable) {
        fail(ErrorKind::kNotValuable, parameter + " = " + std::to_string(p.param) + " gives " +
                                          std::string(to_string(p.case_label)));
      }
    }
  }
};

inline constexpr double kMonotoneTolerance = 1e-9;
inline constexpr std::size_t kPointwiseGrid = 101;

namespace detail {

inline void require_increasing(std::span<const double> grid, const char* name) {
  require(!grid.empty(), std::string(name) + " grid must not be empty");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    require(grid[i] > grid[i - 1], std::string(name) + " grid must be strictly increasing");
  }
}

inline SweepPoint sweep_point(double param, const SolveReport& r) {
  SweepPoint p;
  p.param = param;
  p.case_label = r.case_label;
  p.value = r.principal_value;
  p.abar = r.pool_action.value_or(r.v_hat);
  p.thetabar = r.threshold().value_or(0.0);
  p.p_at_1 = r.mechanism.evaluate(1.0).veto_prob;
  p.valuable = r.case_label == CaseLabel::kValuable;
  return p;
}

// sign = +1 checks non-decreasing, -1 non-increasing.
template <typename Get>
bool monotone_over(const std::vector<SweepPoint>& points, int sign, Get get) {
  const SweepPoint* prev = nullptr;
  for (const auto& p : points) {
    if (!p.valuable) continue;
    if (prev && sign * (get(p) - get(*prev)) < -kMonotoneTolerance) return false;
    prev = &p;
  }
  return true;
}

}  // namespace detail

/// Solves the problem at each v0 on the grid (all v0 <= 0).
inline SweepResult sweep_v0(const ProblemSpec& spec, std::span<const double> v0_grid,
                            const SolverConfig& cfg = {}) {
  detail::require_increasing(v0_grid, "v0");
  for (double v0 : v0_grid) require(v0 <= 0.0, "sweep_v0 needs every v0 <= 0");
  SweepResult out{"v0", {v0_grid.begin(), v0_grid.end()}, {}, true, true, true};
  out.points.resize(v0_grid.size());
  parallel_for(v0_grid.size(), [&](std::size_t i) {
    ProblemSpec s = spec;
    s.v0 = v0_grid[i];
    out.points[i] = detail::sweep_point(v0_grid[i], solve(s, cfg));
  });
  out.abar_monotone = detail::monotone_over(out.points, +1, [](const SweepPoint& p) { return p.abar; });
  out.thetabar_monotone =
      detail::monotone_over(out.points, +1, [](const SweepPoint& p) { return p.thetabar; });

  // Raising v0 moves eta down wherever both curves are real.
  const std::vector<double> thetas = linspace(0.0, 1.0, kPointwiseGrid);
  for (std::size_t i = 1; i < v0_grid.size() && out.pointwise_monotone; ++i) {
    for (double t : thetas) {
      if (!detail::curve_defined(t, spec.u0, v0_grid[i]) ||
          !detail::curve_defined(t, spec.u0, v0_grid[i - 1])) {
        continue;
      }
      if (eta(t, spec.u0, v0_grid[i]) > eta(t, spec.u0, v0_grid[i - 1]) + kMonotoneTolerance) {
        out.pointwise_monotone = false;
        break;
      }
    }
  }
  return out;
}

/// Solves the problem at each u0 on the grid (all u0 < 0).
inline SweepResult sweep_u0(const ProblemSpec& spec, std::span<const double> u0_grid,
                            const SolverConfig& cfg = {}) {
  detail::require_increasing(u0_grid, "u0");
  for (double u0 : u0_grid) require(u0 < 0.0, "sweep_u0 needs every u0 < 0");
  SweepResult out{"u0", {u0_grid.begin(), u0_grid.end()}, {}, true, true, true};
  out.points.resize(u0_grid.size());
  std::vector<VetoMechanism> mechs(u0_grid.size(), TrivialPool{0.0});
  parallel_for(u0_grid.size(), [&](std::size_t i) {
    ProblemSpec s = spec;
    s.u0 = u0_grid[i];
    const SolveReport r = solve(s, cfg);
    mechs[i] = r.mechanism;
    out.points[i] = detail::sweep_point(u0_grid[i], r);
  });
  out.abar_monotone = detail::monotone_over(out.points, -1, [](const SweepPoint& p) { return p.abar; });
  out.thetabar_monotone =
      detail::monotone_over(out.points, -1, [](const SweepPoint& p) { return p.thetabar; });

  const std::vector<double> thetas = linspace(0.0, 1.0, kPointwiseGrid);
  std::size_t prev = u0_grid.size();
  for (std::size_t i = 0; i < u0_grid.size() && out.pointwise_monotone; ++i) {
    if (!out.points[i].valuable) continue;
    if (prev < u0_grid.size()) {
      for (double t : thetas) {
        if (mechs[i].evaluate(t).veto_prob < mechs[prev].evaluate(t).veto_prob - kMonotoneTolerance) {
          out.pointwise_monotone = false;
          break;
        }
      }
    }
    prev = i;
  }
  return out;
}

/// Pooling threshold of the optimal mechanism under the given prior.
inline double threshold_for_prior(const Prior& prior, double u0, double v0, const SolverConfig& cfg = {}) {
  const ProblemSpec spec{u0, v0, 2.0, prior};
  const SolveReport r = solve(spec, cfg);
  if (r.case_label == CaseLabel::kTrivialPool || r.case_label == CaseLabel::kFullySeparating ||
      r.case_label == CaseLabel::kDeterministic) {
    fail(ErrorKind::kNotValuable, "u0 = " + std::to_string(u0) + ", v0 = " + std::to_string(v0) +
                                      " gives " + std::string(to_string(r.case_label)) +
                                      ", which has no pooling threshold");
  }
  return *r.threshold();
}

// ---------------------------------------------------------------------------
// Monte Carlo

/// Counter-based generator: the k-th uniform of draw i depends only on
/// (seed, i, k), so any chunking of the draws sees the same numbers.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline double counter_uniform(std::uint64_t seed, std::uint64_t index, std::uint64_t stream) {
  const std::uint64_t key = splitmix64(splitmix64(seed) ^ (stream * 0xD1B54A32D192ED03ULL));
  // 53 random bits mapped to the open interval (0, 1)
  return (static_cast<double>(splitmix64(key ^ index) >> 11) + 0.5) * 0x1.0p-53;
}

/// Inverse-CDF sampler for a prior. The CDF is tabulated on panel edges
/// (including every density kink); inside a panel it is evaluated with
/// 5-point Gauss-Legendre, which is exact for the polynomial pieces of the
/// densities supported here up to degree 9, and inverted by bisection.
class PriorSampler {
 public:
  explicit PriorSampler(const Prior& prior, std::size_t panels = 1024) : prior_(prior) {
    require(panels >= 1, "sampler needs at least one panel");
    edges_ = linspace(0.0, 1.0, panels + 1);
    for (double b : prior.breakpoints()) edges_.push_back(b);
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
    cum_.assign(edges_.size(), 0.0);
    for (std::size_t k = 0; k + 1 < edges_.size(); ++k) {
      cum_[k + 1] = cum_[k] + panel_mass(k, edges_[k + 1]);
    }
    // Scale away the last bits of quadrature error so the table ends at 1.
    const double total = cum_.back();
    for (double& c : cum_) c /= total;
    scale_ = 1.0 / total;
  }

  double quantile(double u) const {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    const auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
    std::size_t k = static_cast<std::size_t>(it - cum_.begin());
    k = std::clamp<std::size_t>(k, 1, edges_.size() - 1) - 1;
    const double target = u - cum_[k];
    double lo = edges_[k];
    double hi = edges_[k + 1];
    while (hi - lo > 1e-13) {
      const double mid = 0.5 * (lo + hi);
      if (panel_mass(k, mid) * scale_ < target) lo = mid;
      else hi = mid;
    }
    return 0.5 * (lo + hi);
  }

 private:
  // Mass between edges_[k] and x, for x inside panel k.
  double panel_mass(std::size_t k, double x) const {
    static constexpr std::array<double, 5> kNodes = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                                     0.5384693101056831, 0.9061798459386640};
    static constexpr std::array<double, 5> kWeights = {0.2369268850561891, 0.4786286704993665,
                                                       0.5688888888888889, 0.4786286704993665,
                                                       0.2369268850561891};
    const double a = edges_[k];
    const double half = 0.5 * (x - a);
    const double mid = 0.5 * (x + a);
    double sum = 0.0;
    for (std::size_t j = 0; j < 5; ++j) {
      sum += kWeights[j] * prior_.density(mid + half * kNodes[j]);
    }
    return half * sum;
  }

  const Prior& prior_;
  std::vector<double> edges_;
  std::vector<double> cum_;
  double scale_ = 1.0;
};

struct SimulationReport {
  std::size_t n_draws = 0;
  std::uint64_t seed = 0;
  double value_hat = 0.0;  // mean realized principal payoff
  double se = 0.0;         // standard error of value_hat
  double agent_value_hat = 0.0;
  double ic_gain = 0.0;  // largest gain from misreporting found by the scan
};

inline constexpr std::size_t kSimulationChunk = 65536;
inline constexpr std::size_t kDeviationGrid = 501;

/// Largest expected gain an agent can get by misreporting, scanning a grid of
/// reports plus the mechanism's switch points. With a state-independent
/// agent this is the spread of the promised utility across reports.
template <VetoRule M>
double ic_deviation_gain(const M& mech, std::span<const double> extra_reports = {}) {
  std::vector<double> reports = linspace(0.0, 1.0, kDeviationGrid);
  reports.insert(reports.end(), extra_reports.begin(), extra_reports.end());
  const double v0 = mech.status_quo_agent_payoff();
  double lo = INFINITY;
  double hi = -INFINITY;
  for (double r : reports) {
    const Proposal p = mech.evaluate(r);
    const double v = p.veto_prob * v0 + (1.0 - p.veto_prob) * p.action;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return std::max(0.0, hi - lo);
}

/// Plays the mechanism against n_draws states from the prior.
template <VetoRule M>
SimulationReport simulate(const M& mech, const ProblemSpec& spec, std::size_t n_draws,
                          std::uint64_t seed) {
  spec.validate();
  require(n_draws >= 1, "simulate needs n_draws >= 1");
  const PriorSampler sampler(spec.prior);
  const double v0 = mech.status_quo_agent_payoff();

  struct Partial {
    double sum = 0.0;
    double sum_sq = 0.0;
    double agent_sum = 0.0;
  };
  const std::size_t chunks = (n_draws + kSimulationChunk - 1) / kSimulationChunk;
  std::vector<Partial> partial(chunks);
  parallel_for(chunks, [&](std::size_t c) {
    const std::size_t begin = c * kSimulationChunk;
    const std::size_t end = std::min(n_draws, begin + kSimulationChunk);
    Partial acc;
    for (std::size_t i = begin; i < end; ++i) {
      const double theta = sampler.quantile(counter_uniform(seed, i, 0));
      const Proposal p = mech.evaluate(theta);
      const bool veto = counter_uniform(seed, i, 1) < p.veto_prob;
      const double payoff = veto ? spec.u0 : -(p.action - theta) * (p.action - theta);
      acc.sum += payoff;
      acc.sum_sq += payoff * payoff;
      acc.agent_sum += veto ? v0 : p.action;
    }
    partial[c] = acc;
  });

  Partial total;
  for (const auto& p : partial) {
    total.sum += p.sum;
    total.sum_sq += p.sum_sq;
    total.agent_sum += p.agent_sum;
  }
  const double n = static_cast<double>(n_draws);
  SimulationReport out;
  out.n_draws = n_draws;
  out.seed = seed;
  out.value_hat = total.sum / n;
  out.agent_value_hat = total.agent_sum / n;
  if (n_draws > 1) {
    const double var = std::max(0.0, (total.sum_sq - n * out.value_hat * out.value_hat) / (n - 1.0));
    out.se = std::sqrt(var / n);
  }
  std::vector<double> switches;
  if constexpr (std::is_same_v<M, VetoMechanism>) switches = mech.breakpoints();
  out.ic_gain = ic_deviation_gain(mech, switches);
  return out;
}

// ---------------------------------------------------------------------------
// CSV

inline std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

inline void write_sweep_csv(std::ostream& os, const SweepResult& sweep) {
  os << "param,abar,thetabar,p_at_1,value,case\n";
  for (const auto& p : sweep.points) {
    os << format_number(p.param) << ',' << format_number(p.abar) << ',' << format_number(p.thetabar)
       << ',' << format_number(p.p_at_1) << ',' << format_number(p.value) << ','
       << to_string(p.case_label) << '\n';
  }
}

inline void write_simulation_csv(std::ostream& os, std::span<const SimulationReport> reports) {
  os << "seed,n,value_hat,se,ic_gain\n";
  for (const auto& r : reports) {
    os << r.seed << ',' << r.n_draws << ',' << format_number(r.value_hat) << ','
       << format_number(r.se) << ',' << format_number(r.ic_gain) << '\n';
  }
}

}  // namespace vetomech
