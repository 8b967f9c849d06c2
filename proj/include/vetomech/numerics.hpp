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

// Quadrature, bracketed root finding and 1-D maximization.
//
// Everything here is domain-free. The integrator is a globally adaptive
// Simpson scheme: the panel with the largest error estimate is bisected until
// the summed estimate drops below the requested absolute tolerance. Global
// (rather than recursive, locally halved) error control matters because the
// integrands built from square-root action curves have unbounded derivatives
// at the edge of their real domain.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "vetomech/error.hpp"

namespace vetomech {

struct AdaptiveSimpson {};

struct GaussLegendrePanels {
  int panels = 64;  // 5-point panels per smooth segment
};

struct QuadratureConfig {
  double abs_tol = 1e-10;
  int max_subdivisions = 60;       // bisection depth limit of any single panel
  std::size_t max_panels = 200000; // hard cap on live panels
  std::variant<AdaptiveSimpson, GaussLegendrePanels> rule = AdaptiveSimpson{};

  void validate() const {
    require(abs_tol > 0.0 && std::isfinite(abs_tol), "quadrature abs_tol must be > 0");
    require(max_subdivisions >= 1, "quadrature max_subdivisions must be >= 1");
    if (const auto* gl = std::get_if<GaussLegendrePanels>(&rule)) {
      require(gl->panels >= 1, "Gauss-Legendre panel count must be >= 1");
    }
  }
};

struct RootFindConfig {
  double abs_tol = 1e-12;
  int max_iterations = 200;

  void validate() const {
    require(abs_tol > 0.0 && std::isfinite(abs_tol), "root-find abs_tol must be > 0");
    require(max_iterations >= 1, "root-find max_iterations must be >= 1");
  }
};

/// Running cost counters; pass one in to see how much work a call did.
struct QuadratureStats {
  std::size_t evaluations = 0;
  std::size_t panels = 0;
};

namespace detail {

template <typename F>
double checked_eval(const F& f, double x, QuadratureStats* stats) {
  const double y = f(x);
  if (stats) ++stats->evaluations;
  if (!std::isfinite(y)) {
    fail(ErrorKind::kNonFinite, "integrand is not finite at x = " + std::to_string(x));
  }
  return y;
}

struct SimpsonPanel {
  double lo, hi;
  double f_lo, f_mid, f_hi;
  double whole;  // Simpson estimate on [lo, hi]
  double refined;
  double error;
  int depth;
  // refined-panel midpoints, reused when the panel is split
  double f_left_mid, f_right_mid;

  bool operator<(const SimpsonPanel& other) const { return error < other.error; }
};

template <typename F>
SimpsonPanel make_panel(const F& f, double lo, double hi, double f_lo, double f_mid, double f_hi,
                        double whole, int depth, QuadratureStats* stats) {
  const double mid = 0.5 * (lo + hi);
  const double f_lm = checked_eval(f, 0.5 * (lo + mid), stats);
  const double f_rm = checked_eval(f, 0.5 * (mid + hi), stats);
  const double h = hi - lo;
  const double left = h / 12.0 * (f_lo + 4.0 * f_lm + f_mid);
  const double right = h / 12.0 * (f_mid + 4.0 * f_rm + f_hi);
  const double refined = left + right;
  const double diff = refined - whole;
  return SimpsonPanel{lo, hi, f_lo, f_mid, f_hi, whole, refined + diff / 15.0,
                      std::abs(diff) / 15.0, depth, f_lm, f_rm};
}

template <typename F>
double adaptive_simpson(const F& f, double lo, double hi, double tol, const QuadratureConfig& cfg,
                        QuadratureStats* stats) {
  const double mid = 0.5 * (lo + hi);
  const double f_lo = checked_eval(f, lo, stats);
  const double f_mid = checked_eval(f, mid, stats);
  const double f_hi = checked_eval(f, hi, stats);
  const double whole = (hi - lo) / 6.0 * (f_lo + 4.0 * f_mid + f_hi);

  std::priority_queue<SimpsonPanel> queue;
  queue.push(make_panel(f, lo, hi, f_lo, f_mid, f_hi, whole, 0, stats));
  double total_error = queue.top().error;

  while (total_error > tol) {
    SimpsonPanel worst = queue.top();
    queue.pop();
    total_error -= worst.error;
    if (worst.depth + 1 > cfg.max_subdivisions || queue.size() + 2 > cfg.max_panels) {
      fail(ErrorKind::kBudgetExceeded,
           "adaptive Simpson did not reach tolerance on [" + std::to_string(lo) + ", " +
               std::to_string(hi) + "]");
    }
    const double m = 0.5 * (worst.lo + worst.hi);
    const double h = worst.hi - worst.lo;
    const double left_whole = h / 12.0 * (worst.f_lo + 4.0 * worst.f_left_mid + worst.f_mid);
    const double right_whole = h / 12.0 * (worst.f_mid + 4.0 * worst.f_right_mid + worst.f_hi);
    SimpsonPanel left = make_panel(f, worst.lo, m, worst.f_lo, worst.f_left_mid, worst.f_mid,
                                   left_whole, worst.depth + 1, stats);
    SimpsonPanel right = make_panel(f, m, worst.hi, worst.f_mid, worst.f_right_mid, worst.f_hi,
                                    right_whole, worst.depth + 1, stats);
    total_error += left.error + right.error;
    queue.push(left);
    queue.push(right);
    // Guard against the running total drifting below zero through cancellation.
    if (total_error < 0.0) total_error = 0.0;
  }

  if (stats) stats->panels += queue.size();
  // Sum smallest-first for a reproducible, slightly more accurate total.
  std::vector<double> parts;
  parts.reserve(queue.size());
  while (!queue.empty()) {
    parts.push_back(queue.top().refined);
    queue.pop();
  }
  double sum = 0.0;
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) sum += *it;
  return sum;
}

inline constexpr std::array<double, 5> kGaussNodes = {
    -0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831, 0.9061798459386640};
inline constexpr std::array<double, 5> kGaussWeights = {
    0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
    0.2369268850561891};

template <typename F>
double gauss_legendre_panel(const F& f, double lo, double hi, QuadratureStats* stats) {
  const double half = 0.5 * (hi - lo);
  const double centre = 0.5 * (hi + lo);
  double sum = 0.0;
  for (std::size_t i = 0; i < kGaussNodes.size(); ++i) {
    sum += kGaussWeights[i] * checked_eval(f, centre + half * kGaussNodes[i], stats);
  }
  return half * sum;
}

template <typename F>
double integrate_segment(const F& f, double lo, double hi, double tol, const QuadratureConfig& cfg,
                         QuadratureStats* stats) {
  if (lo == hi) return 0.0;
  if (const auto* gl = std::get_if<GaussLegendrePanels>(&cfg.rule)) {
    double sum = 0.0;
    const double width = (hi - lo) / gl->panels;
    for (int i = 0; i < gl->panels; ++i) {
      const double a = lo + width * i;
      const double b = (i + 1 == gl->panels) ? hi : lo + width * (i + 1);
      sum += gauss_legendre_panel(f, a, b, stats);
    }
    if (stats) stats->panels += static_cast<std::size_t>(gl->panels);
    return sum;
  }
  return adaptive_simpson(f, lo, hi, tol, cfg, stats);
}

}  // namespace detail

/// Integrates f over [lo, hi], splitting at every breakpoint strictly inside
/// the interval. The tolerance budget is shared across segments by width.
template <typename F>
double integrate(const F& f, double lo, double hi, const QuadratureConfig& cfg = {},
                 std::span<const double> breakpoints = {}, QuadratureStats* stats = nullptr) {
  cfg.validate();
  if (!std::isfinite(lo) || !std::isfinite(hi)) {
    fail(ErrorKind::kInvalidInput, "integration limits must be finite");
  }
  if (lo > hi) {
    fail(ErrorKind::kInvalidInput, "integration limits reversed: lo = " + std::to_string(lo) +
                                       " > hi = " + std::to_string(hi));
  }
  if (lo == hi) return 0.0;

  std::vector<double> cuts;
  cuts.reserve(breakpoints.size() + 2);
  cuts.push_back(lo);
  for (double b : breakpoints) {
    if (b > lo && b < hi) cuts.push_back(b);
  }
  cuts.push_back(hi);
  std::sort(cuts.begin() + 1, cuts.end() - 1);
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const double width = hi - lo;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double share = cfg.abs_tol * (cuts[i + 1] - cuts[i]) / width;
    total += detail::integrate_segment(f, cuts[i], cuts[i + 1], share, cfg, stats);
  }
  return total;
}

/// Bisection on a monotone function. Returns lo (resp. hi) when the function
/// vanishes exactly there; otherwise the midpoint of the final bracket, whose
/// width is at most cfg.abs_tol.
template <typename G>
double find_root_monotone(const G& g, double lo, double hi, const RootFindConfig& cfg = {}) {
  cfg.validate();
  if (!(lo <= hi)) {
    fail(ErrorKind::kInvalidInput, "root bracket reversed: lo = " + std::to_string(lo) +
                                       " > hi = " + std::to_string(hi));
  }
  const auto eval = [&](double x) {
    const double y = g(x);
    if (!std::isfinite(y)) {
      fail(ErrorKind::kNonFinite, "root-find target not finite at x = " + std::to_string(x));
    }
    return y;
  };
  double g_lo = eval(lo);
  if (g_lo == 0.0) return lo;
  double g_hi = eval(hi);
  if (g_hi == 0.0) return hi;
  if ((g_lo > 0.0) == (g_hi > 0.0)) {
    fail(ErrorKind::kNoBracket, "no sign change on [" + std::to_string(lo) + ", " +
                                    std::to_string(hi) + "]: g(lo) = " + std::to_string(g_lo) +
                                    ", g(hi) = " + std::to_string(g_hi));
  }
  for (int it = 0; it < cfg.max_iterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= cfg.abs_tol || mid == lo || mid == hi) return mid;
    const double g_mid = eval(mid);
    if (g_mid == 0.0) return mid;
    if ((g_mid > 0.0) == (g_lo > 0.0)) {
      lo = mid;
      g_lo = g_mid;
    } else {
      hi = mid;
    }
  }
  if (hi - lo <= cfg.abs_tol) return 0.5 * (lo + hi);
  fail(ErrorKind::kBudgetExceeded, "bisection exceeded " + std::to_string(cfg.max_iterations) +
                                       " iterations");
}

/// Golden-section search for a maximum of a unimodal function on [lo, hi].
/// Returns the abscissa of the best point evaluated.
template <typename F>
double golden_section_maximize(const F& f, double lo, double hi, double width_tol = 1e-10,
                               int max_iterations = 300) {
  require(lo <= hi, "golden-section bracket reversed");
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < max_iterations && (b - a) > width_tol; ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? c : d;
}

/// n equally spaced points on [lo, hi], endpoints exact.
inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
  require(n >= 2, "linspace needs at least two points");
  std::vector<double> out(n);
  const double span = hi - lo;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = lo + span * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  out.back() = hi;
  return out;
}

}  // namespace vetomech
