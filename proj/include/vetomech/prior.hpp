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
#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "vetomech/error.hpp"
#include "vetomech/numerics.hpp"

namespace vetomech {

/// One knot of a piecewise-linear density. Repeating an abscissa encodes a
/// jump: the first knot is the left limit, the second the right limit.
struct DensityKnot {
  double theta;
  double density;

  bool operator==(const DensityKnot&) const = default;
};

struct UniformDensity {
  bool operator==(const UniformDensity&) const = default;
};

/// Density (k + 1) theta^k.
struct PowerDensity {
  double exponent = 0.0;
  bool operator==(const PowerDensity&) const = default;
};

struct PiecewiseLinearDensity {
  std::vector<DensityKnot> knots;
  bool operator==(const PiecewiseLinearDensity&) const = default;
};

/// Values on a strictly increasing grid covering [0, 1], linearly interpolated.
struct TabulatedDensity {
  std::vector<double> grid;
  std::vector<double> values;
  bool operator==(const TabulatedDensity&) const = default;
};

using DensityForm = std::variant<UniformDensity, PowerDensity, PiecewiseLinearDensity, TabulatedDensity>;

/// Full-support distribution of the state on [0, 1], stored as a density.
/// Immutable; the mean is computed once at construction.
class Prior {
 public:
  static constexpr double kMassTolerance = 1e-8;

  Prior() : Prior(UniformDensity{}) {}

  explicit Prior(DensityForm form) : form_(std::move(form)) {
    validate_shape();
    breakpoints_ = compute_breakpoints();
    const double mass = integrate_density([](double) { return 1.0; });
    if (!(std::abs(mass - 1.0) <= kMassTolerance)) {
      fail(ErrorKind::kInvalidInput,
           "prior density integrates to " + std::to_string(mass) + ", expected 1 within 1e-8");
    }
    mean_ = integrate_density([](double t) { return t; });
  }

  static Prior uniform() { return Prior(UniformDensity{}); }
  static Prior power(double k) { return Prior(PowerDensity{k}); }
  static Prior piecewise_linear(std::vector<DensityKnot> knots) {
    return Prior(PiecewiseLinearDensity{std::move(knots)});
  }
  static Prior tabulated(std::vector<double> grid, std::vector<double> values) {
    return Prior(TabulatedDensity{std::move(grid), std::move(values)});
  }

  const DensityForm& form() const { return form_; }
  double mean() const { return mean_; }

  /// Interior points where the density is not smooth.
  std::span<const double> breakpoints() const { return breakpoints_; }

  double density(double theta) const {
    return std::visit([theta](const auto& f) { return eval(f, theta); }, form_);
  }

  /// \int_lo^hi h(theta) g(theta) dtheta, split at the density's kinks and at
  /// any extra breakpoints supplied by the caller.
  template <typename H>
  double integrate_density(const H& h, double lo = 0.0, double hi = 1.0,
                           std::span<const double> extra_breaks = {},
                           const QuadratureConfig& cfg = {},
                           QuadratureStats* stats = nullptr) const {
    cfg.validate();
    if (lo > hi) {
      fail(ErrorKind::kInvalidInput, "integration limits reversed: lo = " + std::to_string(lo) +
                                         " > hi = " + std::to_string(hi));
    }
    if (lo == hi) return 0.0;
    std::vector<double> cuts{lo, hi};
    for (double b : breakpoints_) if (b > lo && b < hi) cuts.push_back(b);
    for (double b : extra_breaks) if (b > lo && b < hi) cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    // Each segment sees the density's one-sided limits at its ends, so jumps
    // in a piecewise density never leak into the neighbouring segment.
    double total = 0.0;
    QuadratureConfig seg_cfg = cfg;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double a = cuts[i];
      const double b = cuts[i + 1];
      seg_cfg.abs_tol = cfg.abs_tol * (b - a) / (hi - lo);
      total += integrate(
          [&](double t) {
            const double g = t <= a ? density_right(a) : (t >= b ? density_left(b) : density(t));
            return h(t) * g;
          },
          a, b, seg_cfg, {}, stats);
    }
    return total;
  }

  /// Limit of the density from the left / right; differs from density()
  /// only at a jump.
  double density_left(double theta) const {
    if (const auto* p = std::get_if<PiecewiseLinearDensity>(&form_)) return eval_side(*p, theta, false);
    return density(theta);
  }
  double density_right(double theta) const {
    if (const auto* p = std::get_if<PiecewiseLinearDensity>(&form_)) return eval_side(*p, theta, true);
    return density(theta);
  }

  double cdf(double theta, const QuadratureConfig& cfg = {}) const {
    if (theta <= 0.0) return 0.0;
    if (theta >= 1.0) return 1.0;
    return integrate_density([](double) { return 1.0; }, 0.0, theta, {}, cfg);
  }

  bool operator==(const Prior& other) const { return form_ == other.form_; }

 private:
  static double eval(const UniformDensity&, double) { return 1.0; }

  static double eval(const PowerDensity& p, double t) {
    if (p.exponent == 0.0) return 1.0;
    return (p.exponent + 1.0) * std::pow(t, p.exponent);
  }

  static double eval(const PiecewiseLinearDensity& p, double t) {
    const auto& k = p.knots;
    if (t <= k.front().theta) return k.front().density;
    for (std::size_t i = 0; i + 1 < k.size(); ++i) {
      const double a = k[i].theta;
      const double b = k[i + 1].theta;
      if (t <= b && b > a) {
        const double w = (t - a) / (b - a);
        return k[i].density + w * (k[i + 1].density - k[i].density);
      }
    }
    return k.back().density;
  }

  static double eval_side(const PiecewiseLinearDensity& p, double t, bool right) {
    const auto& k = p.knots;
    for (std::size_t i = 0; i + 1 < k.size(); ++i) {
      const double a = k[i].theta;
      const double b = k[i + 1].theta;
      if (b <= a) continue;
      const bool inside = right ? (t >= a && t < b) : (t > a && t <= b);
      if (inside) {
        const double w = (t - a) / (b - a);
        return k[i].density + w * (k[i + 1].density - k[i].density);
      }
    }
    return right ? k.back().density : k.front().density;
  }

  static double eval(const TabulatedDensity& p, double t) {
    const auto& x = p.grid;
    if (t <= x.front()) return p.values.front();
    if (t >= x.back()) return p.values.back();
    const auto it = std::upper_bound(x.begin(), x.end(), t);
    const std::size_t j = static_cast<std::size_t>(it - x.begin());
    const double w = (t - x[j - 1]) / (x[j] - x[j - 1]);
    return p.values[j - 1] + w * (p.values[j] - p.values[j - 1]);
  }

  void validate_shape() const {
    std::visit(
        [](const auto& f) {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, PowerDensity>) {
            require(std::isfinite(f.exponent) && f.exponent >= 0.0,
                    "power prior exponent must be finite and >= 0");
          } else if constexpr (std::is_same_v<T, PiecewiseLinearDensity>) {
            const auto& k = f.knots;
            require(k.size() >= 2, "piecewise-linear prior needs at least two knots");
            require(k.front().theta == 0.0 && k.back().theta == 1.0,
                    "piecewise-linear prior knots must start at 0 and end at 1");
            for (std::size_t i = 0; i < k.size(); ++i) {
              require(std::isfinite(k[i].density) && k[i].density >= 0.0,
                      "prior density must be >= 0 everywhere");
              if (i > 0) {
                require(k[i].theta >= k[i - 1].theta, "piecewise-linear knots must be sorted");
                if (i >= 2) {
                  require(!(k[i].theta == k[i - 1].theta && k[i - 1].theta == k[i - 2].theta),
                          "at most two knots may share an abscissa");
                }
                // a segment of positive length with zero density at both ends
                // would leave a gap in the support
                require(!(k[i].theta > k[i - 1].theta && k[i].density == 0.0 &&
                          k[i - 1].density == 0.0),
                        "prior must have full support on [0,1]");
              }
            }
          } else if constexpr (std::is_same_v<T, TabulatedDensity>) {
            require(f.grid.size() >= 2 && f.grid.size() == f.values.size(),
                    "tabulated prior needs matching grid and values (>= 2 points)");
            require(f.grid.front() == 0.0 && f.grid.back() == 1.0,
                    "tabulated prior grid must span [0,1]");
            for (std::size_t i = 0; i < f.grid.size(); ++i) {
              require(std::isfinite(f.values[i]) && f.values[i] >= 0.0,
                      "prior density must be >= 0 everywhere");
              if (i > 0) {
                require(f.grid[i] > f.grid[i - 1], "tabulated grid must be strictly increasing");
                require(!(f.values[i] == 0.0 && f.values[i - 1] == 0.0),
                        "prior must have full support on [0,1]");
              }
            }
          }
        },
        form_);
  }

  std::vector<double> compute_breakpoints() const {
    std::vector<double> out;
    if (const auto* p = std::get_if<PiecewiseLinearDensity>(&form_)) {
      for (const auto& k : p->knots) out.push_back(k.theta);
    } else if (const auto* t = std::get_if<TabulatedDensity>(&form_)) {
      out = t->grid;
    }
    std::erase_if(out, [](double x) { return x <= 0.0 || x >= 1.0; });
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  DensityForm form_;
  std::vector<double> breakpoints_;
  double mean_ = 0.5;
};

/// Expected state under the prior.
inline double mean(const Prior& prior) { return prior.mean(); }

}  // namespace vetomech
