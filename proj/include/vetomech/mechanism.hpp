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
#include <concepts>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "vetomech/curves.hpp"
#include "vetomech/error.hpp"

namespace vetomech {

/// Same proposal in every state, never vetoed.
struct TrivialPool {
  double action;
  double v0 = 0.0;
  bool operator==(const TrivialPool&) const = default;
};

/// Pool at pool_action below threshold; propose eta(theta) and veto so the
/// agent stays at pool_action from the threshold up.
struct PoolThenSeparate {
  double pool_action;
  double threshold;
  double u0;
  double v0;
  bool operator==(const PoolThenSeparate&) const = default;
};

/// Propose phi(theta) below threshold, pool at pool_action from it up.
struct SeparateThenPool {
  double pool_action;
  double threshold;
  double u0;
  double v0;
  bool operator==(const SeparateThenPool&) const = default;
};

/// Pool at v_hat on [lower, upper), separate outside: along eta when
/// v_hat >= v0, along phi when v_hat < v0. Thresholds are clipped to [0, 1].
struct UShaped {
  double v_hat;
  double lower;
  double upper;
  double u0;
  double v0;
  bool operator==(const UShaped&) const = default;
};

/// Enact v0 on [lower, upper], veto for sure elsewhere.
struct DeterministicPool {
  double v0;
  double lower;
  double upper;
  bool operator==(const DeterministicPool&) const = default;
};

/// Propose theta, veto with probability theta / (theta - v0). Needs v0 < 0.
struct FullySeparating {
  double v0;
  bool operator==(const FullySeparating&) const = default;
};

using MechanismForm = std::variant<TrivialPool, PoolThenSeparate, SeparateThenPool, UShaped,
                                   DeterministicPool, FullySeparating>;

namespace detail {

inline Proposal evaluate_form(const TrivialPool& m, double) { return {m.action, 0.0}; }

inline Proposal evaluate_form(const PoolThenSeparate& m, double theta) {
  if (theta < m.threshold) return {m.pool_action, 0.0};
  const double a = std::max(m.pool_action, eta_clamped(theta, m.u0, m.v0));
  return {a, indifference_veto(a, m.pool_action, m.v0)};
}

inline Proposal evaluate_form(const SeparateThenPool& m, double theta) {
  if (theta >= m.threshold) return {m.pool_action, 0.0};
  const double a = std::min(m.pool_action, phi_clamped(theta, m.u0, m.v0));
  return {a, indifference_veto(a, m.pool_action, m.v0)};
}

inline Proposal evaluate_form(const UShaped& m, double theta) {
  if (theta >= m.lower && theta < m.upper) return {m.v_hat, 0.0};
  if (m.v_hat >= m.v0) {
    const double a = std::max(m.v_hat, eta_clamped(theta, m.u0, m.v0));
    return {a, indifference_veto(a, m.v_hat, m.v0)};
  }
  const double a = std::min(m.v_hat, phi_clamped(theta, m.u0, m.v0));
  return {a, indifference_veto(a, m.v_hat, m.v0)};
}

inline Proposal evaluate_form(const DeterministicPool& m, double theta) {
  // The action under a sure veto is irrelevant; report v0.
  if (theta >= m.lower && theta <= m.upper) return {m.v0, 0.0};
  return {m.v0, 1.0};
}

inline Proposal evaluate_form(const FullySeparating& m, double theta) {
  if (theta == 0.0) return {0.0, 0.0};
  return {theta, theta / (theta - m.v0)};
}

}  // namespace detail

/// A veto mechanism in one of the characterized structural forms.
class VetoMechanism {
 public:
  template <typename T>
    requires std::is_constructible_v<MechanismForm, T>
  VetoMechanism(T form) : form_(std::move(form)) {}  // NOLINT(google-explicit-constructor)

  const MechanismForm& form() const { return form_; }

  template <typename T>
  const T* get_if() const { return std::get_if<T>(&form_); }

  Proposal evaluate(double theta) const {
    return std::visit([theta](const auto& m) { return detail::evaluate_form(m, theta); }, form_);
  }

  /// Utility the agent receives from any report.
  double agent_value() const {
    return std::visit(
        [](const auto& m) -> double {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, TrivialPool>) return m.action;
          else if constexpr (std::is_same_v<T, PoolThenSeparate> || std::is_same_v<T, SeparateThenPool>)
            return m.pool_action;
          else if constexpr (std::is_same_v<T, UShaped>) return m.v_hat;
          else if constexpr (std::is_same_v<T, DeterministicPool>) return m.v0;
          else return 0.0;  // FullySeparating
        },
        form_);
  }

  /// Agent's payoff from the status quo.
  double status_quo_agent_payoff() const {
    return std::visit([](const auto& m) { return m.v0; }, form_);
  }

  /// Interior states where the mechanism switches branch.
  std::vector<double> breakpoints() const {
    std::vector<double> out = std::visit(
        [](const auto& m) -> std::vector<double> {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, PoolThenSeparate> || std::is_same_v<T, SeparateThenPool>)
            return {m.threshold};
          else if constexpr (std::is_same_v<T, UShaped> || std::is_same_v<T, DeterministicPool>)
            return {m.lower, m.upper};
          else return {};
        },
        form_);
    std::erase_if(out, [](double t) { return !(t > 0.0 && t < 1.0); });
    return out;
  }

  std::string_view kind_name() const {
    static constexpr std::string_view kNames[] = {"trivial_pool", "pool_then_separate",
                                                  "separate_then_pool", "u_shaped",
                                                  "deterministic_pool", "fully_separating"};
    return kNames[form_.index()];
  }

  bool operator==(const VetoMechanism&) const = default;

 private:
  MechanismForm form_;
};

/// Anything that maps a state to a proposal and promises the agent a fixed
/// utility; VetoMechanism is the main model, tests wrap it to inject faults.
template <typename M>
concept VetoRule = requires(const M& m, double theta) {
  { m.evaluate(theta) } -> std::convertible_to<Proposal>;
  { m.agent_value() } -> std::convertible_to<double>;
  { m.status_quo_agent_payoff() } -> std::convertible_to<double>;
};

inline Proposal evaluate(const VetoMechanism& mech, double theta) { return mech.evaluate(theta); }

/// Largest violation of the indifference constraints over the grid:
/// max |p v0 + (1 - p) a - v_hat|.
template <VetoRule M>
double ic_residual(const M& mech, std::span<const double> grid) {
  require(!grid.empty(), "ic_residual needs a non-empty grid");
  const double v_hat = mech.agent_value();
  const double v0 = mech.status_quo_agent_payoff();
  double worst = 0.0;
  for (double theta : grid) {
    require(theta >= 0.0 && theta <= 1.0, "ic_residual grid must lie in [0,1]");
    const Proposal p = mech.evaluate(theta);
    const double value = p.veto_prob * v0 + (1.0 - p.veto_prob) * p.action;
    worst = std::max(worst, std::abs(value - v_hat));
  }
  return worst;
}

/// Per-state lotteries over a finite action list. action_values holds each
/// action's coordinate (the status quo entry holds the agent's payoff v0).
struct DiscretizedMechanism {
  std::vector<double> state_grid;
  std::vector<double> action_values;
  std::size_t a0_index = 0;
  std::vector<std::vector<double>> rows;

  static constexpr double kRowTolerance = 1e-9;

  void validate() const {
    require(rows.size() == state_grid.size(), "one probability row per state required");
    require(a0_index < action_values.size(), "a0_index out of range");
    for (const auto& row : rows) {
      require(row.size() == action_values.size(), "row length must match the action list");
      double sum = 0.0;
      for (double x : row) {
        require(x >= 0.0, "mechanism probabilities must be >= 0");
        sum += x;
      }
      require(std::abs(sum - 1.0) <= kRowTolerance, "mechanism row does not sum to 1");
    }
  }
};

/// True iff every row has at most two atoms and every two-atom row puts one
/// of them on the status quo.
inline bool verify_veto_structure(const DiscretizedMechanism& mech, std::size_t a0_index,
                                  double atom_tol = 1e-12) {
  for (const auto& row : mech.rows) {
    int atoms = 0;
    bool has_status_quo = false;
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (row[j] > atom_tol) {
        ++atoms;
        if (j == a0_index) has_status_quo = true;
      }
    }
    if (atoms > 2) return false;
    if (atoms == 2 && !has_status_quo) return false;
  }
  return true;
}

}  // namespace vetomech
