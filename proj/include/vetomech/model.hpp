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

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vetomech/error.hpp"
#include "vetomech/mechanism.hpp"
#include "vetomech/prior.hpp"

namespace vetomech {

/// One delegation problem: principal loss -(a - theta)^2 on [-M, M] and u0
/// from the status quo; agent utility a on [-M, M] and v0 from the status quo.
struct ProblemSpec {
  double u0 = 0.0;
  double v0 = 0.0;
  double M = 2.0;
  Prior prior;

  void validate() const {
    require(std::isfinite(u0), "u0 must be finite");
    require(std::isfinite(v0), "v0 must be finite");
    require(std::isfinite(M) && M > 1.0, "action bound M must be > 1");
  }

  bool operator==(const ProblemSpec&) const = default;
};

enum class CaseLabel {
  kValuable,          // pool low states, separate along eta above a threshold
  kTrivialPool,
  kFullySeparating,
  kUShaped,
  kDeterministic,
  kSeparateThenPool,
};

constexpr std::string_view to_string(CaseLabel label) {
  switch (label) {
    case CaseLabel::kValuable: return "Valuable";
    case CaseLabel::kTrivialPool: return "TrivialPool";
    case CaseLabel::kFullySeparating: return "FullySeparating";
    case CaseLabel::kUShaped: return "UShaped";
    case CaseLabel::kDeterministic: return "Deterministic";
    case CaseLabel::kSeparateThenPool: return "SeparateThenPool";
  }
  return "Unknown";
}

struct SolveDiagnostics {
  double foc_residual = 0.0;  // |stationarity residual| at the returned v_hat
  std::size_t quadrature_evaluations = 0;
  double u0_plus_v0_sq = 0.0;            // u0 + v0^2
  double u0_plus_one_minus_v0_sq = 0.0;  // u0 + (1 - v0)^2
};

struct SolveReport {
  VetoMechanism mechanism;
  CaseLabel case_label;
  double v_hat;
  double principal_value;
  std::optional<double> pool_action;  // a-bar / v-hat where the mechanism pools
  // Pooling band [lower, upper] clipped to [0, 1]; unset when nothing pools.
  std::optional<double> lower_threshold;
  std::optional<double> upper_threshold;
  SolveDiagnostics diagnostics;

  /// Threshold where pooling meets separation in the one-threshold forms.
  std::optional<double> threshold() const {
    if (case_label == CaseLabel::kSeparateThenPool) return lower_threshold;
    return upper_threshold;
  }
};

/// Finite mechanism-design instance: states with probabilities, actions with
/// agent payoffs, and the principal's state-by-action payoff table.
struct FiniteInstance {
  std::vector<double> state_probs;
  std::vector<double> agent_payoffs;
  std::vector<std::vector<double>> principal_payoffs;  // [state][action]
  std::size_t a0_index = 0;

  void validate() const {
    require(!state_probs.empty(), "finite instance needs at least one state");
    require(!agent_payoffs.empty(), "finite instance needs at least one action");
    require(a0_index < agent_payoffs.size(), "a0_index out of range");
    require(principal_payoffs.size() == state_probs.size(),
            "principal_payoffs needs one row per state");
    double total = 0.0;
    for (double p : state_probs) {
      require(std::isfinite(p) && p >= 0.0, "state probabilities must be >= 0");
      total += p;
    }
    require(std::abs(total - 1.0) <= 1e-9, "state probabilities must sum to 1");
    for (double v : agent_payoffs) require(std::isfinite(v), "agent payoffs must be finite");
    for (const auto& row : principal_payoffs) {
      require(row.size() == agent_payoffs.size(), "principal_payoffs row length must match actions");
      for (double u : row) require(std::isfinite(u), "principal payoffs must be finite");
    }
  }
};

}  // namespace vetomech
