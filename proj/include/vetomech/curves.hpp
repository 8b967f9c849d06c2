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

// Separating-action curves and the per-state optimal proposal for a fixed
// agent utility v_hat.
//
// With quadratic principal loss and a status quo worth u0 <= 0 to the
// principal and v0 to the agent, a state theta whose proposal a is vetoed
// with probability p gives the principal p*u0 - (1-p)(a-theta)^2 subject to
// p*v0 + (1-p)*a = v_hat. The interior optimum sits on
//   eta(theta) = v0 + sqrt((theta - v0)^2 + u0)   when v_hat >= v0,
//   phi(theta) = v0 - sqrt((v0 - theta)^2 + u0)   when v_hat <= v0.

#include <algorithm>
#include <cmath>
#include <string>

#include "vetomech/error.hpp"

namespace vetomech {

/// Which side of the status quo payoff the agent's utility lies on.
enum class Side {
  kAbove,  // v_hat >= v0, separate along eta
  kBelow,  // v_hat <= v0, separate along phi
};

/// A lottery (1 - veto_prob) o action + veto_prob o status quo.
struct Proposal {
  double action;
  double veto_prob;
};

inline double eta(double theta, double u0, double v0) {
  const double r = (theta - v0) * (theta - v0) + u0;
  if (r < 0.0) {
    fail(ErrorKind::kDomainError, "eta undefined: (theta - v0)^2 + u0 = " + std::to_string(r) + " < 0");
  }
  return std::sqrt(r) + v0;
}

inline double phi(double theta, double u0, double v0) {
  const double r = (v0 - theta) * (v0 - theta) + u0;
  if (r < 0.0) {
    fail(ErrorKind::kDomainError, "phi undefined: (v0 - theta)^2 + u0 = " + std::to_string(r) + " < 0");
  }
  return v0 - std::sqrt(r);
}

/// Upper branch of eta's inverse: the state theta >= v0 with eta(theta) = y.
inline double eta_inverse(double y, double u0, double v0) {
  if (y < v0) fail(ErrorKind::kDomainError, "eta inverse needs y >= v0");
  return v0 + std::sqrt((y - v0) * (y - v0) - u0);
}

/// Lower branch of phi's inverse: the state theta <= v0 with phi(theta) = y.
inline double phi_inverse(double y, double u0, double v0) {
  if (y > v0) fail(ErrorKind::kDomainError, "phi inverse needs y <= v0");
  return v0 - std::sqrt((v0 - y) * (v0 - y) - u0);
}

/// Half-width of the pooling band around v0: states within this distance of
/// v0 pool at v_hat on either branch.
inline double pooling_half_width(double v_hat, double u0, double v0) {
  return std::sqrt((v_hat - v0) * (v_hat - v0) - u0);
}

namespace detail {

inline bool curve_defined(double theta, double u0, double v0) {
  return (theta - v0) * (theta - v0) + u0 >= 0.0;
}

// Curve values for callers that already know theta is in the domain up to
// rounding.
inline double eta_clamped(double theta, double u0, double v0) {
  return std::sqrt(std::max(0.0, (theta - v0) * (theta - v0) + u0)) + v0;
}

inline double phi_clamped(double theta, double u0, double v0) {
  return v0 - std::sqrt(std::max(0.0, (v0 - theta) * (v0 - theta) + u0));
}

// Veto probability that holds the agent at v_hat given proposal `action`.
inline double indifference_veto(double action, double v_hat, double v0) {
  if (action == v_hat) return 0.0;
  return (action - v_hat) / (action - v0);
}

}  // namespace detail

/// Optimal proposal for agent utility v_hat >= v0: max{v_hat, eta(theta)} where
/// eta is real, v_hat otherwise.
inline Proposal pointwise_action_low_v0(double theta, double v_hat, double u0, double v0) {
  if (v_hat < v0) fail(ErrorKind::kInvalidInput, "pointwise_action_low_v0 needs v_hat >= v0");
  if (!detail::curve_defined(theta, u0, v0)) return {v_hat, 0.0};
  const double a = std::max(v_hat, eta(theta, u0, v0));
  return {a, detail::indifference_veto(a, v_hat, v0)};
}

/// Optimal proposal for agent utility v_hat <= v0: min{v_hat, phi(theta)} where
/// phi is real, v_hat otherwise.
inline Proposal pointwise_action_high_v0(double theta, double v_hat, double u0, double v0) {
  if (v_hat > v0) fail(ErrorKind::kInvalidInput, "pointwise_action_high_v0 needs v_hat <= v0");
  if (!detail::curve_defined(theta, u0, v0)) return {v_hat, 0.0};
  const double a = std::min(v_hat, phi(theta, u0, v0));
  return {a, detail::indifference_veto(a, v_hat, v0)};
}

inline Proposal pointwise_action(Side side, double theta, double v_hat, double u0, double v0) {
  return side == Side::kAbove ? pointwise_action_low_v0(theta, v_hat, u0, v0)
                              : pointwise_action_high_v0(theta, v_hat, u0, v0);
}

/// Principal's payoff from a proposal in state theta.
inline double principal_payoff(const Proposal& proposal, double theta, double u0) {
  const double miss = proposal.action - theta;
  if (proposal.veto_prob == 1.0) return u0;
  return proposal.veto_prob * u0 - (1.0 - proposal.veto_prob) * miss * miss;
}

}  // namespace vetomech
