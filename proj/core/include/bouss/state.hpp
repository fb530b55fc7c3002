//
// bouss - boundary heat-flux control of Boussinesq flow
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <vector>

#include "bouss/problem.hpp"

namespace bouss {

/// Forward trajectory. Every field has N+1 entries; y_tilde[0] is unused (zero).
struct StateTrajectory {
  std::vector<Vector> y;
  std::vector<Vector> y_tilde;
  std::vector<Vector> p;
  std::vector<Vector> theta;

  int steps() const { return static_cast<int>(y.size()) - 1; }
};

/// March theta, intermediate velocity and projection for n = 1..N.
/// Throws SolverError with the step and sub-equation on breakdown.
StateTrajectory solve_state(const DiscreteProblem& problem, const ControlTrajectory& v);

/// Nodal interpolation of the target at t_n.
Vector interpolate_target(const DiscreteProblem& problem, int n);

/// State part of the objective: (dt/2) sum_n (y^n - y_d^n)^T Q (y^n - y_d^n).
double state_objective(const DiscreteProblem& problem, const StateTrajectory& state);

/// Control penalty (alpha/2) (v, v)_U.
double control_penalty(const DiscreteProblem& problem, const ControlTrajectory& v);

double evaluate_objective(const DiscreteProblem& problem, const StateTrajectory& state,
                          const ControlTrajectory& v);

/// dt Q (y^n - y_d^n): gradient of the state objective with respect to y^n.
Vector objective_load(const DiscreteProblem& problem, const StateTrajectory& state, int n);

/// ||y^n - y_d^n||_{L2} / ||y_d^n||_{L2}
double relative_tracking_error(const DiscreteProblem& problem, const Vector& y, int n);

/// integral of |curl y|^2
double vorticity_norm2(const DiscreteProblem& problem, const Vector& y);

/// max over coarse pressure test functions of |b(q, y)|
double divergence_residual(const DiscreteProblem& problem, const Vector& y);

}  // namespace bouss
