//
// bouss - boundary heat-flux control of Boussinesq flow
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <optional>
#include <vector>

#include "bouss/state.hpp"

namespace bouss {

/// Directional derivative of the state along a control direction; N+1 entries
/// each with zero initial data (w_tilde[0] unused).
struct SensitivityTrajectory {
  std::vector<Vector> w;
  std::vector<Vector> w_tilde;
  std::vector<Vector> q;
  std::vector<Vector> phi;

  int steps() const { return static_cast<int>(w.size()) - 1; }
};

SensitivityTrajectory solve_linearized(const DiscreteProblem& problem, const StateTrajectory& state,
                                       const ControlTrajectory& d);

struct StepSize {
  double rho = 0.0;
  double numerator = 0.0;    ///< (g, d)_U
  double denominator = 0.0;  ///< dt sum w^T Q w + alpha (d, d)_U
  bool degenerate = false;   ///< denominator below 1e-300; rho is 0
};

/// Minimizer of the quadratic model along d. `max_abs_rho` clamps |rho| when set.
StepSize step_size(const DiscreteProblem& problem, const ControlTrajectory& g, const ControlTrajectory& d,
                   const SensitivityTrajectory& w, std::optional<double> max_abs_rho = std::nullopt);

/// Quadratic model Q(rho) of the objective along d with linearized states.
double quadratic_model(const DiscreteProblem& problem, const StateTrajectory& state,
                       const ControlTrajectory& u, const ControlTrajectory& d,
                       const SensitivityTrajectory& w, double rho);

}  // namespace bouss
