//
// bouss - boundary heat-flux control of Boussinesq flow
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <vector>

#include "bouss/state.hpp"

namespace bouss {

/// Backward multipliers, N+2 entries each; index 0 is unused and index N+1
/// holds the zero terminal data.
struct AdjointTrajectory {
  std::vector<Vector> z;        ///< projection velocity multiplier
  std::vector<Vector> z_tilde;  ///< intermediate-velocity multiplier
  std::vector<Vector> xi;       ///< pressure-increment multiplier
  std::vector<Vector> zeta;     ///< temperature multiplier

  int steps() const { return static_cast<int>(z.size()) - 2; }
};

/// Exact transpose of the forward sweep, driven by the objective's state loads.
AdjointTrajectory solve_adjoint(const DiscreteProblem& problem, const StateTrajectory& state);

/// g^n = zeta^n on the control nodes + alpha v^n (Riesz representer in U).
ControlTrajectory compute_gradient(const DiscreteProblem& problem, const AdjointTrajectory& adj,
                                   const ControlTrajectory& v);

}  // namespace bouss
