//
// bouss - boundary heat-flux control of Boussinesq flow
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <filesystem>
#include <ostream>
#include <vector>

#include "bouss/optimizer.hpp"
#include "bouss/state.hpp"

namespace bouss {

/// `k,J,grad_rel,rho,seconds`; seconds are written as 0 unless `timing`.
void write_history_csv(std::ostream& os, const std::vector<IterationRecord>& history, bool timing);

/// Long format `n,t,s,value` for the control nodes on one segment, ordered by
/// time step then arc length.
void write_control_csv(std::ostream& os, const DiscreteProblem& problem, const ControlTrajectory& u,
                       SegmentTag segment);

/// `n,t,rel_error`
void write_tracking_error_csv(std::ostream& os, const DiscreteProblem& problem, const StateTrajectory& state);

/// `n,t,vorticity` with vorticity = ||curl y^n||_{L2}
void write_vorticity_csv(std::ostream& os, const DiscreteProblem& problem, const StateTrajectory& state);

/// Nodal snapshot `x y y1 y2 theta p`, pressure interpolated to fine nodes.
void write_snapshot(std::ostream& os, const DiscreteProblem& problem, const StateTrajectory& state, int n);

/// Writes snapshots/state_nNNNN.txt for n = 0, stride, 2 stride, ..., and N.
void write_snapshots(const std::filesystem::path& dir, const DiscreteProblem& problem,
                     const StateTrajectory& state, int stride);

/// Coarse P1 pressure evaluated at the fine nodes.
Vector pressure_on_fine(const MeshPair& pair, const Vector& p);

}  // namespace bouss
