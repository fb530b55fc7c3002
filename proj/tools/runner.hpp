//
// bouss - boundary heat-flux control of Boussinesq flow
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <ostream>

#include "config.hpp"

namespace bouss::cli {

enum ExitCode : int {
  kSuccess = 0,
  kConfigError = 2,
  kSolverFailure = 3,
  kGradcheckFailure = 4,
};

/// Optimize and write config.ini, history.csv, summary.csv,
/// control_left.csv, control_right.csv, tracking_error.csv (tracking only),
/// vorticity.csv and snapshots/ into config.dir.
int run(const RunConfig& config, std::ostream& log);

/// Uncontrolled forward solve; writes baseline_* files next to the run output.
int baseline(const RunConfig& config, std::ostream& log);

/// Finite-difference gradient check at a seeded random control; writes
/// gradcheck.csv and gradient_left.csv / gradient_right.csv.
int gradcheck(const RunConfig& config, std::ostream& log);

/// Plain-text mesh dump of the fine (or coarse) mesh.
int mesh_dump(const RunConfig& config, bool coarse, std::ostream& out);

}  // namespace bouss::cli
