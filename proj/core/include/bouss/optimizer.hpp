//
// bouss - boundary heat-flux control of Boussinesq flow
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <deque>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "bouss/problem.hpp"

namespace bouss {

using InnerProduct = std::function<double(const ControlTrajectory&, const ControlTrajectory&)>;

/// Ring buffer of the m most recent (du, dg) pairs.
class LbfgsMemory {
public:
  struct Pair {
    ControlTrajectory du;
    ControlTrajectory dg;
    double eta;  ///< 1 / (dg, du)
  };

  LbfgsMemory(int m, InnerProduct inner);

  /// Stores the pair unless (dg, du) <= 0; returns whether it was stored.
  bool push(ControlTrajectory du, ControlTrajectory dg);

  int capacity() const { return m_; }
  int size() const { return static_cast<int>(pairs_.size()); }
  /// Oldest first.
  const std::deque<Pair>& pairs() const { return pairs_; }
  const InnerProduct& inner() const { return inner_; }
  int skipped() const { return skipped_; }

private:
  int m_;
  InnerProduct inner_;
  std::deque<Pair> pairs_;
  int skipped_ = 0;
};

/// d = -H g by the two-loop recursion with H0 = h0 * I.
ControlTrajectory two_loop_direction(const LbfgsMemory& mem, const ControlTrajectory& g, double h0 = 1.0);

struct IterationRecord {
  int k = 0;
  double J = 0.0;
  double grad_rel = 0.0;
  double rho = 0.0;
  double seconds = 0.0;
};

struct LbfgsOptions {
  int m = 5;
  double tol = 5e-3;
  int max_iter = 200;
  std::optional<double> max_abs_rho;
  /// Called after every accepted iterate with its record and control.
  std::function<void(const IterationRecord&, const ControlTrajectory&)> on_iterate;
};

struct LbfgsResult {
  ControlTrajectory u;  ///< best-J iterate
  double J = 0.0;
  int best_k = 0;
  bool converged = false;
  int skipped_pairs = 0;
  int fallbacks = 0;  ///< steepest-descent fallbacks on degenerate directions
  std::vector<IterationRecord> history;
};

/// NaN or Inf in the objective or gradient; carries the last finite iterate.
class NonfiniteObjective : public std::runtime_error {
public:
  NonfiniteObjective(int k, ControlTrajectory last_finite)
      : std::runtime_error("non-finite objective or gradient at iteration " + std::to_string(k)),
        k_(k),
        last_finite_(std::move(last_finite)) {}

  int iteration() const { return k_; }
  const ControlTrajectory& last_finite() const { return last_finite_; }

private:
  int k_;
  ControlTrajectory last_finite_;
};

/// L-BFGS with the linearized-model step size. Each iteration runs exactly one
/// state, one adjoint and one linearized solve.
LbfgsResult lbfgs_solve(const DiscreteProblem& problem, const ControlTrajectory& u0, const LbfgsOptions& opts);

}  // namespace bouss
