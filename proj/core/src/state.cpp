//
// bouss - boundary heat-flux control of Boussinesq flow
// SPDX-License-Identifier: Apache-2.0
//

#include "bouss/state.hpp"

#include <cmath>
#include <stdexcept>

#include "bouss/errors.hpp"

namespace bouss {

StateTrajectory solve_state(const DiscreteProblem& problem, const ControlTrajectory& v) {
  const int steps = problem.steps();
  const int nv = problem.num_velocity_nodes();
  const int np = problem.num_pressure_nodes();
  if (v.num_steps() != steps || v.dim() != problem.num_controls()) {
    throw std::invalid_argument("control trajectory does not match the problem dimensions");
  }
  const double dt = problem.dt();
  const FemOperators& ops = problem.ops();
  const Constraints& tc = problem.theta_constraints();
  const Constraints& yc = problem.tilde_constraints();
  const Constraints& pc = problem.projection_constraints();
  const Vector theta_values = problem.theta_boundary_values();

  StateTrajectory s;
  s.y.assign(steps + 1, Vector());
  s.y_tilde.assign(steps + 1, Vector::Zero(2 * nv));
  s.p.assign(steps + 1, Vector::Zero(np));
  s.theta.assign(steps + 1, Vector());
  s.y[0] = problem.initial_velocity();
  s.theta[0] = problem.initial_theta();

  for (int n = 1; n <= steps; ++n) {
    const Vector& y_prev = s.y[n - 1];

    const SparseMatrix k_theta = problem.theta_matrix(y_prev);
    const Vector rhs_theta = ops.mass * s.theta[n - 1] / dt + problem.control_map() * v.at(n);
    const Factorization lu_theta(tc.eliminate(k_theta), n, "temperature");
    s.theta[n] = lu_theta.solve(tc.lift_rhs(k_theta, rhs_theta, theta_values));

    const Vector boundary = problem.velocity_boundary_values(problem.time(n));
    const SparseMatrix k_y = problem.tilde_matrix(y_prev);
    const Factorization lu_y(yc.eliminate(k_y), n, "momentum");
    const Vector bp = ops.b.transpose() * s.p[n - 1];
    for (int k = 0; k < 2; ++k) {
      Vector rhs = ops.mass * y_prev.segment(k * nv, nv) / dt + bp.segment(k * nv, nv);
      if (k == 1) rhs += ops.mass * s.theta[n];
      const Vector values = boundary.segment(k * nv, nv);
      s.y_tilde[n].segment(k * nv, nv) = lu_y.solve(yc.lift_rhs(k_y, rhs, values));
    }

    const Vector lift = pc.lift(boundary);
    Vector rhs = Vector::Zero(problem.projection_size());
    rhs.head(2 * nv) = problem.velocity_mass() * (s.y_tilde[n] - lift) / dt;
    for (int i : pc.indices()) rhs[i] = boundary[i];
    rhs.segment(2 * nv, np) = ops.b * lift;
    Vector sol;
    try {
      sol = problem.solve_projection(rhs);
    } catch (const SolverError& e) {
      throw SolverError(n, "projection", e.what());
    }
    s.y[n] = sol.head(2 * nv);
    s.p[n] = s.p[n - 1] + sol.segment(2 * nv, np);
  }
  return s;
}

Vector interpolate_target(const DiscreteProblem& problem, int n) { return problem.target(n); }

double state_objective(const DiscreteProblem& problem, const StateTrajectory& state) {
  const SparseMatrix& q = problem.objective_operator();
  double sum = 0.0;
  for (int n = 1; n <= state.steps(); ++n) {
    const Vector e = state.y[n] - problem.target(n);
    sum += e.dot(q * e);
  }
  return 0.5 * problem.dt() * sum;
}

double control_penalty(const DiscreteProblem& problem, const ControlTrajectory& v) {
  return 0.5 * problem.setup().alpha * problem.control_inner(v, v);
}

double evaluate_objective(const DiscreteProblem& problem, const StateTrajectory& state,
                          const ControlTrajectory& v) {
  return state_objective(problem, state) + control_penalty(problem, v);
}

Vector objective_load(const DiscreteProblem& problem, const StateTrajectory& state, int n) {
  return problem.dt() * (problem.objective_operator() * (state.y[n] - problem.target(n)));
}

double relative_tracking_error(const DiscreteProblem& problem, const Vector& y, int n) {
  const Vector yd = problem.target(n);
  const SparseMatrix& m = problem.velocity_mass();
  const Vector e = y - yd;
  const double den = std::sqrt(yd.dot(m * yd));
  return std::sqrt(e.dot(m * e)) / den;
}

double vorticity_norm2(const DiscreteProblem& problem, const Vector& y) {
  return problem.ops().curl.form(y);
}

double divergence_residual(const DiscreteProblem& problem, const Vector& y) {
  const Vector r = problem.ops().b * y;
  return r.size() ? r.cwiseAbs().maxCoeff() : 0.0;
}

}  // namespace bouss
