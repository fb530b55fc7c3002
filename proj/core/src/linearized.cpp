//
// bouss - boundary heat-flux control of Boussinesq flow
// SPDX-License-Identifier: Apache-2.0
//

#include "bouss/linearized.hpp"

#include <algorithm>

#include "bouss/errors.hpp"

namespace bouss {

SensitivityTrajectory solve_linearized(const DiscreteProblem& problem, const StateTrajectory& state,
                                       const ControlTrajectory& d) {
  const int steps = problem.steps();
  const int nv = problem.num_velocity_nodes();
  const int np = problem.num_pressure_nodes();
  const double dt = problem.dt();
  const FemOperators& ops = problem.ops();
  const Mesh& mesh = problem.fine();
  const bool transport = !problem.setup().frozen_convection;
  const Constraints& tc = problem.theta_constraints();
  const Constraints& yc = problem.tilde_constraints();
  const Constraints& pc = problem.projection_constraints();

  SensitivityTrajectory s;
  s.w.assign(steps + 1, Vector::Zero(2 * nv));
  s.w_tilde.assign(steps + 1, Vector::Zero(2 * nv));
  s.q.assign(steps + 1, Vector::Zero(np));
  s.phi.assign(steps + 1, Vector::Zero(nv));

  for (int n = 1; n <= steps; ++n) {
    const Vector& y_prev = state.y[n - 1];
    const Vector& w_prev = s.w[n - 1];
    SparseMatrix e_w;
    if (transport) e_w = assemble_convection_e(mesh, w_prev);

    const SparseMatrix k_theta = problem.theta_matrix(y_prev);
    Vector rhs_theta = ops.mass * s.phi[n - 1] / dt + problem.control_map() * d.at(n);
    if (transport) rhs_theta -= e_w * state.theta[n];
    tc.zero(rhs_theta);
    const Factorization lu_theta(tc.eliminate(k_theta), n, "linearized temperature");
    s.phi[n] = lu_theta.solve(rhs_theta);

    const SparseMatrix k_y = problem.tilde_matrix(y_prev);
    const Factorization lu_y(yc.eliminate(k_y), n, "linearized momentum");
    const Vector bq = ops.b.transpose() * s.q[n - 1];
    for (int k = 0; k < 2; ++k) {
      Vector rhs = ops.mass * w_prev.segment(k * nv, nv) / dt + bq.segment(k * nv, nv);
      if (k == 1) rhs += ops.mass * s.phi[n];
      if (transport) rhs -= e_w * state.y_tilde[n].segment(k * nv, nv);
      yc.zero(rhs);
      s.w_tilde[n].segment(k * nv, nv) = lu_y.solve(rhs);
    }

    Vector rhs = Vector::Zero(problem.projection_size());
    rhs.head(2 * nv) = problem.velocity_mass() * s.w_tilde[n] / dt;
    pc.zero(rhs);
    Vector sol;
    try {
      sol = problem.solve_projection(rhs);
    } catch (const SolverError& e) {
      throw SolverError(n, "linearized projection", e.what());
    }
    s.w[n] = sol.head(2 * nv);
    s.q[n] = s.q[n - 1] + sol.segment(2 * nv, np);
  }
  return s;
}

StepSize step_size(const DiscreteProblem& problem, const ControlTrajectory& g, const ControlTrajectory& d,
                   const SensitivityTrajectory& w, std::optional<double> max_abs_rho) {
  const SparseMatrix& q = problem.objective_operator();
  double state_term = 0.0;
  for (int n = 1; n <= w.steps(); ++n) state_term += w.w[n].dot(q * w.w[n]);
  StepSize out;
  out.numerator = problem.control_inner(g, d);
  out.denominator = problem.dt() * state_term + problem.setup().alpha * problem.control_inner(d, d);
  if (!(out.denominator >= 1e-300)) {
    out.degenerate = true;
    return out;
  }
  out.rho = -out.numerator / out.denominator;
  if (max_abs_rho) out.rho = std::clamp(out.rho, -*max_abs_rho, *max_abs_rho);
  return out;
}

double quadratic_model(const DiscreteProblem& problem, const StateTrajectory& state,
                       const ControlTrajectory& u, const ControlTrajectory& d,
                       const SensitivityTrajectory& w, double rho) {
  const SparseMatrix& q = problem.objective_operator();
  double sum = 0.0;
  for (int n = 1; n <= state.steps(); ++n) {
    const Vector e = state.y[n] + rho * w.w[n] - problem.target(n);
    sum += e.dot(q * e);
  }
  const ControlTrajectory v = u + rho * d;
  return 0.5 * problem.dt() * sum + 0.5 * problem.setup().alpha * problem.control_inner(v, v);
}

}  // namespace bouss
