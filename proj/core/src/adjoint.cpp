//
// bouss - boundary heat-flux control of Boussinesq flow
// SPDX-License-Identifier: Apache-2.0
//

#include "bouss/adjoint.hpp"

#include "bouss/errors.hpp"

namespace bouss {

AdjointTrajectory solve_adjoint(const DiscreteProblem& problem, const StateTrajectory& state) {
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

  AdjointTrajectory adj;
  adj.z.assign(steps + 2, Vector::Zero(2 * nv));
  adj.z_tilde.assign(steps + 2, Vector::Zero(2 * nv));
  adj.xi.assign(steps + 2, Vector::Zero(np));
  adj.zeta.assign(steps + 2, Vector::Zero(nv));

  // Loads on y^n, p^n, theta^n carried backward.
  Vector load_y = objective_load(problem, state, steps);
  Vector load_p = Vector::Zero(np);
  Vector load_theta = Vector::Zero(nv);

  for (int n = steps; n >= 1; --n) {
    const Vector& y_prev = state.y[n - 1];

    // Projection.
    Vector rhs = Vector::Zero(problem.projection_size());
    rhs.head(2 * nv) = load_y;
    pc.zero(rhs);
    rhs.segment(2 * nv, np) = load_p;
    Vector a;
    try {
      a = problem.solve_projection(rhs);
    } catch (const SolverError& e) {
      throw SolverError(n, "adjoint projection", e.what());
    }
    Vector a_y = a.head(2 * nv);
    pc.zero(a_y);
    adj.z[n] = a_y / dt;
    adj.xi[n] = a.segment(2 * nv, np) / dt;
    const Vector load_tilde = problem.velocity_mass() * a_y / dt;

    Vector next_y = Vector::Zero(2 * nv);
    Vector next_p = load_p;

    // Intermediate velocity.
    const SparseMatrix k_y = problem.tilde_matrix(y_prev);
    const Factorization lu_y(yc.eliminate(k_y), n, "adjoint momentum");
    for (int k = 0; k < 2; ++k) {
      Vector b = load_tilde.segment(k * nv, nv);
      yc.zero(b);
      const Vector mu = lu_y.solve_transposed(b);
      adj.z_tilde[n].segment(k * nv, nv) = mu / dt;
      next_y.segment(k * nv, nv) += ops.mass * mu / dt;
      next_p += ops.b.middleCols(k * nv, nv) * mu;
      if (k == 1) load_theta += ops.mass * mu;
      if (transport) {
        next_y -= transport_sensitivity(mesh, state.y_tilde[n].segment(k * nv, nv), mu);
      }
    }

    // Temperature.
    const SparseMatrix k_theta = problem.theta_matrix(y_prev);
    const Factorization lu_theta(tc.eliminate(k_theta), n, "adjoint temperature");
    tc.zero(load_theta);
    const Vector nu = lu_theta.solve_transposed(load_theta);
    adj.zeta[n] = nu / dt;
    load_theta = ops.mass * nu / dt;
    if (transport) next_y -= transport_sensitivity(mesh, state.theta[n], nu);

    if (n - 1 >= 1) next_y += objective_load(problem, state, n - 1);
    load_y = std::move(next_y);
    load_p = std::move(next_p);
  }
  return adj;
}

ControlTrajectory compute_gradient(const DiscreteProblem& problem, const AdjointTrajectory& adj,
                                   const ControlTrajectory& v) {
  const auto& nodes = problem.control_nodes();
  const double alpha = problem.setup().alpha;
  ControlTrajectory g = problem.zero_control();
  for (int n = 1; n <= problem.steps(); ++n) {
    for (std::size_t k = 0; k < nodes.size(); ++k) g.at(n)[k] = adj.zeta[n][nodes[k]];
    g.at(n) += alpha * v.at(n);
  }
  return g;
}

}  // namespace bouss
