//
// bouss - boundary heat-flux control of Boussinesq flow
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <functional>
#include <map>
#include <memory>
#include <vector>

#include <Eigen/SparseLU>

#include "bouss/fem.hpp"
#include "bouss/mesh.hpp"

namespace bouss {

enum class Objective { Tracking, Vorticity };

/// Essential condition used by the projection step: only the normal
/// component (y.n = g.n), or the full velocity (y = g).
enum class ProjectionVariant { NormalTrace, FullDirichlet };

enum class VelocityBc {
  Wall,     ///< Dirichlet with the boundary velocity data (zero on walls)
  Inflow,   ///< Dirichlet with the boundary velocity data
  Outflow,  ///< natural (do-nothing)
};

struct ThetaBc {
  enum class Kind {
    Dirichlet,  ///< theta = value
    Insulated,  ///< zero flux
    Flux,       ///< nu2 dtheta/dn = v (control)
    Robin,      ///< nu2 dtheta/dn + theta = v (control)
  };
  Kind kind = Kind::Insulated;
  double value = 0.0;

  bool is_control() const { return kind == Kind::Flux || kind == Kind::Robin; }
};

using VelocityData = std::function<Point(Point x, double t)>;

/// Everything that defines one boundary-control problem instance.
struct ProblemSetup {
  std::shared_ptr<const MeshPair> mesh;
  double nu1 = 0.01;
  double nu2 = 1.0 / 72.0;
  double alpha = 5e-5;
  double final_time = 5.0;
  int steps = 64;

  std::map<SegmentTag, VelocityBc> velocity_bc;
  std::map<SegmentTag, ThetaBc> theta_bc;
  /// Dirichlet velocity data on Wall/Inflow segments; null means zero.
  VelocityData boundary_velocity;
  /// Target velocity for the tracking objective.
  VelocityData target;

  Objective objective = Objective::Tracking;
  ProjectionVariant projection = ProjectionVariant::NormalTrace;
  /// Drop the transport terms so the dynamics are linear in the control.
  bool frozen_convection = false;

  /// Initial fields on the fine mesh; empty means zero.
  Vector y0;
  Vector theta0;

  double dt() const { return final_time / steps; }
  /// Throws std::invalid_argument on an inconsistent setup.
  void validate() const;
};

/// phi(z) = z^2 (z - 1)^2 and its derivative.
double cavity_profile(double z);
double cavity_profile_derivative(double z);

/// Pinwheel target (100 phi(x) phi'(y), -100 phi'(x) phi(y)).
Point pinwheel_target(Point x);

/// Inflow ramp: linear up on (0,5], flat on (5,10), linear down on [10,15).
double inflow_ramp(double t);

/// Cavity tracking problem on the unit square, control on Left and Right.
ProblemSetup example1(int n, int steps, double final_time = 5.0);

/// Reactor vorticity problem, Robin control on both side walls.
ProblemSetup example2(int n, int steps, double final_time = 15.0);

/// Per-step boundary fields: steps[n-1] holds v^n on the control nodes.
class ControlTrajectory {
public:
  ControlTrajectory() = default;
  explicit ControlTrajectory(std::vector<Vector> steps) : steps_(std::move(steps)) {}

  static ControlTrajectory zeros(int num_steps, int dim);

  int num_steps() const { return static_cast<int>(steps_.size()); }
  int dim() const { return steps_.empty() ? 0 : static_cast<int>(steps_.front().size()); }

  /// v^n for n = 1..N.
  Vector& at(int n) { return steps_[n - 1]; }
  const Vector& at(int n) const { return steps_[n - 1]; }

  std::vector<Vector>& steps() { return steps_; }
  const std::vector<Vector>& steps() const { return steps_; }

  Vector flatten() const;
  static ControlTrajectory unflatten(const Vector& flat, int num_steps);

  bool all_finite() const;
  double max_abs() const;

  ControlTrajectory& operator+=(const ControlTrajectory& other);
  ControlTrajectory& operator-=(const ControlTrajectory& other);
  ControlTrajectory& operator*=(double s);
  /// this += s * x
  ControlTrajectory& axpy(double s, const ControlTrajectory& x);

  friend ControlTrajectory operator+(ControlTrajectory a, const ControlTrajectory& b) { return a += b; }
  friend ControlTrajectory operator-(ControlTrajectory a, const ControlTrajectory& b) { return a -= b; }
  friend ControlTrajectory operator*(double s, ControlTrajectory a) { return a *= s; }
  friend ControlTrajectory operator-(ControlTrajectory a) { return a *= -1.0; }

private:
  std::vector<Vector> steps_;
};

/// Sparse LU wrapper; `solve_transposed` reuses the same factorization.
class Factorization {
public:
  Factorization(const SparseMatrix& k, int step, const char* equation);

  Vector solve(const Vector& rhs) const;
  Vector solve_transposed(const Vector& rhs) const;

private:
  // SparseLU::transpose() needs a mutable object; solves do not alter the factors.
  mutable Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu_;
  int step_;
  const char* equation_;
};

/// Discretized problem: operators, constraints and the constant projection
/// factorization. Immutable after construction; safe to share across solves.
class DiscreteProblem {
public:
  explicit DiscreteProblem(ProblemSetup setup);

  const ProblemSetup& setup() const { return setup_; }
  const MeshPair& mesh() const { return *setup_.mesh; }
  const Mesh& fine() const { return setup_.mesh->fine; }
  const FemOperators& ops() const { return ops_; }

  int num_velocity_nodes() const { return fine().num_nodes(); }
  int num_pressure_nodes() const { return mesh().coarse.num_nodes(); }
  int num_controls() const { return static_cast<int>(control_nodes_.size()); }
  int steps() const { return setup_.steps; }
  double dt() const { return setup_.dt(); }
  double time(int n) const { return n * dt(); }

  /// Fine nodes carrying a control dof, sorted.
  const std::vector<int>& control_nodes() const { return control_nodes_; }
  /// nv x nc: boundary mass columns of the control nodes.
  const SparseMatrix& control_map() const { return control_map_; }
  /// nc x nc boundary mass on the control segments.
  const SparseMatrix& control_mass() const { return control_mass_; }
  /// Boundary mass on Robin segments (zero matrix when there are none).
  const SparseMatrix& robin() const { return robin_; }

  const Constraints& theta_constraints() const { return theta_constraints_; }
  /// Scalar constraint set shared by both intermediate-velocity components.
  const Constraints& tilde_constraints() const { return tilde_constraints_; }
  /// Constraint set on the stacked end-of-step velocity.
  const Constraints& projection_constraints() const { return projection_constraints_; }
  bool pressure_has_mean_constraint() const { return mean_constraint_; }

  Vector theta_boundary_values() const { return theta_values_; }
  /// Stacked nodal values of the boundary velocity data at time t.
  Vector velocity_boundary_values(double t) const;
  /// Nodal interpolation of the tracking target at t_n (zero if unset or for the vorticity objective).
  Vector target(int n) const;

  /// Block mass for tracking, curl form Curl^T W Curl for vorticity.
  const SparseMatrix& objective_operator() const { return objective_op_; }
  const SparseMatrix& velocity_mass() const { return velocity_mass_; }

  /// Temperature matrix M/dt + D + R + E(transport), before elimination.
  SparseMatrix theta_matrix(const Vector& transport) const;
  /// Scalar intermediate-velocity matrix M/dt + A + E(transport), before elimination.
  SparseMatrix tilde_matrix(const Vector& transport) const;

  /// Solve the (symmetric) eliminated projection system. rhs layout:
  /// [2 nv velocity rows | np pressure rows | optional mean multiplier].
  Vector solve_projection(const Vector& rhs) const;
  int projection_size() const;

  Vector initial_velocity() const;
  Vector initial_theta() const;

  /// (u, v) = dt sum_n u^n . Mc v^n
  double control_inner(const ControlTrajectory& a, const ControlTrajectory& b) const;
  double control_norm(const ControlTrajectory& a) const;
  ControlTrajectory zero_control() const;

  /// Arc-length coordinate along the segment carrying control node k
  /// (distance from the segment's lowest point).
  double control_arclength(int k) const;

private:
  ProblemSetup setup_;
  FemOperators ops_;
  std::vector<int> control_nodes_;
  SparseMatrix control_map_;
  SparseMatrix control_mass_;
  SparseMatrix robin_;
  Constraints theta_constraints_;
  Constraints tilde_constraints_;
  Constraints projection_constraints_;
  bool mean_constraint_ = false;
  Vector theta_values_;
  SparseMatrix objective_op_;
  SparseMatrix velocity_mass_;
  SparseMatrix theta_base_;
  SparseMatrix tilde_base_;
  std::unique_ptr<Factorization> projection_lu_;
};

}  // namespace bouss
