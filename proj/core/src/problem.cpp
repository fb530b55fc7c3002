//
// bouss - boundary heat-flux control of Boussinesq flow
// SPDX-License-Identifier: Apache-2.0
//

#include "bouss/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "bouss/errors.hpp"

namespace bouss {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

TagSet mesh_tags(const Mesh& mesh) {
  TagSet tags;
  for (const auto& e : mesh.boundary_edges()) tags.insert(e.tag);
  return tags;
}

bool edge_is_vertical(const Mesh& mesh, const BoundaryEdge& e) {
  return std::abs(mesh.nodes()[e.nodes[0]].x - mesh.nodes()[e.nodes[1]].x) < 1e-14;
}

bool edge_is_horizontal(const Mesh& mesh, const BoundaryEdge& e) {
  return std::abs(mesh.nodes()[e.nodes[0]].y - mesh.nodes()[e.nodes[1]].y) < 1e-14;
}

}  // namespace

void ProblemSetup::validate() const {
  if (!mesh) throw std::invalid_argument("problem has no mesh");
  if (!(nu1 > 0.0) || !(nu2 > 0.0)) throw std::invalid_argument("diffusivities must be positive");
  if (!(alpha > 0.0)) throw std::invalid_argument("regularization weight must be positive");
  if (!(final_time > 0.0)) throw std::invalid_argument("final time must be positive");
  if (steps < 1) throw std::invalid_argument("need at least one time step");
  bool any_control = false;
  for (SegmentTag tag : mesh_tags(mesh->fine)) {
    if (!velocity_bc.contains(tag)) {
      throw std::invalid_argument("no velocity condition for segment " + std::string(tag_name(tag)));
    }
    auto it = theta_bc.find(tag);
    if (it == theta_bc.end()) {
      throw std::invalid_argument("no temperature condition for segment " +
                                  std::string(tag_name(tag)));
    }
    any_control = any_control || it->second.is_control();
  }
  if (!any_control) throw std::invalid_argument("no control segment");
  if (objective == Objective::Tracking && !target) {
    throw std::invalid_argument("tracking objective needs a target velocity");
  }
  const int nv = mesh->fine.num_nodes();
  if (y0.size() != 0 && y0.size() != 2 * nv) throw std::invalid_argument("initial velocity size");
  if (theta0.size() != 0 && theta0.size() != nv) throw std::invalid_argument("initial temperature size");
}

double cavity_profile(double z) { return z * z * (z - 1.0) * (z - 1.0); }

double cavity_profile_derivative(double z) { return 2.0 * z * (z - 1.0) * (2.0 * z - 1.0); }

Point pinwheel_target(Point x) {
  return {100.0 * cavity_profile(x.x) * cavity_profile_derivative(x.y),
          -100.0 * cavity_profile_derivative(x.x) * cavity_profile(x.y)};
}

double inflow_ramp(double t) {
  if (t <= 0.0) return 0.0;
  if (t <= 5.0) return t / 5.0;
  if (t < 10.0) return 1.0;
  if (t < 15.0) return (15.0 - t) / 5.0;
  return 0.0;
}

ProblemSetup example1(int n, int steps, double final_time) {
  ProblemSetup s;
  s.mesh = std::make_shared<const MeshPair>(build_unit_square(n));
  s.nu1 = 1.0 / 100.0;
  s.nu2 = 1.0 / 72.0;
  s.alpha = 5e-5;
  s.final_time = final_time;
  s.steps = steps;
  for (SegmentTag tag : {SegmentTag::Left, SegmentTag::Right, SegmentTag::Top, SegmentTag::Bottom}) {
    s.velocity_bc[tag] = VelocityBc::Wall;
  }
  s.theta_bc[SegmentTag::Left] = {ThetaBc::Kind::Flux, 0.0};
  s.theta_bc[SegmentTag::Right] = {ThetaBc::Kind::Flux, 0.0};
  s.theta_bc[SegmentTag::Top] = {ThetaBc::Kind::Dirichlet, 0.0};
  s.theta_bc[SegmentTag::Bottom] = {ThetaBc::Kind::Dirichlet, 0.0};
  s.target = [](Point x, double) { return pinwheel_target(x); };
  s.objective = Objective::Tracking;
  return s;
}

ProblemSetup example2(int n, int steps, double final_time) {
  ProblemSetup s;
  s.mesh = std::make_shared<const MeshPair>(build_reactor(n));
  s.nu1 = 1.0 / 100.0;
  s.nu2 = 1.0 / 72.0;
  s.alpha = 1e-4;
  s.final_time = final_time;
  s.steps = steps;
  s.velocity_bc = {
      {SegmentTag::Susceptor, VelocityBc::Wall},     {SegmentTag::SideWallLeft, VelocityBc::Wall},
      {SegmentTag::SideWallRight, VelocityBc::Wall}, {SegmentTag::InletWall, VelocityBc::Wall},
      {SegmentTag::Inlet, VelocityBc::Inflow},       {SegmentTag::OutletLeft, VelocityBc::Outflow},
      {SegmentTag::OutletRight, VelocityBc::Outflow},
  };
  s.theta_bc = {
      {SegmentTag::Susceptor, {ThetaBc::Kind::Dirichlet, 1.0}},
      {SegmentTag::InletWall, {ThetaBc::Kind::Dirichlet, 0.0}},
      {SegmentTag::Inlet, {ThetaBc::Kind::Dirichlet, 0.0}},
      {SegmentTag::OutletLeft, {ThetaBc::Kind::Insulated, 0.0}},
      {SegmentTag::OutletRight, {ThetaBc::Kind::Insulated, 0.0}},
      {SegmentTag::SideWallLeft, {ThetaBc::Kind::Robin, 0.0}},
      {SegmentTag::SideWallRight, {ThetaBc::Kind::Robin, 0.0}},
  };
  s.boundary_velocity = [](Point x, double t) -> Point {
    if (x.y > 4.0 / 3.0 - 1e-12 && x.x >= 1.0 / 3.0 && x.x <= 2.0 / 3.0) {
      return {0.0, -4.0 * (x.x - 1.0 / 3.0) * (2.0 / 3.0 - x.x) * inflow_ramp(t)};
    }
    return {0.0, 0.0};
  };
  s.objective = Objective::Vorticity;
  return s;
}

ControlTrajectory ControlTrajectory::zeros(int num_steps, int dim) {
  return ControlTrajectory(std::vector<Vector>(num_steps, Vector::Zero(dim)));
}

Vector ControlTrajectory::flatten() const {
  const int d = dim();
  Vector flat(num_steps() * d);
  for (int n = 0; n < num_steps(); ++n) flat.segment(n * d, d) = steps_[n];
  return flat;
}

ControlTrajectory ControlTrajectory::unflatten(const Vector& flat, int num_steps) {
  const int d = static_cast<int>(flat.size()) / num_steps;
  std::vector<Vector> steps(num_steps);
  for (int n = 0; n < num_steps; ++n) steps[n] = flat.segment(n * d, d);
  return ControlTrajectory(std::move(steps));
}

bool ControlTrajectory::all_finite() const {
  return std::all_of(steps_.begin(), steps_.end(), [](const Vector& v) { return v.allFinite(); });
}

double ControlTrajectory::max_abs() const {
  double m = 0.0;
  for (const auto& v : steps_) {
    if (v.size() > 0) m = std::max(m, v.cwiseAbs().maxCoeff());
  }
  return m;
}

ControlTrajectory& ControlTrajectory::operator+=(const ControlTrajectory& other) {
  for (std::size_t n = 0; n < steps_.size(); ++n) steps_[n] += other.steps_[n];
  return *this;
}

ControlTrajectory& ControlTrajectory::operator-=(const ControlTrajectory& other) {
  for (std::size_t n = 0; n < steps_.size(); ++n) steps_[n] -= other.steps_[n];
  return *this;
}

ControlTrajectory& ControlTrajectory::operator*=(double s) {
  for (auto& v : steps_) v *= s;
  return *this;
}

ControlTrajectory& ControlTrajectory::axpy(double s, const ControlTrajectory& x) {
  for (std::size_t n = 0; n < steps_.size(); ++n) steps_[n] += s * x.steps_[n];
  return *this;
}

Factorization::Factorization(const SparseMatrix& k, int step, const char* equation)
    : step_(step), equation_(equation) {
  lu_.compute(k);
  if (lu_.info() != Eigen::Success) {
    throw SolverError(step, equation, "sparse LU factorization failed (singular system)");
  }
}

Vector Factorization::solve(const Vector& rhs) const {
  Vector x = lu_.solve(rhs);
  if (lu_.info() != Eigen::Success || !x.allFinite()) {
    throw SolverError(step_, equation_, "sparse solve produced a non-finite result");
  }
  return x;
}

Vector Factorization::solve_transposed(const Vector& rhs) const {
  Vector x = lu_.transpose().solve(rhs);
  if (!x.allFinite()) throw SolverError(step_, equation_, "transposed solve produced a non-finite result");
  return x;
}

DiscreteProblem::DiscreteProblem(ProblemSetup setup) : setup_(std::move(setup)) {
  setup_.validate();
  const Mesh& mesh = fine();
  const int nv = mesh.num_nodes();
  const double dt = setup_.dt();
  ops_ = FemOperators::build(*setup_.mesh, setup_.nu1, setup_.nu2);

  TagSet control_tags;
  TagSet robin_tags;
  TagSet dirichlet_theta_tags;
  TagSet dirichlet_velocity_tags;
  for (const auto& [tag, bc] : setup_.theta_bc) {
    if (!mesh.has_tag(tag)) continue;
    if (bc.is_control()) control_tags.insert(tag);
    if (bc.kind == ThetaBc::Kind::Robin) robin_tags.insert(tag);
    if (bc.kind == ThetaBc::Kind::Dirichlet) dirichlet_theta_tags.insert(tag);
  }
  for (const auto& [tag, bc] : setup_.velocity_bc) {
    if (mesh.has_tag(tag) && bc != VelocityBc::Outflow) dirichlet_velocity_tags.insert(tag);
  }

  // Control space: nodal P1 traces on the control segments.
  control_nodes_ = mesh.nodes_with_tags(control_tags);
  const int nc = num_controls();
  const SparseMatrix gamma_mass = assemble_boundary_mass(mesh, control_tags);
  SparseMatrix select(nv, nc);
  {
    Triplets trips;
    for (int k = 0; k < nc; ++k) trips.emplace_back(control_nodes_[k], k, 1.0);
    select.setFromTriplets(trips.begin(), trips.end());
  }
  control_map_ = gamma_mass * select;
  control_mass_ = SparseMatrix(select.transpose() * control_map_);
  robin_ = robin_tags.empty() ? SparseMatrix(nv, nv) : assemble_boundary_mass(mesh, robin_tags);

  // Temperature: Dirichlet nodes take the value of an adjacent Dirichlet segment.
  theta_values_ = Vector::Zero(nv);
  {
    std::vector<int> fixed;
    for (int node : mesh.nodes_with_tags(dirichlet_theta_tags)) {
      fixed.push_back(node);
      for (SegmentTag tag : mesh.node_tags(node)) {
        if (dirichlet_theta_tags.contains(tag)) {
          theta_values_[node] = setup_.theta_bc.at(tag).value;
          break;
        }
      }
    }
    theta_constraints_ = Constraints(nv, fixed);
  }

  tilde_constraints_ = Constraints(nv, mesh.nodes_with_tags(dirichlet_velocity_tags));

  {
    std::set<int> fixed;
    for (const auto& e : mesh.boundary_edges()) {
      if (!dirichlet_velocity_tags.contains(e.tag)) continue;
      for (int node : e.nodes) {
        if (setup_.projection == ProjectionVariant::FullDirichlet) {
          fixed.insert(node);
          fixed.insert(nv + node);
        } else if (edge_is_vertical(mesh, e)) {
          fixed.insert(node);
        } else if (edge_is_horizontal(mesh, e)) {
          fixed.insert(nv + node);
        } else {
          throw std::invalid_argument("normal-trace projection needs axis-aligned boundary edges");
        }
      }
    }
    projection_constraints_ = Constraints(2 * nv, {fixed.begin(), fixed.end()});
  }

  velocity_mass_ = block_diag2(ops_.mass);
  objective_op_ = setup_.objective == Objective::Tracking ? velocity_mass_ : ops_.curl.quadratic_form();
  theta_base_ = ops_.mass / dt + ops_.d + robin_;
  tilde_base_ = ops_.mass / dt + ops_.a;

  // B with constrained velocity columns removed.
  const int np = num_pressure_nodes();
  SparseMatrix b_free = ops_.b;
  {
    Triplets trips;
    for (int col = 0; col < ops_.b.outerSize(); ++col) {
      if (projection_constraints_.is_constrained(col)) continue;
      for (SparseMatrix::InnerIterator it(ops_.b, col); it; ++it) trips.emplace_back(it.row(), it.col(), it.value());
    }
    b_free.setZero();
    b_free.setFromTriplets(trips.begin(), trips.end());
  }

  // Constant pressures lie in the kernel of the discrete gradient exactly when
  // no free velocity dof has a boundary flux; then fix the mean.
  {
    const Vector ones = Vector::Ones(np);
    const Vector flux = b_free.transpose() * ones;
    double bmax = 0.0;
    for (int col = 0; col < ops_.b.outerSize(); ++col) {
      for (SparseMatrix::InnerIterator it(ops_.b, col); it; ++it) bmax = std::max(bmax, std::abs(it.value()));
    }
    mean_constraint_ = flux.cwiseAbs().maxCoeff() < 1e-10 * bmax;
  }

  const int size = projection_size();
  Triplets trips;
  const SparseMatrix mv = projection_constraints_.eliminate(velocity_mass_ / dt);
  for (int col = 0; col < mv.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(mv, col); it; ++it) trips.emplace_back(it.row(), it.col(), it.value());
  }
  for (int col = 0; col < b_free.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(b_free, col); it; ++it) {
      trips.emplace_back(2 * nv + it.row(), it.col(), -it.value());
      trips.emplace_back(it.col(), 2 * nv + it.row(), -it.value());
    }
  }
  if (mean_constraint_) {
    const Vector m = ops_.pressure_mass * Vector::Ones(np);
    for (int q = 0; q < np; ++q) {
      trips.emplace_back(2 * nv + q, size - 1, m[q]);
      trips.emplace_back(size - 1, 2 * nv + q, m[q]);
    }
  }
  SparseMatrix saddle(size, size);
  saddle.setFromTriplets(trips.begin(), trips.end());
  projection_lu_ = std::make_unique<Factorization>(saddle, 0, "projection");
}

int DiscreteProblem::projection_size() const {
  return 2 * num_velocity_nodes() + num_pressure_nodes() + (mean_constraint_ ? 1 : 0);
}

Vector DiscreteProblem::solve_projection(const Vector& rhs) const { return projection_lu_->solve(rhs); }

Vector DiscreteProblem::velocity_boundary_values(double t) const {
  const int nv = num_velocity_nodes();
  Vector values = Vector::Zero(2 * nv);
  if (!setup_.boundary_velocity) return values;
  for (int i = 0; i < nv; ++i) {
    const Point g = setup_.boundary_velocity(fine().nodes()[i], t);
    values[i] = g.x;
    values[nv + i] = g.y;
  }
  return values;
}

Vector DiscreteProblem::target(int n) const {
  const int nv = num_velocity_nodes();
  Vector values = Vector::Zero(2 * nv);
  if (!setup_.target || setup_.objective == Objective::Vorticity) return values;
  for (int i = 0; i < nv; ++i) {
    const Point g = setup_.target(fine().nodes()[i], time(n));
    values[i] = g.x;
    values[nv + i] = g.y;
  }
  return values;
}

SparseMatrix DiscreteProblem::theta_matrix(const Vector& transport) const {
  if (setup_.frozen_convection) return theta_base_;
  return theta_base_ + assemble_convection_e(fine(), transport);
}

SparseMatrix DiscreteProblem::tilde_matrix(const Vector& transport) const {
  if (setup_.frozen_convection) return tilde_base_;
  return tilde_base_ + assemble_convection_e(fine(), transport);
}

Vector DiscreteProblem::initial_velocity() const {
  return setup_.y0.size() ? setup_.y0 : Vector::Zero(2 * num_velocity_nodes());
}

Vector DiscreteProblem::initial_theta() const {
  return setup_.theta0.size() ? setup_.theta0 : Vector::Zero(num_velocity_nodes());
}

double DiscreteProblem::control_inner(const ControlTrajectory& a, const ControlTrajectory& b) const {
  double sum = 0.0;
  for (int n = 1; n <= a.num_steps(); ++n) sum += a.at(n).dot(control_mass_ * b.at(n));
  return dt() * sum;
}

double DiscreteProblem::control_norm(const ControlTrajectory& a) const {
  return std::sqrt(std::max(0.0, control_inner(a, a)));
}

ControlTrajectory DiscreteProblem::zero_control() const {
  return ControlTrajectory::zeros(steps(), num_controls());
}

double DiscreteProblem::control_arclength(int k) const {
  const Mesh& mesh = fine();
  const int node = control_nodes_[k];
  const Point& p = mesh.nodes()[node];
  for (SegmentTag tag : mesh.node_tags(node)) {
    if (!setup_.theta_bc.at(tag).is_control()) continue;
    double xmin = std::numeric_limits<double>::max();
    double ymin = xmin;
    bool vertical = true;
    for (const auto& e : mesh.boundary_edges()) {
      if (e.tag != tag) continue;
      vertical = vertical && edge_is_vertical(mesh, e);
      for (int v : e.nodes) {
        xmin = std::min(xmin, mesh.nodes()[v].x);
        ymin = std::min(ymin, mesh.nodes()[v].y);
      }
    }
    return vertical ? p.y - ymin : p.x - xmin;
  }
  return 0.0;
}

}  // namespace bouss
