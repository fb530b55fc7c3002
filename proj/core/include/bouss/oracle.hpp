//
// bouss - boundary heat-flux control of Boussinesq flow
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <vector>

#include <Eigen/Dense>

#include "bouss/problem.hpp"

// Reference implementations for tests. Nothing here calls the assembly
// routines in fem.hpp.

namespace bouss::oracle {

using DenseMatrix = Eigen::MatrixXd;

struct QuadraturePoint {
  double l1, l2, l3;  ///< barycentric coordinates
  double weight;      ///< fraction of the triangle area
};

/// Symmetric triangle rule exact for polynomials of the given degree (1..5).
const std::vector<QuadraturePoint>& triangle_rule(int degree);

/// integral over the mesh of f(x) with a rule of the given degree.
double quadrature_integrate(const Mesh& mesh, const std::function<double(Point)>& f, int degree);

/// integral of the product of the P1 interpolants of nodal vectors a and b.
double integrate_product(const Mesh& mesh, const Vector& a, const Vector& b);

DenseMatrix mass(const Mesh& mesh);
DenseMatrix stiffness(const Mesh& mesh, double nu);
/// np x 2 nv, coarse basis evaluated by point location in the coarse mesh.
DenseMatrix divergence(const MeshPair& pair);
DenseMatrix convection(const Mesh& mesh, const Vector& transport);
DenseMatrix boundary_mass(const Mesh& mesh, const TagSet& tags);
/// ntri x 2 nv elementwise curl.
DenseMatrix curl(const Mesh& mesh);
/// Gradient of test^T E(y) field with respect to y, column by column.
Vector transport_sensitivity(const Mesh& mesh, const Vector& field, const Vector& test);

/// Dense full-pivoting LU; throws std::invalid_argument above 5000 unknowns
/// and std::runtime_error when singular.
Vector dense_reference_solve(const DenseMatrix& k, const Vector& rhs);

/// max |a_ij - b_ij|
double max_entry_difference(const DenseMatrix& a, const SparseMatrix& b);

struct FdDirection {
  int id = 0;
  std::vector<double> eps;
  std::vector<double> fd;
  double adjoint = 0.0;  ///< (g, dv)_U
  std::vector<double> rel_error;
  double best_eps = 0.0;
  double best_error = 0.0;
};

struct FdCheckReport {
  std::vector<FdDirection> directions;

  bool passed(double tol) const;
  int num_passed(double tol) const;
  void write_text(std::ostream& os) const;
  void write_csv(std::ostream& os) const;
};

/// Default ladder 1e-2, 1e-3, ..., 1e-6.
std::vector<double> default_eps_ladder();

/// Central differences of J along pseudo-random U-unit directions against the
/// adjoint gradient. Throws std::invalid_argument beyond 1e4 fine dofs.
FdCheckReport fd_gradient_check(const DiscreteProblem& problem, const ControlTrajectory& v, int n_dirs,
                                std::uint64_t seed, const std::vector<double>& eps = default_eps_ladder());

/// Pseudo-random control with standard normal entries.
ControlTrajectory random_control(const DiscreteProblem& problem, std::uint64_t seed, double scale = 1.0);

}  // namespace bouss::oracle
