//
// bouss - boundary heat-flux control of Boussinesq flow
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <array>
#include <ostream>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "bouss/mesh.hpp"

namespace bouss {

using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

// Velocity fields are two stacked fine-space scalar coefficient vectors:
// entries [0, nv) hold y1 and [nv, 2 nv) hold y2.

enum class SpaceKind { ScalarFine, ScalarFineZero, PressureCoarse };

/// A P1 space on one mesh; dofs are node indices.
class FeSpace {
public:
  FeSpace(const Mesh& mesh, SpaceKind kind);

  const Mesh& mesh() const { return *mesh_; }
  SpaceKind kind() const { return kind_; }
  int size() const { return mesh_->num_nodes(); }
  /// Boundary dofs for ScalarFineZero, empty otherwise.
  const std::vector<int>& constrained_dofs() const { return constrained_; }
  bool zero_mean() const { return kind_ == SpaceKind::PressureCoarse; }

private:
  const Mesh* mesh_;
  SpaceKind kind_;
  std::vector<int> constrained_;
};

/// Area and constant basis gradients of one P1 triangle.
struct P1Element {
  double area;
  std::array<std::array<double, 2>, 3> grad;

  P1Element(const Mesh& mesh, int t);
};

SparseMatrix assemble_mass(const Mesh& mesh);
SparseMatrix assemble_mass(const FeSpace& space);

/// nu * integral of grad(phi_i) . grad(phi_j). Throws for nu <= 0.
SparseMatrix assemble_stiffness(const Mesh& mesh, double nu);
SparseMatrix assemble_stiffness(const FeSpace& space, double nu);

/// (q_i, y) -> integral of psi_q div(y): coarse P1 pressure rows against
/// stacked fine P1 velocity columns (np x 2 nv).
SparseMatrix assemble_divergence(const MeshPair& pair);

/// Scalar transport matrix E(y)_ij = integral of (y . grad phi_j) phi_i,
/// evaluated with the edge-midpoint rule (exact for P1 transport fields).
SparseMatrix assemble_convection_e(const Mesh& mesh, const Vector& transport);

/// Vector transport c(y, w, phi): block-diagonal copy of the scalar operator.
SparseMatrix assemble_convection_c(const Mesh& mesh, const Vector& transport);

/// Gradient with respect to the transport field of test^T E(y) field,
/// i.e. the vector integral of phi_j (grad field) test, size 2 nv.
Vector transport_sensitivity(const Mesh& mesh, const Vector& field, const Vector& test);

/// integral over the tagged boundary pieces of phi_i phi_j.
SparseMatrix assemble_boundary_mass(const Mesh& mesh, const TagSet& tags);

/// Elementwise-constant curl d y2/dx - d y1/dy.
struct CurlOperator {
  SparseMatrix curl;  ///< ntri x 2 nv
  Vector weights;     ///< triangle areas

  Vector apply(const Vector& velocity) const { return curl * velocity; }
  /// sum_T area(T) curl_T^2
  double form(const Vector& velocity) const;
  /// Curl^T W Curl
  SparseMatrix quadratic_form() const;
};

CurlOperator assemble_curl(const Mesh& mesh);

/// Block-diagonal [K 0; 0 K].
SparseMatrix block_diag2(const SparseMatrix& k);

/// max |K_ij - K_ji|
double max_asymmetry(const SparseMatrix& k);

/// Essential-constraint bookkeeping by row/column elimination.
class Constraints {
public:
  Constraints() = default;
  Constraints(int size, const std::vector<int>& constrained);

  int size() const { return static_cast<int>(mask_.size()); }
  bool is_constrained(int i) const { return mask_[i] != 0; }
  const std::vector<int>& indices() const { return indices_; }

  /// Copy of k with constrained rows and columns zeroed and a unit diagonal.
  SparseMatrix eliminate(const SparseMatrix& k) const;
  /// rhs - k * lift on free rows, prescribed values on constrained rows.
  /// Only the constrained entries of `values` are read.
  Vector lift_rhs(const SparseMatrix& k, const Vector& rhs, const Vector& values) const;
  /// Zero the constrained entries.
  void zero(Vector& v) const;
  /// Vector holding only the constrained entries of `values`.
  Vector lift(const Vector& values) const;

private:
  std::vector<char> mask_;
  std::vector<int> indices_;
};

/// Operators with constant coefficients, assembled once per mesh pair.
struct FemOperators {
  SparseMatrix mass;       ///< fine scalar mass (velocity componentwise and temperature)
  SparseMatrix stiffness;  ///< unit-coefficient fine stiffness
  SparseMatrix a;          ///< nu1 * stiffness
  SparseMatrix d;          ///< nu2 * stiffness
  SparseMatrix b;          ///< divergence coupling, np x 2 nv
  SparseMatrix pressure_mass;
  CurlOperator curl;

  static FemOperators build(const MeshPair& pair, double nu1, double nu2);
};

/// Coordinate-format dump: one `row col value` line per stored entry.
void write_matrix_coo(std::ostream& os, const SparseMatrix& k);

}  // namespace bouss
