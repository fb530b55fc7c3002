//
// bouss - boundary heat-flux control of Boussinesq flow
// SPDX-License-Identifier: Apache-2.0
//

#include "bouss/fem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bouss {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

SparseMatrix from_triplets(int rows, int cols, const Triplets& trips) {
  SparseMatrix k(rows, cols);
  k.setFromTriplets(trips.begin(), trips.end());
  return k;
}

}  // namespace

FeSpace::FeSpace(const Mesh& mesh, SpaceKind kind) : mesh_(&mesh), kind_(kind) {
  if (kind == SpaceKind::ScalarFineZero) {
    TagSet all;
    for (const auto& e : mesh.boundary_edges()) all.insert(e.tag);
    constrained_ = mesh.nodes_with_tags(all);
  }
}

P1Element::P1Element(const Mesh& mesh, int t) : area(mesh.signed_area(t)) {
  const auto& tri = mesh.triangles()[t];
  for (int k = 0; k < 3; ++k) {
    const Point& p1 = mesh.nodes()[tri[(k + 1) % 3]];
    const Point& p2 = mesh.nodes()[tri[(k + 2) % 3]];
    grad[k] = {(p1.y - p2.y) / (2.0 * area), (p2.x - p1.x) / (2.0 * area)};
  }
}

SparseMatrix assemble_mass(const Mesh& mesh) {
  Triplets trips;
  trips.reserve(9 * mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const double s = mesh.signed_area(t) / 12.0;
    const auto& tri = mesh.triangles()[t];
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) trips.emplace_back(tri[i], tri[j], i == j ? 2.0 * s : s);
    }
  }
  return from_triplets(mesh.num_nodes(), mesh.num_nodes(), trips);
}

SparseMatrix assemble_mass(const FeSpace& space) { return assemble_mass(space.mesh()); }

SparseMatrix assemble_stiffness(const Mesh& mesh, double nu) {
  if (!(nu > 0.0)) throw std::invalid_argument("stiffness coefficient must be positive");
  Triplets trips;
  trips.reserve(9 * mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const P1Element el(mesh, t);
    const auto& tri = mesh.triangles()[t];
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const double g = el.grad[i][0] * el.grad[j][0] + el.grad[i][1] * el.grad[j][1];
        trips.emplace_back(tri[i], tri[j], nu * el.area * g);
      }
    }
  }
  return from_triplets(mesh.num_nodes(), mesh.num_nodes(), trips);
}

SparseMatrix assemble_stiffness(const FeSpace& space, double nu) {
  return assemble_stiffness(space.mesh(), nu);
}

SparseMatrix assemble_divergence(const MeshPair& pair) {
  const Mesh& fine = pair.fine;
  const Mesh& coarse = pair.coarse;
  if (static_cast<int>(pair.fine_parent.size()) != fine.num_triangles()) {
    throw std::invalid_argument("mesh pair parent map does not match the fine mesh");
  }
  const int nv = fine.num_nodes();
  Triplets trips;
  trips.reserve(18 * fine.num_triangles());
  for (int t = 0; t < fine.num_triangles(); ++t) {
    const P1Element el(fine, t);
    const auto& tri = fine.triangles()[t];
    Point c{0.0, 0.0};
    for (int k : tri) {
      c.x += fine.nodes()[k].x / 3.0;
      c.y += fine.nodes()[k].y / 3.0;
    }
    // Coarse basis functions on the parent are linear, so their integral over
    // the child equals area times the centroid value.
    const int parent = pair.fine_parent[t];
    const P1Element pel(coarse, parent);
    const auto& ptri = coarse.triangles()[parent];
    const Point& p0 = coarse.nodes()[ptri[0]];
    for (int q = 0; q < 3; ++q) {
      // psi_q(x) = delta_{q0} + grad psi_q . (x - p0)
      const double psi = (q == 0 ? 1.0 : 0.0) + pel.grad[q][0] * (c.x - p0.x) +
                         pel.grad[q][1] * (c.y - p0.y);
      const double w = el.area * psi;
      for (int i = 0; i < 3; ++i) {
        trips.emplace_back(ptri[q], tri[i], w * el.grad[i][0]);
        trips.emplace_back(ptri[q], nv + tri[i], w * el.grad[i][1]);
      }
    }
  }
  return from_triplets(coarse.num_nodes(), 2 * nv, trips);
}

SparseMatrix assemble_convection_e(const Mesh& mesh, const Vector& transport) {
  const int nv = mesh.num_nodes();
  if (transport.size() != 2 * nv) {
    throw std::invalid_argument("transport field size does not match the velocity space");
  }
  Triplets trips;
  trips.reserve(9 * mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const P1Element el(mesh, t);
    const auto& tri = mesh.triangles()[t];
    double local[3][3] = {};
    // Edge midpoints: basis values 1/2 at the two edge ends, 0 at the third.
    for (int e = 0; e < 3; ++e) {
      const int i0 = e;
      const int i1 = (e + 1) % 3;
      const double ux = 0.5 * (transport[tri[i0]] + transport[tri[i1]]);
      const double uy = 0.5 * (transport[nv + tri[i0]] + transport[nv + tri[i1]]);
      for (int j = 0; j < 3; ++j) {
        const double adv = ux * el.grad[j][0] + uy * el.grad[j][1];
        local[i0][j] += 0.5 * adv;
        local[i1][j] += 0.5 * adv;
      }
    }
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) trips.emplace_back(tri[i], tri[j], el.area / 3.0 * local[i][j]);
    }
  }
  return from_triplets(nv, nv, trips);
}

SparseMatrix assemble_convection_c(const Mesh& mesh, const Vector& transport) {
  return block_diag2(assemble_convection_e(mesh, transport));
}

Vector transport_sensitivity(const Mesh& mesh, const Vector& field, const Vector& test) {
  const int nv = mesh.num_nodes();
  Vector out = Vector::Zero(2 * nv);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const P1Element el(mesh, t);
    const auto& tri = mesh.triangles()[t];
    double gx = 0.0;
    double gy = 0.0;
    for (int k = 0; k < 3; ++k) {
      gx += field[tri[k]] * el.grad[k][0];
      gy += field[tri[k]] * el.grad[k][1];
    }
    const double s = el.area / 12.0;
    for (int j = 0; j < 3; ++j) {
      double m = 0.0;
      for (int i = 0; i < 3; ++i) m += (i == j ? 2.0 * s : s) * test[tri[i]];
      out[tri[j]] += gx * m;
      out[nv + tri[j]] += gy * m;
    }
  }
  return out;
}

SparseMatrix assemble_boundary_mass(const Mesh& mesh, const TagSet& tags) {
  for (SegmentTag tag : tags) {
    if (!mesh.has_tag(tag)) {
      throw std::invalid_argument("mesh has no boundary segment tagged " +
                                  std::string(tag_name(tag)));
    }
  }
  Triplets trips;
  for (const auto& e : mesh.boundary_edges()) {
    if (!tags.contains(e.tag)) continue;
    const Point& a = mesh.nodes()[e.nodes[0]];
    const Point& b = mesh.nodes()[e.nodes[1]];
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) trips.emplace_back(e.nodes[i], e.nodes[j], len / 6.0 * (i == j ? 2.0 : 1.0));
    }
  }
  return from_triplets(mesh.num_nodes(), mesh.num_nodes(), trips);
}

double CurlOperator::form(const Vector& velocity) const {
  const Vector c = curl * velocity;
  return c.cwiseProduct(c).dot(weights);
}

SparseMatrix CurlOperator::quadratic_form() const {
  SparseMatrix wc = weights.asDiagonal() * curl;
  return SparseMatrix(curl.transpose() * wc);
}

CurlOperator assemble_curl(const Mesh& mesh) {
  const int nv = mesh.num_nodes();
  Triplets trips;
  CurlOperator op;
  op.weights.resize(mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const P1Element el(mesh, t);
    op.weights[t] = el.area;
    const auto& tri = mesh.triangles()[t];
    for (int k = 0; k < 3; ++k) {
      trips.emplace_back(t, tri[k], -el.grad[k][1]);
      trips.emplace_back(t, nv + tri[k], el.grad[k][0]);
    }
  }
  op.curl = from_triplets(mesh.num_triangles(), 2 * nv, trips);
  return op;
}

SparseMatrix block_diag2(const SparseMatrix& k) {
  Triplets trips;
  trips.reserve(2 * k.nonZeros());
  for (int col = 0; col < k.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(k, col); it; ++it) {
      trips.emplace_back(it.row(), it.col(), it.value());
      trips.emplace_back(k.rows() + it.row(), k.cols() + it.col(), it.value());
    }
  }
  return from_triplets(2 * k.rows(), 2 * k.cols(), trips);
}

double max_asymmetry(const SparseMatrix& k) {
  SparseMatrix diff = k - SparseMatrix(k.transpose());
  double m = 0.0;
  for (int col = 0; col < diff.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(diff, col); it; ++it) m = std::max(m, std::abs(it.value()));
  }
  return m;
}

Constraints::Constraints(int size, const std::vector<int>& constrained)
    : mask_(static_cast<std::size_t>(size), 0) {
  for (int i : constrained) {
    if (i < 0 || i >= size) throw std::out_of_range("constrained dof out of range");
    mask_[i] = 1;
  }
  for (int i = 0; i < size; ++i) {
    if (mask_[i]) indices_.push_back(i);
  }
}

SparseMatrix Constraints::eliminate(const SparseMatrix& k) const {
  Triplets trips;
  trips.reserve(k.nonZeros() + indices_.size());
  for (int col = 0; col < k.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(k, col); it; ++it) {
      if (!mask_[it.row()] && !mask_[it.col()]) trips.emplace_back(it.row(), it.col(), it.value());
    }
  }
  for (int i : indices_) trips.emplace_back(i, i, 1.0);
  return from_triplets(static_cast<int>(k.rows()), static_cast<int>(k.cols()), trips);
}

Vector Constraints::lift(const Vector& values) const {
  Vector out = Vector::Zero(size());
  for (int i : indices_) out[i] = values[i];
  return out;
}

Vector Constraints::lift_rhs(const SparseMatrix& k, const Vector& rhs, const Vector& values) const {
  if (indices_.empty()) return rhs;
  const Vector l = lift(values);
  Vector out = rhs - k * l;
  for (int i : indices_) out[i] = values[i];
  return out;
}

void Constraints::zero(Vector& v) const {
  for (int i : indices_) v[i] = 0.0;
}

FemOperators FemOperators::build(const MeshPair& pair, double nu1, double nu2) {
  FemOperators ops;
  ops.mass = assemble_mass(pair.fine);
  ops.stiffness = assemble_stiffness(pair.fine, 1.0);
  ops.a = nu1 * ops.stiffness;
  ops.d = nu2 * ops.stiffness;
  ops.b = assemble_divergence(pair);
  ops.pressure_mass = assemble_mass(pair.coarse);
  ops.curl = assemble_curl(pair.fine);
  if (!(nu1 > 0.0) || !(nu2 > 0.0)) throw std::invalid_argument("diffusivities must be positive");
  return ops;
}

void write_matrix_coo(std::ostream& os, const SparseMatrix& k) {
  os.precision(17);
  for (int col = 0; col < k.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(k, col); it; ++it) {
      os << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
    }
  }
}

}  // namespace bouss
