//
// bouss - boundary heat-flux control of Boussinesq flow
// SPDX-License-Identifier: Apache-2.0
//

#include "bouss/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <random>
#include <stdexcept>

#include "bouss/adjoint.hpp"
#include "bouss/state.hpp"

namespace bouss::oracle {

namespace {

std::vector<QuadraturePoint> orbit3(double a, double b, double w) {
  return {{a, b, b, w}, {b, a, b, w}, {b, b, a, w}};
}

std::vector<QuadraturePoint> make_rule(int degree) {
  std::vector<QuadraturePoint> r;
  auto append = [&r](const std::vector<QuadraturePoint>& pts) { r.insert(r.end(), pts.begin(), pts.end()); };
  const double third = 1.0 / 3.0;
  switch (degree) {
    case 1:
      r.push_back({third, third, third, 1.0});
      break;
    case 2:
      append(orbit3(2.0 / 3.0, 1.0 / 6.0, 1.0 / 3.0));
      break;
    case 3:
      r.push_back({third, third, third, -27.0 / 48.0});
      append(orbit3(0.6, 0.2, 25.0 / 48.0));
      break;
    case 4:
      append(orbit3(0.108103018168070, 0.445948490915965, 0.223381589678011));
      append(orbit3(0.816847572980459, 0.091576213509771, 0.109951743655322));
      break;
    case 5: {
      const double s = std::sqrt(15.0);
      const double b1 = (6.0 - s) / 21.0;
      const double b2 = (6.0 + s) / 21.0;
      r.push_back({third, third, third, 9.0 / 40.0});
      append(orbit3(1.0 - 2.0 * b1, b1, (155.0 - s) / 1200.0));
      append(orbit3(1.0 - 2.0 * b2, b2, (155.0 + s) / 1200.0));
      break;
    }
    default:
      throw std::invalid_argument("quadrature degree must be between 1 and 5");
  }
  return r;
}

/// Affine map of one triangle: x = x0 + J (xi, eta).
struct Element {
  std::array<Point, 3> v;
  double area;
  std::array<std::array<double, 2>, 3> grad;

  Element(const Mesh& mesh, const Triangle& tri) {
    for (int k = 0; k < 3; ++k) v[k] = mesh.nodes()[tri[k]];
    Eigen::Matrix2d jac;
    jac << v[1].x - v[0].x, v[2].x - v[0].x, v[1].y - v[0].y, v[2].y - v[0].y;
    area = 0.5 * jac.determinant();
    const Eigen::Matrix2d jit = jac.inverse().transpose();
    const Eigen::Vector2d ref[3] = {{-1.0, -1.0}, {1.0, 0.0}, {0.0, 1.0}};
    for (int k = 0; k < 3; ++k) {
      const Eigen::Vector2d g = jit * ref[k];
      grad[k] = {g[0], g[1]};
    }
  }

  Point at(const QuadraturePoint& q) const {
    return {q.l1 * v[0].x + q.l2 * v[1].x + q.l3 * v[2].x, q.l1 * v[0].y + q.l2 * v[1].y + q.l3 * v[2].y};
  }
};

std::array<double, 3> bary(const QuadraturePoint& q) { return {q.l1, q.l2, q.l3}; }

/// Barycentric coordinates of x in triangle (a, b, c).
std::array<double, 3> locate(const Point& a, const Point& b, const Point& c, const Point& x) {
  Eigen::Matrix3d m;
  m << 1.0, 1.0, 1.0, a.x, b.x, c.x, a.y, b.y, c.y;
  const Eigen::Vector3d l = m.fullPivLu().solve(Eigen::Vector3d(1.0, x.x, x.y));
  return {l[0], l[1], l[2]};
}

}  // namespace

const std::vector<QuadraturePoint>& triangle_rule(int degree) {
  static const std::vector<QuadraturePoint> rules[5] = {make_rule(1), make_rule(2), make_rule(3), make_rule(4),
                                                        make_rule(5)};
  if (degree < 1 || degree > 5) throw std::invalid_argument("quadrature degree must be between 1 and 5");
  return rules[degree - 1];
}

double quadrature_integrate(const Mesh& mesh, const std::function<double(Point)>& f, int degree) {
  const auto& rule = triangle_rule(degree);
  double sum = 0.0;
  for (const auto& tri : mesh.triangles()) {
    const Element el(mesh, tri);
    for (const auto& q : rule) sum += el.area * q.weight * f(el.at(q));
  }
  return sum;
}

double integrate_product(const Mesh& mesh, const Vector& a, const Vector& b) {
  double sum = 0.0;
  for (const auto& tri : mesh.triangles()) {
    const Element el(mesh, tri);
    for (const auto& q : triangle_rule(2)) {
      const auto l = bary(q);
      double va = 0.0;
      double vb = 0.0;
      for (int k = 0; k < 3; ++k) {
        va += l[k] * a[tri[k]];
        vb += l[k] * b[tri[k]];
      }
      sum += el.area * q.weight * va * vb;
    }
  }
  return sum;
}

DenseMatrix mass(const Mesh& mesh) {
  const int nv = mesh.num_nodes();
  DenseMatrix m = DenseMatrix::Zero(nv, nv);
  for (const auto& tri : mesh.triangles()) {
    const Element el(mesh, tri);
    for (const auto& q : triangle_rule(5)) {
      const auto l = bary(q);
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) m(tri[i], tri[j]) += el.area * q.weight * l[i] * l[j];
      }
    }
  }
  return m;
}

DenseMatrix stiffness(const Mesh& mesh, double nu) {
  const int nv = mesh.num_nodes();
  DenseMatrix k = DenseMatrix::Zero(nv, nv);
  for (const auto& tri : mesh.triangles()) {
    const Element el(mesh, tri);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        k(tri[i], tri[j]) += nu * el.area * (el.grad[i][0] * el.grad[j][0] + el.grad[i][1] * el.grad[j][1]);
      }
    }
  }
  return k;
}

DenseMatrix divergence(const MeshPair& pair) {
  const Mesh& fine = pair.fine;
  const Mesh& coarse = pair.coarse;
  const int nv = fine.num_nodes();
  DenseMatrix b = DenseMatrix::Zero(coarse.num_nodes(), 2 * nv);
  for (const auto& tri : fine.triangles()) {
    const Element el(fine, tri);
    for (const auto& q : triangle_rule(5)) {
      const Point x = el.at(q);
      bool found = false;
      for (const auto& ct : coarse.triangles()) {
        const auto l = locate(coarse.nodes()[ct[0]], coarse.nodes()[ct[1]], coarse.nodes()[ct[2]], x);
        if (std::min({l[0], l[1], l[2]}) < -1e-12) continue;
        for (int c = 0; c < 3; ++c) {
          for (int i = 0; i < 3; ++i) {
            for (int k = 0; k < 2; ++k) b(ct[c], k * nv + tri[i]) += el.area * q.weight * l[c] * el.grad[i][k];
          }
        }
        found = true;
        break;
      }
      if (!found) throw std::runtime_error("quadrature point outside the coarse mesh");
    }
  }
  return b;
}

DenseMatrix convection(const Mesh& mesh, const Vector& transport) {
  const int nv = mesh.num_nodes();
  DenseMatrix e = DenseMatrix::Zero(nv, nv);
  for (const auto& tri : mesh.triangles()) {
    const Element el(mesh, tri);
    for (const auto& q : triangle_rule(5)) {
      const auto l = bary(q);
      double ux = 0.0;
      double uy = 0.0;
      for (int k = 0; k < 3; ++k) {
        ux += l[k] * transport[tri[k]];
        uy += l[k] * transport[nv + tri[k]];
      }
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          e(tri[i], tri[j]) += el.area * q.weight * (ux * el.grad[j][0] + uy * el.grad[j][1]) * l[i];
        }
      }
    }
  }
  return e;
}

Vector transport_sensitivity(const Mesh& mesh, const Vector& field, const Vector& test) {
  const int nv = mesh.num_nodes();
  Vector out = Vector::Zero(2 * nv);
  for (const auto& tri : mesh.triangles()) {
    const Element el(mesh, tri);
    double gf[2] = {0.0, 0.0};
    for (int k = 0; k < 3; ++k) {
      gf[0] += field[tri[k]] * el.grad[k][0];
      gf[1] += field[tri[k]] * el.grad[k][1];
    }
    for (const auto& q : triangle_rule(5)) {
      const auto l = bary(q);
      double t = 0.0;
      for (int k = 0; k < 3; ++k) t += l[k] * test[tri[k]];
      for (int j = 0; j < 3; ++j) {
        for (int c = 0; c < 2; ++c) out[c * nv + tri[j]] += el.area * q.weight * l[j] * gf[c] * t;
      }
    }
  }
  return out;
}

DenseMatrix boundary_mass(const Mesh& mesh, const TagSet& tags) {
  const int nv = mesh.num_nodes();
  DenseMatrix m = DenseMatrix::Zero(nv, nv);
  const double g = 0.5 / std::sqrt(3.0);
  const double s[2] = {0.5 - g, 0.5 + g};
  for (const auto& e : mesh.boundary_edges()) {
    if (!tags.contains(e.tag)) continue;
    const Point& a = mesh.nodes()[e.nodes[0]];
    const Point& b = mesh.nodes()[e.nodes[1]];
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    for (double t : s) {
      const double phi[2] = {1.0 - t, t};
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) m(e.nodes[i], e.nodes[j]) += 0.5 * len * phi[i] * phi[j];
      }
    }
  }
  return m;
}

DenseMatrix curl(const Mesh& mesh) {
  const int nv = mesh.num_nodes();
  DenseMatrix c = DenseMatrix::Zero(mesh.num_triangles(), 2 * nv);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    const Element el(mesh, tri);
    for (int k = 0; k < 3; ++k) {
      c(t, tri[k]) -= el.grad[k][1];
      c(t, nv + tri[k]) += el.grad[k][0];
    }
  }
  return c;
}

Vector dense_reference_solve(const DenseMatrix& k, const Vector& rhs) {
  if (k.rows() > 5000) throw std::invalid_argument("dense reference solve limited to 5000 unknowns");
  Eigen::FullPivLU<DenseMatrix> lu(k);
  if (!lu.isInvertible()) throw std::runtime_error("dense reference system is singular");
  return lu.solve(rhs);
}

double max_entry_difference(const DenseMatrix& a, const SparseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return std::numeric_limits<double>::infinity();
  return (a - DenseMatrix(b)).cwiseAbs().maxCoeff();
}

bool FdCheckReport::passed(double tol) const {
  return num_passed(tol) == static_cast<int>(directions.size());
}

int FdCheckReport::num_passed(double tol) const {
  return static_cast<int>(
      std::count_if(directions.begin(), directions.end(), [tol](const FdDirection& d) { return d.best_error < tol; }));
}

void FdCheckReport::write_text(std::ostream& os) const {
  const auto flags = os.flags();
  os << std::scientific << std::setprecision(3);
  for (const auto& d : directions) {
    os << "direction " << d.id << ": adjoint " << d.adjoint << ", best eps " << d.best_eps << ", rel error "
       << d.best_error << '\n';
    for (std::size_t i = 0; i < d.eps.size(); ++i) {
      os << "  eps " << d.eps[i] << "  fd " << d.fd[i] << "  rel " << d.rel_error[i] << '\n';
    }
  }
  os.flags(flags);
}

void FdCheckReport::write_csv(std::ostream& os) const {
  const auto flags = os.flags();
  os << std::setprecision(17);
  os << "direction,eps,fd,adjoint,rel_error,best\n";
  for (const auto& d : directions) {
    for (std::size_t i = 0; i < d.eps.size(); ++i) {
      os << d.id << ',' << d.eps[i] << ',' << d.fd[i] << ',' << d.adjoint << ',' << d.rel_error[i] << ','
         << (d.eps[i] == d.best_eps ? 1 : 0) << '\n';
    }
  }
  os.flags(flags);
}

std::vector<double> default_eps_ladder() { return {1e-2, 1e-3, 1e-4, 1e-5, 1e-6}; }

ControlTrajectory random_control(const DiscreteProblem& problem, std::uint64_t seed, double scale) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  ControlTrajectory v = problem.zero_control();
  for (auto& step : v.steps()) {
    for (Eigen::Index i = 0; i < step.size(); ++i) step[i] = scale * normal(rng);
  }
  return v;
}

FdCheckReport fd_gradient_check(const DiscreteProblem& problem, const ControlTrajectory& v, int n_dirs,
                                std::uint64_t seed, const std::vector<double>& eps) {
  if (3 * problem.num_velocity_nodes() > 10000) {
    throw std::invalid_argument("finite-difference check limited to 1e4 fine dofs");
  }
  for (std::size_t i = 1; i < eps.size(); ++i) {
    if (!(eps[i] < eps[i - 1])) throw std::invalid_argument("eps ladder must be strictly decreasing");
  }
  auto objective = [&](const ControlTrajectory& u) {
    return evaluate_objective(problem, solve_state(problem, u), u);
  };
  const StateTrajectory state = solve_state(problem, v);
  const ControlTrajectory g = compute_gradient(problem, solve_adjoint(problem, state), v);

  FdCheckReport report;
  for (int d = 0; d < n_dirs; ++d) {
    ControlTrajectory dir = random_control(problem, seed + static_cast<std::uint64_t>(d));
    dir *= 1.0 / problem.control_norm(dir);
    FdDirection row;
    row.id = d;
    row.eps = eps;
    row.adjoint = problem.control_inner(g, dir);
    row.best_error = std::numeric_limits<double>::infinity();
    for (double e : eps) {
      const double fd = (objective(v + e * dir) - objective(v - e * dir)) / (2.0 * e);
      const double rel = std::abs(fd - row.adjoint) / std::max(std::abs(row.adjoint), 1e-300);
      row.fd.push_back(fd);
      row.rel_error.push_back(rel);
      if (rel < row.best_error) {
        row.best_error = rel;
        row.best_eps = e;
      }
    }
    report.directions.push_back(std::move(row));
  }
  return report;
}

}  // namespace bouss::oracle
