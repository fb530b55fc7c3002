//
// bouss - boundary heat-flux control of Boussinesq flow
// SPDX-License-Identifier: Apache-2.0
//

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "bouss/adjoint.hpp"
#include "bouss/linearized.hpp"
#include "bouss/oracle.hpp"

using namespace bouss;

namespace {

double duality_gap(const DiscreteProblem& problem, std::uint64_t seed) {
  const ControlTrajectory v = oracle::random_control(problem, seed);
  const ControlTrajectory dv = oracle::random_control(problem, seed + 100);
  const StateTrajectory s = solve_state(problem, v);
  const AdjointTrajectory adj = solve_adjoint(problem, s);
  const SensitivityTrajectory w = solve_linearized(problem, s, dv);
  double lhs = 0.0;
  double rhs = 0.0;
  for (int n = 1; n <= problem.steps(); ++n) {
    lhs += objective_load(problem, s, n).dot(w.w[n]);
    rhs += problem.dt() * adj.zeta[n].dot(problem.control_map() * dv.at(n));
  }
  return std::abs(lhs - rhs) / std::abs(lhs);
}

std::vector<int> free_indices(const Constraints& c) {
  std::vector<int> out;
  for (int i = 0; i < c.size(); ++i) {
    if (!c.is_constrained(i)) out.push_back(i);
  }
  return out;
}

}  // namespace

TEST(Adjoint, ZeroSourceGivesZeroMultipliers) {
  ProblemSetup setup = example1(8, 4, 1.0);
  setup.target = [](Point, double) { return Point{0.0, 0.0}; };
  const DiscreteProblem problem(setup);
  const AdjointTrajectory adj = solve_adjoint(problem, solve_state(problem, problem.zero_control()));
  for (int n = 1; n <= problem.steps() + 1; ++n) {
    EXPECT_EQ(adj.z[n].cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(adj.z_tilde[n].cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(adj.zeta[n].cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(Adjoint, TerminalDataIsZero) {
  const DiscreteProblem problem(example1(8, 4, 1.0));
  const AdjointTrajectory adj = solve_adjoint(problem, solve_state(problem, oracle::random_control(problem, 1)));
  EXPECT_EQ(adj.steps(), 4);
  EXPECT_EQ(adj.z[5].cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(adj.z_tilde[5].cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(adj.zeta[5].cwiseAbs().maxCoeff(), 0.0);
  for (int n = 1; n <= 4; ++n) {
    for (int i : problem.tilde_constraints().indices()) {
      EXPECT_EQ(adj.z_tilde[n][i], 0.0);
      EXPECT_EQ(adj.z_tilde[n][problem.num_velocity_nodes() + i], 0.0);
    }
    for (int i : problem.theta_constraints().indices()) EXPECT_EQ(adj.zeta[n][i], 0.0);
  }
}

TEST(Adjoint, DualityIdentityExampleOne) {
  const DiscreteProblem problem(example1(8, 8, 1.0));
  for (std::uint64_t seed : {1u, 2u, 3u}) EXPECT_LT(duality_gap(problem, seed), 1e-10);
}

TEST(Adjoint, DualityIdentityExampleTwo) {
  const DiscreteProblem problem(example2(12, 8, 2.0));
  for (std::uint64_t seed : {4u, 5u}) EXPECT_LT(duality_gap(problem, seed), 1e-10);
}

TEST(Adjoint, DualityIdentityFullDirichletVorticity) {
  ProblemSetup setup = example1(8, 8, 1.0);
  setup.projection = ProjectionVariant::FullDirichlet;
  setup.objective = Objective::Vorticity;
  const DiscreteProblem problem(setup);
  EXPECT_LT(duality_gap(problem, 6), 1e-10);
}

TEST(Gradient, FiniteDifferencesExampleOneTracking) {
  const DiscreteProblem problem(example1(8, 8, 1.0));
  const auto report = oracle::fd_gradient_check(problem, oracle::random_control(problem, 10), 5, 20);
  EXPECT_TRUE(report.passed(1e-5));
}

TEST(Gradient, FiniteDifferencesExampleTwoVorticityRobin) {
  const DiscreteProblem problem(example2(12, 8, 2.0));
  const auto report = oracle::fd_gradient_check(problem, oracle::random_control(problem, 11), 5, 21);
  EXPECT_TRUE(report.passed(1e-5));
}

TEST(Gradient, FiniteDifferencesExampleOneVorticityFullDirichlet) {
  ProblemSetup setup = example1(8, 8, 1.0);
  setup.objective = Objective::Vorticity;
  setup.projection = ProjectionVariant::FullDirichlet;
  const DiscreteProblem problem(setup);
  const auto report = oracle::fd_gradient_check(problem, oracle::random_control(problem, 12), 3, 22);
  EXPECT_TRUE(report.passed(1e-5));
}

TEST(Gradient, StationarityIdentity) {
  const DiscreteProblem problem(example1(8, 4, 1.0));
  const StateTrajectory s = solve_state(problem, oracle::random_control(problem, 2));
  const AdjointTrajectory adj = solve_adjoint(problem, s);
  const ControlTrajectory zero_v = problem.zero_control();
  const ControlTrajectory trace = compute_gradient(problem, adj, zero_v);
  const ControlTrajectory v = (-1.0 / problem.setup().alpha) * trace;
  EXPECT_LT(compute_gradient(problem, adj, v).max_abs(), 1e-12 * trace.max_abs());
}

TEST(Gradient, PenaltyPartIsLinearInControl) {
  const DiscreteProblem problem(example1(8, 4, 1.0));
  const StateTrajectory s = solve_state(problem, problem.zero_control());
  const AdjointTrajectory adj = solve_adjoint(problem, s);
  const ControlTrajectory v = oracle::random_control(problem, 9);
  const ControlTrajectory base = compute_gradient(problem, adj, problem.zero_control());
  const ControlTrajectory g1 = compute_gradient(problem, adj, v) - base;
  const ControlTrajectory g2 = compute_gradient(problem, adj, 2.0 * v) - base;
  EXPECT_LT((g2 - 2.0 * g1).max_abs(), 1e-12 * g2.max_abs());
}

TEST(Adjoint, LinearInSourceWithFrozenCoupling) {
  ProblemSetup setup = example1(8, 4, 1.0);
  setup.frozen_convection = true;
  setup.target = [](Point, double) { return Point{0.0, 0.0}; };
  const DiscreteProblem problem(setup);
  const StateTrajectory s = solve_state(problem, oracle::random_control(problem, 5));
  StateTrajectory s2 = s;
  for (auto& y : s2.y) y *= 2.0;
  const AdjointTrajectory a = solve_adjoint(problem, s);
  const AdjointTrajectory b = solve_adjoint(problem, s2);
  for (int n = 1; n <= problem.steps(); ++n) {
    EXPECT_LT((b.z[n] - 2.0 * a.z[n]).norm(), 1e-12 * b.z[n].norm());
    EXPECT_LT((b.z_tilde[n] - 2.0 * a.z_tilde[n]).norm(), 1e-12 * b.z_tilde[n].norm());
    EXPECT_LT((b.zeta[n] - 2.0 * a.zeta[n]).norm(), 1e-12 * b.zeta[n].norm());
  }
}

TEST(Adjoint, SingleBackwardStepMatchesDenseSolve) {
  ProblemSetup setup = example1(4, 1, 0.25);
  const int nv0 = setup.mesh->fine.num_nodes();
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  setup.y0 = Vector(2 * nv0);
  for (int i = 0; i < 2 * nv0; ++i) setup.y0[i] = u(rng);
  const DiscreteProblem problem(setup);
  const StateTrajectory s = solve_state(problem, oracle::random_control(problem, 7));
  const AdjointTrajectory adj = solve_adjoint(problem, s);

  const Mesh& mesh = problem.fine();
  const int nv = mesh.num_nodes();
  const int np = problem.num_pressure_nodes();
  const double dt = problem.dt();
  const oracle::DenseMatrix m = oracle::mass(mesh);
  const oracle::DenseMatrix b = oracle::divergence(problem.mesh());
  oracle::DenseMatrix mv = oracle::DenseMatrix::Zero(2 * nv, 2 * nv);
  mv.topLeftCorner(nv, nv) = m;
  mv.bottomRightCorner(nv, nv) = m;
  const Vector load = dt * mv * (s.y[1] - problem.target(1));

  // Projection.
  const auto vf = free_indices(problem.projection_constraints());
  const int nf = static_cast<int>(vf.size());
  const bool mean = problem.pressure_has_mean_constraint();
  const int size = nf + np + (mean ? 1 : 0);
  oracle::DenseMatrix sys = oracle::DenseMatrix::Zero(size, size);
  Vector rhs = Vector::Zero(size);
  for (int a = 0; a < nf; ++a) {
    rhs[a] = load[vf[a]];
    for (int c = 0; c < nf; ++c) sys(a, c) = mv(vf[a], vf[c]) / dt;
    for (int q = 0; q < np; ++q) {
      sys(a, nf + q) = -b(q, vf[a]);
      sys(nf + q, a) = -b(q, vf[a]);
    }
  }
  if (mean) {
    const oracle::DenseMatrix mp = oracle::mass(problem.mesh().coarse);
    for (int q = 0; q < np; ++q) {
      sys(nf + q, size - 1) = mp.row(q).sum();
      sys(size - 1, nf + q) = mp.row(q).sum();
    }
  }
  const Vector sol = oracle::dense_reference_solve(sys, rhs);
  Vector a_y = Vector::Zero(2 * nv);
  for (int a = 0; a < nf; ++a) a_y[vf[a]] = sol[a];
  const double scale = sol.norm() / dt;
  EXPECT_LT((adj.z[1] - a_y / dt).norm(), 1e-10 * scale);
  EXPECT_LT((adj.xi[1] - sol.segment(nf, np) / dt).norm(), 1e-10 * scale);

  // Intermediate velocity, then temperature.
  const auto yf = free_indices(problem.tilde_constraints());
  const oracle::DenseMatrix ky =
      m / dt + oracle::stiffness(mesh, setup.nu1) + oracle::convection(mesh, setup.y0);
  const Vector load_tilde = mv * a_y / dt;
  Vector mu2;
  for (int k = 0; k < 2; ++k) {
    const int f = static_cast<int>(yf.size());
    oracle::DenseMatrix kt(f, f);
    Vector r(f);
    for (int a = 0; a < f; ++a) {
      r[a] = load_tilde[k * nv + yf[a]];
      for (int c = 0; c < f; ++c) kt(a, c) = ky(yf[c], yf[a]);
    }
    const Vector x = oracle::dense_reference_solve(kt, r);
    Vector mu = Vector::Zero(nv);
    for (int a = 0; a < f; ++a) mu[yf[a]] = x[a];
    const Vector ours = adj.z_tilde[1].segment(k * nv, nv);
    EXPECT_LT((ours - mu / dt).norm(), 1e-10 * ours.norm());
    if (k == 1) mu2 = mu;
  }
  const auto tf = free_indices(problem.theta_constraints());
  const oracle::DenseMatrix kth =
      m / dt + oracle::stiffness(mesh, setup.nu2) + oracle::convection(mesh, setup.y0);
  const Vector load_theta = m * mu2;
  const int f = static_cast<int>(tf.size());
  oracle::DenseMatrix kt(f, f);
  Vector r(f);
  for (int a = 0; a < f; ++a) {
    r[a] = load_theta[tf[a]];
    for (int c = 0; c < f; ++c) kt(a, c) = kth(tf[c], tf[a]);
  }
  const Vector x = oracle::dense_reference_solve(kt, r);
  Vector nu = Vector::Zero(nv);
  for (int a = 0; a < f; ++a) nu[tf[a]] = x[a];
  EXPECT_LT((adj.zeta[1] - nu / dt).norm(), 1e-10 * adj.zeta[1].norm());
}

TEST(Gradient, MirrorSymmetricControlGivesMirrorSymmetricGradient) {
  const DiscreteProblem problem(example2(12, 16, 2.0));
  const auto& nodes = problem.fine().nodes();
  const auto& cn = problem.control_nodes();
  const int nc = problem.num_controls();
  std::vector<int> mirror(nc, -1);
  for (int a = 0; a < nc; ++a) {
    for (int b = 0; b < nc; ++b) {
      if (std::hypot(nodes[cn[b]].x - (1.0 - nodes[cn[a]].x), nodes[cn[b]].y - nodes[cn[a]].y) < 1e-12) mirror[a] = b;
    }
    ASSERT_GE(mirror[a], 0);
  }
  ControlTrajectory v = oracle::random_control(problem, 31);
  for (auto& x : v.steps()) {
    const Vector copy = x;
    for (int a = 0; a < nc; ++a) x[a] = 0.5 * (copy[a] + copy[mirror[a]]);
  }
  const StateTrajectory s = solve_state(problem, v);
  const ControlTrajectory g = compute_gradient(problem, solve_adjoint(problem, s), v);
  double asym = 0.0;
  for (const auto& x : g.steps()) {
    for (int a = 0; a < nc; ++a) asym = std::max(asym, std::abs(x[a] - x[mirror[a]]));
  }
  EXPECT_LT(asym, 1e-12 * g.max_abs());
}
