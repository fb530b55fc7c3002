//
// bouss - boundary heat-flux control of Boussinesq flow
// SPDX-License-Identifier: Apache-2.0
//

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "bouss/adjoint.hpp"
#include "bouss/optimizer.hpp"
#include "bouss/oracle.hpp"
#include "bouss/state.hpp"

using namespace bouss;

namespace {

ControlTrajectory as_control(const Vector& x) { return ControlTrajectory({x}); }

double euclid(const ControlTrajectory& a, const ControlTrajectory& b) { return a.flatten().dot(b.flatten()); }

/// Dense inverse-Hessian update H <- V^T H V + eta du du^T.
Eigen::MatrixXd bfgs_update(const Eigen::MatrixXd& h, const Vector& du, const Vector& dg) {
  const double eta = 1.0 / dg.dot(du);
  const Eigen::MatrixXd v = Eigen::MatrixXd::Identity(du.size(), du.size()) - eta * dg * du.transpose();
  return v.transpose() * h * v + eta * du * du.transpose();
}

Vector random_vector(int size, std::mt19937& rng) {
  std::normal_distribution<double> n;
  Vector v(size);
  for (int i = 0; i < size; ++i) v[i] = n(rng);
  return v;
}

}  // namespace

TEST(TwoLoop, EmptyMemoryIsSteepestDescent) {
  LbfgsMemory mem(3, euclid);
  const Vector g = Vector::LinSpaced(10, -1.0, 2.0);
  EXPECT_EQ((two_loop_direction(mem, as_control(g)).flatten() + g).cwiseAbs().maxCoeff(), 0.0);
}

TEST(TwoLoop, MatchesDenseRecursion) {
  std::mt19937 rng(1);
  const int dim = 10;
  Eigen::MatrixXd a = Eigen::MatrixXd::Random(dim, dim);
  const Eigen::MatrixXd spd = a * a.transpose() + dim * Eigen::MatrixXd::Identity(dim, dim);
  for (int m : {1, 3, 5}) {
    LbfgsMemory mem(m, euclid);
    std::vector<std::pair<Vector, Vector>> pairs;
    for (int k = 0; k < 8; ++k) {
      const Vector du = random_vector(dim, rng);
      const Vector dg = spd * du;
      ASSERT_TRUE(mem.push(as_control(du), as_control(dg)));
      pairs.emplace_back(du, dg);
      Eigen::MatrixXd h = Eigen::MatrixXd::Identity(dim, dim);
      const int first = std::max(0, static_cast<int>(pairs.size()) - m);
      for (std::size_t i = first; i < pairs.size(); ++i) h = bfgs_update(h, pairs[i].first, pairs[i].second);
      const Vector g = random_vector(dim, rng);
      const Vector d = two_loop_direction(mem, as_control(g)).flatten();
      EXPECT_LT((d + h * g).cwiseAbs().maxCoeff(), 1e-12 * (h * g).cwiseAbs().maxCoeff());
      // Secant condition for the newest pair.
      const Vector hdg = -two_loop_direction(mem, as_control(dg)).flatten();
      EXPECT_LT((hdg - du).cwiseAbs().maxCoeff(), 1e-12 * du.cwiseAbs().maxCoeff());
    }
    EXPECT_EQ(mem.size(), m);
  }
}

TEST(LbfgsMemory, EvictsOldestFirst) {
  LbfgsMemory mem(2, euclid);
  for (int k = 1; k <= 3; ++k) {
    mem.push(as_control(Vector::Constant(2, k)), as_control(Vector::Constant(2, k)));
  }
  ASSERT_EQ(mem.size(), 2);
  EXPECT_EQ(mem.pairs().front().du.at(1)[0], 2.0);
  EXPECT_EQ(mem.pairs().back().du.at(1)[0], 3.0);
}

TEST(LbfgsMemory, SkipsNonpositiveCurvature) {
  LbfgsMemory mem(3, euclid);
  mem.push(as_control(Vector::Constant(2, 1.0)), as_control(Vector::Constant(2, 1.0)));
  EXPECT_FALSE(mem.push(as_control(Vector::Constant(2, 1.0)), as_control(Vector::Constant(2, -1.0))));
  EXPECT_FALSE(mem.push(as_control(Vector::Constant(2, 1.0)), as_control(Vector::Zero(2))));
  EXPECT_EQ(mem.size(), 1);
  EXPECT_EQ(mem.skipped(), 2);
  EXPECT_THROW(LbfgsMemory(0, euclid), std::invalid_argument);
}

TEST(Lbfgs, StationaryStartReturnsImmediately) {
  ProblemSetup setup = example1(4, 2, 0.5);
  setup.target = [](Point, double) { return Point{0.0, 0.0}; };
  const DiscreteProblem problem(setup);
  LbfgsOptions opts;
  const LbfgsResult r = lbfgs_solve(problem, problem.zero_control(), opts);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.history.size(), 1u);
  EXPECT_EQ(r.u.max_abs(), 0.0);
}

TEST(Lbfgs, QuadraticProblemReachesDenseOptimum) {
  ProblemSetup setup = example1(4, 2, 0.5);
  setup.frozen_convection = true;
  const DiscreteProblem problem(setup);
  const int dofs = problem.steps() * problem.num_controls();

  // J is quadratic: J(x) = J0 + b.x + x^T H x / 2, recovered from the
  // coefficient gradient by exact differences.
  auto coef_grad = [&](const Vector& x) {
    const ControlTrajectory u = ControlTrajectory::unflatten(x, problem.steps());
    const ControlTrajectory g = compute_gradient(problem, solve_adjoint(problem, solve_state(problem, u)), u);
    Vector out(dofs);
    for (int n = 1; n <= problem.steps(); ++n) {
      out.segment((n - 1) * problem.num_controls(), problem.num_controls()) =
          problem.dt() * (problem.control_mass() * g.at(n));
    }
    return out;
  };
  const Vector b = coef_grad(Vector::Zero(dofs));
  Eigen::MatrixXd h(dofs, dofs);
  for (int j = 0; j < dofs; ++j) h.col(j) = coef_grad(Vector::Unit(dofs, j)) - b;
  const Vector x_star = oracle::dense_reference_solve(h, -b);

  LbfgsOptions opts;
  opts.m = dofs;
  opts.tol = 1e-12;
  opts.max_iter = dofs;
  const LbfgsResult r = lbfgs_solve(problem, problem.zero_control(), opts);
  EXPECT_LE(static_cast<int>(r.history.size()) - 1, dofs);
  EXPECT_LT((r.u.flatten() - x_star).cwiseAbs().maxCoeff(), 1e-8 * x_star.cwiseAbs().maxCoeff());
}

TEST(Lbfgs, HistoryIsFiniteAndBestIterateIsReturned) {
  const DiscreteProblem problem(example1(8, 8, 1.0));
  LbfgsOptions opts;
  opts.m = 3;
  opts.max_iter = 6;
  int calls = 0;
  opts.on_iterate = [&](const IterationRecord&, const ControlTrajectory&) { ++calls; };
  const LbfgsResult r = lbfgs_solve(problem, problem.zero_control(), opts);
  EXPECT_EQ(calls, static_cast<int>(r.history.size()));
  double best = r.history.front().J;
  for (const auto& rec : r.history) {
    EXPECT_TRUE(std::isfinite(rec.J));
    best = std::min(best, rec.J);
  }
  EXPECT_EQ(r.J, best);
  EXPECT_EQ(r.history[r.best_k].J, best);
  EXPECT_NEAR(evaluate_objective(problem, solve_state(problem, r.u), r.u), best, 1e-14 * best);
  EXPECT_LT(r.J, r.history.front().J);
}

TEST(Lbfgs, RejectsNonpositiveTolerance) {
  const DiscreteProblem problem(example1(4, 2, 0.5));
  LbfgsOptions opts;
  opts.tol = 0.0;
  EXPECT_THROW(lbfgs_solve(problem, problem.zero_control(), opts), std::invalid_argument);
}
