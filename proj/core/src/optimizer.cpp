//
// bouss - boundary heat-flux control of Boussinesq flow
// SPDX-License-Identifier: Apache-2.0
//

#include "bouss/optimizer.hpp"

#include <chrono>
#include <cmath>

#include "bouss/adjoint.hpp"
#include "bouss/linearized.hpp"
#include "bouss/state.hpp"

namespace bouss {

LbfgsMemory::LbfgsMemory(int m, InnerProduct inner) : m_(m), inner_(std::move(inner)) {
  if (m < 1) throw std::invalid_argument("L-BFGS memory must be at least 1");
}

bool LbfgsMemory::push(ControlTrajectory du, ControlTrajectory dg) {
  const double curvature = inner_(dg, du);
  if (!(curvature > 0.0)) {
    ++skipped_;
    return false;
  }
  if (size() == m_) pairs_.pop_front();
  pairs_.push_back({std::move(du), std::move(dg), 1.0 / curvature});
  return true;
}

ControlTrajectory two_loop_direction(const LbfgsMemory& mem, const ControlTrajectory& g, double h0) {
  const auto& pairs = mem.pairs();
  const auto& inner = mem.inner();
  std::vector<double> tau(pairs.size());
  ControlTrajectory d = -g;
  for (int i = static_cast<int>(pairs.size()) - 1; i >= 0; --i) {
    tau[i] = pairs[i].eta * inner(pairs[i].du, d);
    d.axpy(-tau[i], pairs[i].dg);
  }
  d *= h0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double kappa = pairs[i].eta * inner(pairs[i].dg, d);
    d.axpy(tau[i] - kappa, pairs[i].du);
  }
  return d;
}

namespace {

struct Evaluation {
  StateTrajectory state;
  ControlTrajectory g;
  double J = 0.0;
};

Evaluation evaluate(const DiscreteProblem& problem, const ControlTrajectory& u) {
  Evaluation e;
  e.state = solve_state(problem, u);
  e.J = evaluate_objective(problem, e.state, u);
  e.g = compute_gradient(problem, solve_adjoint(problem, e.state), u);
  return e;
}

bool finite(const Evaluation& e) { return std::isfinite(e.J) && e.g.all_finite(); }

}  // namespace

LbfgsResult lbfgs_solve(const DiscreteProblem& problem, const ControlTrajectory& u0, const LbfgsOptions& opts) {
  if (!(opts.tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };

  LbfgsMemory mem(opts.m, [&](const ControlTrajectory& a, const ControlTrajectory& b) {
    return problem.control_inner(a, b);
  });

  LbfgsResult result;
  ControlTrajectory u = u0;
  Evaluation cur = evaluate(problem, u);
  if (!finite(cur)) throw NonfiniteObjective(0, u);
  const double g0 = problem.control_norm(cur.g);

  auto record = [&](int k, double rho) {
    IterationRecord rec{k, cur.J, g0 > 0.0 ? problem.control_norm(cur.g) / g0 : 0.0, rho, elapsed()};
    result.history.push_back(rec);
    if (k == 0 || cur.J < result.J) {
      result.J = cur.J;
      result.u = u;
      result.best_k = k;
    }
    if (opts.on_iterate) opts.on_iterate(rec, u);
    return rec.grad_rel;
  };
  record(0, 0.0);
  if (g0 == 0.0) {
    result.converged = true;
    return result;
  }

  for (int k = 0; k < opts.max_iter; ++k) {
    ControlTrajectory d = two_loop_direction(mem, cur.g);
    StepSize step = step_size(problem, cur.g, d, solve_linearized(problem, cur.state, d), opts.max_abs_rho);
    if (step.degenerate) {
      ++result.fallbacks;
      d = -cur.g;
      step = step_size(problem, cur.g, d, solve_linearized(problem, cur.state, d), opts.max_abs_rho);
    }

    ControlTrajectory du = step.rho * d;
    ControlTrajectory u_next = u + du;
    Evaluation next = evaluate(problem, u_next);
    if (!finite(next)) throw NonfiniteObjective(k + 1, u);
    ControlTrajectory dg = next.g - cur.g;
    mem.push(std::move(du), std::move(dg));
    u = std::move(u_next);
    cur = std::move(next);
    if (record(k + 1, step.rho) < opts.tol) {
      result.converged = true;
      break;
    }
  }
  result.skipped_pairs = mem.skipped();
  return result;
}

}  // namespace bouss
