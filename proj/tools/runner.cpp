//
// bouss - boundary heat-flux control of Boussinesq flow
// SPDX-License-Identifier: Apache-2.0
//

#include "runner.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>

#include "bouss/adjoint.hpp"
#include "bouss/io.hpp"
#include "bouss/optimizer.hpp"
#include "bouss/oracle.hpp"
#include "bouss/state.hpp"

namespace bouss::cli {

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  body(os);
}

std::pair<SegmentTag, SegmentTag> control_sides(const RunConfig& config) {
  if (config.geometry == Geometry::Square) return {SegmentTag::Left, SegmentTag::Right};
  return {SegmentTag::SideWallLeft, SegmentTag::SideWallRight};
}

double integrated_vorticity(const DiscreteProblem& problem, const StateTrajectory& state) {
  double sum = 0.0;
  for (int n = 1; n <= state.steps(); ++n) sum += vorticity_norm2(problem, state.y[n]);
  return problem.dt() * sum;
}

void write_series(const fs::path& dir, const std::string& prefix, const RunConfig& config,
                  const DiscreteProblem& problem, const StateTrajectory& state) {
  if (config.geometry == Geometry::Square) {
    write_file(dir / (prefix + "tracking_error.csv"),
               [&](std::ostream& os) { write_tracking_error_csv(os, problem, state); });
  }
  write_file(dir / (prefix + "vorticity.csv"), [&](std::ostream& os) { write_vorticity_csv(os, problem, state); });
  write_snapshots(dir / (prefix + "snapshots"), problem, state, config.snapshot_stride);
}

}  // namespace

int run(const RunConfig& config, std::ostream& log) {
  const DiscreteProblem problem(make_setup(config));
  const fs::path dir(config.dir);
  fs::create_directories(dir);
  write_file(dir / "config.ini", [&](std::ostream& os) { os << serialize_config(config); });

  const ControlTrajectory zero = problem.zero_control();
  const double j_baseline = evaluate_objective(problem, solve_state(problem, zero), zero);

  LbfgsOptions opts;
  opts.m = config.m;
  opts.tol = config.tol;
  opts.max_iter = config.max_iter;
  opts.max_abs_rho = config.max_rho;
  opts.on_iterate = [&](const IterationRecord& r, const ControlTrajectory&) {
    char line[160];
    std::snprintf(line, sizeof line, "iter %4d  J %.9e  |g|/|g0| %.3e  rho %.4e\n", r.k, r.J, r.grad_rel, r.rho);
    log << line << std::flush;
  };
  const LbfgsResult result = lbfgs_solve(problem, zero, opts);
  const StateTrajectory state = solve_state(problem, result.u);

  write_file(dir / "history.csv", [&](std::ostream& os) { write_history_csv(os, result.history, config.timing); });
  const auto [left, right] = control_sides(config);
  write_file(dir / "control_left.csv", [&](std::ostream& os) { write_control_csv(os, problem, result.u, left); });
  write_file(dir / "control_right.csv", [&](std::ostream& os) { write_control_csv(os, problem, result.u, right); });
  write_series(dir, "", config, problem, state);

  char buf[64];
  auto num = [&buf](double x) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf);
  };
  write_file(dir / "summary.csv", [&](std::ostream& os) {
    os << "key,value\n";
    os << "J_baseline," << num(j_baseline) << '\n';
    os << "J_final," << num(result.J) << '\n';
    os << "best_k," << result.best_k << '\n';
    os << "iterations," << result.history.back().k << '\n';
    os << "converged," << (result.converged ? 1 : 0) << '\n';
    os << "skipped_pairs," << result.skipped_pairs << '\n';
    os << "fallbacks," << result.fallbacks << '\n';
    if (config.geometry == Geometry::Square) {
      os << "tracking_error_T," << num(relative_tracking_error(problem, state.y.back(), problem.steps())) << '\n';
    }
    os << "integrated_vorticity," << num(integrated_vorticity(problem, state)) << '\n';
  });
  log << "baseline J " << num(j_baseline) << ", optimized J " << num(result.J) << " (iteration " << result.best_k
      << (result.converged ? ", converged" : ", not converged") << ")\n";
  return kSuccess;
}

int baseline(const RunConfig& config, std::ostream& log) {
  const DiscreteProblem problem(make_setup(config));
  const fs::path dir(config.dir);
  fs::create_directories(dir);
  const ControlTrajectory zero = problem.zero_control();
  const StateTrajectory state = solve_state(problem, zero);
  write_series(dir, "baseline_", config, problem, state);
  char line[160];
  std::snprintf(line, sizeof line, "baseline J %.17g, integrated vorticity %.17g\n",
                evaluate_objective(problem, state, zero), integrated_vorticity(problem, state));
  log << line;
  return kSuccess;
}

int gradcheck(const RunConfig& config, std::ostream& log) {
  const DiscreteProblem problem(make_setup(config));
  const fs::path dir(config.dir);
  fs::create_directories(dir);
  const ControlTrajectory v = oracle::random_control(problem, config.seed);
  const oracle::FdCheckReport report =
      oracle::fd_gradient_check(problem, v, config.gradcheck_directions, config.seed + 1000);
  report.write_text(log);
  write_file(dir / "gradcheck.csv", [&](std::ostream& os) { report.write_csv(os); });

  const ControlTrajectory g = compute_gradient(problem, solve_adjoint(problem, solve_state(problem, v)), v);
  const auto [left, right] = control_sides(config);
  write_file(dir / "gradient_left.csv", [&](std::ostream& os) { write_control_csv(os, problem, g, left); });
  write_file(dir / "gradient_right.csv", [&](std::ostream& os) { write_control_csv(os, problem, g, right); });

  const int passed = report.num_passed(config.gradcheck_tol);
  log << passed << "/" << report.directions.size() << " directions below " << config.gradcheck_tol << '\n';
  return report.passed(config.gradcheck_tol) ? kSuccess : kGradcheckFailure;
}

int mesh_dump(const RunConfig& config, bool coarse, std::ostream& out) {
  const ProblemSetup setup = make_setup(config);
  write_mesh(out, coarse ? setup.mesh->coarse : setup.mesh->fine);
  return kSuccess;
}

}  // namespace bouss::cli
