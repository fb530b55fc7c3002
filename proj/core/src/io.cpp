//
// bouss - boundary heat-flux control of Boussinesq flow
// SPDX-License-Identifier: Apache-2.0
//

#include "bouss/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

namespace bouss {

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

void write_history_csv(std::ostream& os, const std::vector<IterationRecord>& history, bool timing) {
  os << "k,J,grad_rel,rho,seconds\n";
  for (const auto& r : history) {
    os << r.k << ',' << fmt(r.J) << ',' << fmt(r.grad_rel) << ',' << fmt(r.rho) << ','
       << fmt(timing ? r.seconds : 0.0) << '\n';
  }
}

void write_control_csv(std::ostream& os, const DiscreteProblem& problem, const ControlTrajectory& u,
                       SegmentTag segment) {
  const auto& nodes = problem.control_nodes();
  std::vector<std::pair<double, int>> order;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    if (problem.fine().node_tags(nodes[k]).contains(segment)) {
      order.emplace_back(problem.control_arclength(static_cast<int>(k)), static_cast<int>(k));
    }
  }
  std::sort(order.begin(), order.end());
  os << "n,t,s,value\n";
  for (int n = 1; n <= u.num_steps(); ++n) {
    for (const auto& [s, k] : order) {
      os << n << ',' << fmt(problem.time(n)) << ',' << fmt(s) << ',' << fmt(u.at(n)[k]) << '\n';
    }
  }
}

void write_tracking_error_csv(std::ostream& os, const DiscreteProblem& problem, const StateTrajectory& state) {
  os << "n,t,rel_error\n";
  for (int n = 1; n <= state.steps(); ++n) {
    os << n << ',' << fmt(problem.time(n)) << ',' << fmt(relative_tracking_error(problem, state.y[n], n)) << '\n';
  }
}

void write_vorticity_csv(std::ostream& os, const DiscreteProblem& problem, const StateTrajectory& state) {
  os << "n,t,vorticity\n";
  for (int n = 1; n <= state.steps(); ++n) {
    os << n << ',' << fmt(problem.time(n)) << ',' << fmt(std::sqrt(vorticity_norm2(problem, state.y[n]))) << '\n';
  }
}

Vector pressure_on_fine(const MeshPair& pair, const Vector& p) {
  Vector out = Vector::Zero(pair.fine.num_nodes());
  for (int c = 0; c < pair.coarse.num_nodes(); ++c) out[pair.coarse_node_embed[c]] = p[c];
  for (const auto& [edge, mid] : pair.edge_midpoint) out[mid] = 0.5 * (p[edge.first] + p[edge.second]);
  return out;
}

void write_snapshot(std::ostream& os, const DiscreteProblem& problem, const StateTrajectory& state, int n) {
  const int nv = problem.num_velocity_nodes();
  const Vector p = pressure_on_fine(problem.mesh(), state.p[n]);
  os << "x y y1 y2 theta p\n";
  for (int i = 0; i < nv; ++i) {
    const Point& x = problem.fine().nodes()[i];
    os << fmt(x.x) << ' ' << fmt(x.y) << ' ' << fmt(state.y[n][i]) << ' ' << fmt(state.y[n][nv + i]) << ' '
       << fmt(state.theta[n][i]) << ' ' << fmt(p[i]) << '\n';
  }
}

void write_snapshots(const std::filesystem::path& dir, const DiscreteProblem& problem,
                     const StateTrajectory& state, int stride) {
  if (stride <= 0) return;
  std::filesystem::create_directories(dir);
  for (int n = 0; n <= state.steps(); ++n) {
    if (n % stride != 0 && n != state.steps()) continue;
    char name[32];
    std::snprintf(name, sizeof name, "state_n%04d.txt", n);
    std::ofstream os(dir / name);
    if (!os) throw std::runtime_error("cannot write " + (dir / name).string());
    write_snapshot(os, problem, state, n);
  }
}

}  // namespace bouss
