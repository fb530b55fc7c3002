//
// bouss - boundary heat-flux control of Boussinesq flow
// SPDX-License-Identifier: Apache-2.0
//

#include <benchmark/benchmark.h>

#include "bouss/adjoint.hpp"
#include "bouss/fem.hpp"
#include "bouss/linearized.hpp"
#include "bouss/state.hpp"

using namespace bouss;

static void BM_AssembleOperators(benchmark::State& st) {
  const MeshPair pair = build_unit_square(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(FemOperators::build(pair, 0.01, 1.0 / 72.0));
}
BENCHMARK(BM_AssembleOperators)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_Convection(benchmark::State& st) {
  const MeshPair pair = build_unit_square(static_cast<int>(st.range(0)));
  const Vector y = Vector::Ones(2 * pair.fine.num_nodes());
  for (auto _ : st) benchmark::DoNotOptimize(assemble_convection_e(pair.fine, y));
}
BENCHMARK(BM_Convection)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_StateSolve(benchmark::State& st) {
  const DiscreteProblem problem(example1(static_cast<int>(st.range(0)), 16, 1.0));
  const ControlTrajectory v = problem.zero_control();
  for (auto _ : st) benchmark::DoNotOptimize(solve_state(problem, v));
}
BENCHMARK(BM_StateSolve)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

static void BM_AdjointSolve(benchmark::State& st) {
  const DiscreteProblem problem(example1(static_cast<int>(st.range(0)), 16, 1.0));
  const StateTrajectory s = solve_state(problem, problem.zero_control());
  for (auto _ : st) benchmark::DoNotOptimize(solve_adjoint(problem, s));
}
BENCHMARK(BM_AdjointSolve)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

static void BM_LinearizedSolve(benchmark::State& st) {
  const DiscreteProblem problem(example1(static_cast<int>(st.range(0)), 16, 1.0));
  const StateTrajectory s = solve_state(problem, problem.zero_control());
  ControlTrajectory d = problem.zero_control();
  for (auto& x : d.steps()) x.setOnes();
  for (auto _ : st) benchmark::DoNotOptimize(solve_linearized(problem, s, d));
}
BENCHMARK(BM_LinearizedSolve)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
