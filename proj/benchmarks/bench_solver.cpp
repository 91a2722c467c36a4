// Copyright 2026 The stabsqp Authors
// SPDX-License-Identifier: Apache-2.0

#include <random>

#include <benchmark/benchmark.h>

#include "stabsqp/driver.hpp"
#include "stabsqp/instances.hpp"
#include "stabsqp/subproblem.hpp"

using namespace stabsqp;

namespace {

Instance obstacle(int N) {
  InstanceSpec spec = default_spec("obstacle-1d");
  spec.parameters = {{"N", N}};
  return make_instance(spec);
}

PrimalDual shifted(const PrimalDual& v, double by) {
  PrimalDual w = v;
  w.x.array() += by;
  w.lambda.array() += by;
  return w;
}

void BM_Projection(benchmark::State& state) {
  const Index n = state.range(0);
  const InnerProductSpace space(n);
  const ConvexSet K = ConvexSet::box(n, -1.0, 1.0);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal;
  Vector y(n);
  for (Index i = 0; i < n; ++i) y[i] = 2 * normal(rng);
  for (auto _ : state) benchmark::DoNotOptimize(K.project(space, y));
}
BENCHMARK(BM_Projection)->Arg(64)->Arg(1024)->Arg(16384);

void BM_StabilizedSubproblem(benchmark::State& state) {
  const Instance inst = obstacle(static_cast<int>(state.range(0)));
  const PrimalDual v = shifted(*inst.problem.reference_kkt, 1e-3);
  const StabilizedSubproblem sub(inst.problem, v, 1e-12);
  for (auto _ : state) benchmark::DoNotOptimize(solve_stabilized(sub));
}
BENCHMARK(BM_StabilizedSubproblem)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMicrosecond);

void BM_OuterLoop(benchmark::State& state) {
  const Instance inst = obstacle(static_cast<int>(state.range(0)));
  SolverOptions o;
  o.record_timing = false;
  for (auto _ : state) benchmark::DoNotOptimize(run_stabilized_sqp(inst.problem, inst.default_start, o));
}
BENCHMARK(BM_OuterLoop)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
