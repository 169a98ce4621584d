#include <tumorfbs/control.hpp>
#include <tumorfbs/steady.hpp>

#include <benchmark/benchmark.h>

using namespace tumorfbs;

namespace {

Grid grid_for(const benchmark::State &state, const ModelParams &p) {
  const auto n_xi = static_cast<std::size_t>(state.range(0));
  return Grid(n_xi, 10 * (n_xi - 1) + 1, p.T);
}

void BM_StateSolve(benchmark::State &state) {
  const ModelParams p;
  const Grid g = grid_for(state, p);
  const auto m = ControlPath::constant(g, 0.35);
  for (auto _ : state) benchmark::DoNotOptimize(solve_state(m, p, g).rho.back());
  state.SetComplexityN(static_cast<benchmark::IterationCount>(g.n_xi() * g.n_t()));
}
BENCHMARK(BM_StateSolve)->Arg(51)->Arg(101)->Arg(201)->Unit(benchmark::kMillisecond)->Complexity();

void BM_AdjointSolve(benchmark::State &state) {
  const ModelParams p;
  const Grid g = grid_for(state, p);
  const auto m = ControlPath::constant(g, 0.35);
  const auto s = solve_state(m, p, g);
  for (auto _ : state) benchmark::DoNotOptimize(solve_adjoint(s, m, p, g).lambda.front());
}
BENCHMARK(BM_AdjointSolve)->Arg(51)->Arg(201)->Unit(benchmark::kMillisecond);

void BM_ForwardBackwardSweep(benchmark::State &state) {
  const ModelParams p;
  const Grid g = grid_for(state, p);
  const auto m0 = ControlPath::constant(g, 0.35);
  for (auto _ : state) benchmark::DoNotOptimize(fbs_optimize(m0, p, g).J);
}
BENCHMARK(BM_ForwardBackwardSweep)->Arg(51)->Arg(201)->Unit(benchmark::kMillisecond);

void BM_SteadyFixedPoint(benchmark::State &state) {
  ModelParams p;
  p.B = 2.0;
  const Grid g(201, 2, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(steady_fixed_point(0.8, p, g, 1e-5).m);
}
BENCHMARK(BM_SteadyFixedPoint);

} // namespace

BENCHMARK_MAIN();
