#include <benchmark/benchmark.h>

#include "arrowqp/generators.hpp"
#include "arrowqp/ipm.hpp"

using namespace arrowqp;

namespace
{

void solve_spring_mass(benchmark::State& state, Backend backend)
{
    SpringMassConfig cfg;
    cfg.M = state.range(0);
    cfg.N = 15;
    Settings settings;
    settings.backend = backend;
    Solver solver(spring_mass(cfg).problem, settings);
    int iterations = 0;
    for (auto _ : state) iterations = solver.solve().iterations;
    state.counters["iterations"] = iterations;
}

void solve_scenario(benchmark::State& state)
{
    ScenarioConfig cfg;
    cfg.M = state.range(0);
    cfg.N = 15;
    cfg.N_s = state.range(1);
    Solver solver(scenario(cfg).problem);
    for (auto _ : state) benchmark::DoNotOptimize(solver.solve().iterations);
}

} // namespace

BENCHMARK_CAPTURE(solve_spring_mass, btda, Backend::btda)->DenseRange(2, 20, 6)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(solve_spring_mass, dense, Backend::dense)->DenseRange(2, 8, 3)->Unit(benchmark::kMicrosecond);
BENCHMARK(solve_scenario)->ArgsProduct({{2, 4}, {2, 4}})->Unit(benchmark::kMicrosecond);
