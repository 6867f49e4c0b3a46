#include <benchmark/benchmark.h>

#include <cstddef>
#include <string>

#include "noisybench/param_space.hpp"
#include "noisybench/planners.hpp"

using namespace noisybench;

namespace {

// One state iteration = a 64-evaluation campaign on a fixed quadratic.
// Planners whose per-ask cost grows with history (GpBayesOpt most of all)
// are charged for the whole loop, not just an unrepresentative first ask.
void planner_loop(benchmark::State& state, const std::string& name) {
  const auto space = ParamSpace::unit(4);
  constexpr int kEvals = 64;
  for (auto _ : state) {
    planners::PlannerConfig config;
    config.name = name;
    config.seed = 11;
    const auto planner = planners::make_planner(config, space);
    double best = 1e300;
    for (int i = 0; i < kEvals; ++i) {
      const ParamVector x = planner->ask();
      double v = 0.0;
      for (std::size_t j = 0; j < x.dim(); ++j) v += (x[j] - 0.3) * (x[j] - 0.3);
      planner->tell(x, v);
      if (v < best) best = v;
    }
    benchmark::DoNotOptimize(best);
  }
  state.SetItemsProcessed(state.iterations() * kEvals);
}

}  // namespace

BENCHMARK_CAPTURE(planner_loop, random, "RandomSearch");
BENCHMARK_CAPTURE(planner_loop, grid, "GridSearch");
BENCHMARK_CAPTURE(planner_loop, lhs, "LatinHypercube");
BENCHMARK_CAPTURE(planner_loop, sobol, "Sobol");
BENCHMARK_CAPTURE(planner_loop, simplex, "Simplex");
BENCHMARK_CAPTURE(planner_loop, steepest, "SteepestDescent");
BENCHMARK_CAPTURE(planner_loop, de, "DifferentialEvolution");
BENCHMARK_CAPTURE(planner_loop, pso, "ParticleSwarm");
BENCHMARK_CAPTURE(planner_loop, cmaes, "CmaEs");
BENCHMARK_CAPTURE(planner_loop, ga, "Genetic");
BENCHMARK_CAPTURE(planner_loop, basin, "BasinHopping");
BENCHMARK_CAPTURE(planner_loop, gp, "GpBayesOpt")->Unit(benchmark::kMillisecond);
