#include <benchmark/benchmark.h>

#include <cstddef>
#include <string>
#include <vector>

#include "noisybench/noise.hpp"
#include "noisybench/rng.hpp"
#include "noisybench/surfaces.hpp"

using namespace noisybench;

namespace {

std::vector<std::vector<double>> unit_points(std::size_t n, std::size_t dim) {
  RngStream rng(91);
  std::vector<std::vector<double>> pts(n, std::vector<double>(dim));
  for (auto& p : pts) {
    for (double& u : p) u = rng.uniform();
  }
  return pts;
}

void surface_value(benchmark::State& state, const std::string& kind) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const auto surface = surfaces::make_surface(surfaces::SurfaceSpec::parse(kind + ":d=" + std::to_string(dim)));
  const auto pts = unit_points(256, dim);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(surface->value(pts[i]));
    i = (i + 1) & 255;
  }
  state.SetItemsProcessed(state.iterations());
}

// Full evaluator path: unit lift, bounds check, noise draw.
void noisy_evaluate(benchmark::State& state) {
  surfaces::SurfaceSpec spec = surfaces::SurfaceSpec::parse("rastrigin:d=8");
  spec.noise = noise::NoiseSpec::gaussian(0.5);
  const auto target = surfaces::make_evaluator(spec);
  const auto pts = unit_points(256, 8);
  std::vector<ParamVector> xs;
  xs.reserve(pts.size());
  for (const auto& p : pts) xs.push_back(lift_from_unit(target->space(), p));
  RngStream rng(7);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(target->evaluate(xs[i], rng));
    i = (i + 1) & 255;
  }
  state.SetItemsProcessed(state.iterations());
}

}  // namespace

BENCHMARK_CAPTURE(surface_value, rastrigin, "rastrigin")->Arg(2)->Arg(8)->Arg(32);
BENCHMARK_CAPTURE(surface_value, ackley_path, "ackley_path")->Arg(2)->Arg(8)->Arg(32);
BENCHMARK_CAPTURE(surface_value, levy, "levy")->Arg(2)->Arg(8)->Arg(32);
BENCHMARK_CAPTURE(surface_value, michalewicz, "michalewicz")->Arg(2)->Arg(8)->Arg(32);
BENCHMARK(noisy_evaluate);
