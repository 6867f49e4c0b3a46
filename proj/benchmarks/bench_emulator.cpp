#include <benchmark/benchmark.h>

#include <cmath>
#include <cstddef>
#include <memory>
#include <vector>

#include "noisybench/dataset.hpp"
#include "noisybench/emulator.hpp"
#include "noisybench/param_space.hpp"
#include "noisybench/rng.hpp"

using namespace noisybench;

namespace {

data::DatasetTable wave_table(int n) {
  data::DatasetTable t;
  t.name = "wave";
  t.space = std::make_shared<ParamSpace>(std::vector<ParamDef>{{"x", 0.0, 1.0}});
  t.target_name = "y";
  RngStream rng(12345);
  for (int i = 0; i < n; ++i) {
    const double x = rng.uniform();
    t.rows.push_back({x, std::sin(6.283185307179586 * x) + rng.normal(0.0, 0.05)});
  }
  return t;
}

emulator::ModelConfig small_config() {
  emulator::ModelConfig c;
  c.hidden_depth = 1;
  c.hidden_width = 16;
  c.members = 2;
  c.epochs = 300;
  c.seed = 4;
  return c;
}

// Trained once and shared; benchmark setup time is not measured.
const emulator::EmulatorModel& shared_model() {
  static const emulator::EmulatorModel model = emulator::train(wave_table(200), small_config());
  return model;
}

std::vector<ParamVector> probe_points(const emulator::EmulatorModel& model, std::size_t n) {
  RngStream rng(31);
  std::vector<ParamVector> xs;
  xs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs.emplace_back(model.space(), std::vector<double>{rng.uniform()});
  }
  return xs;
}

void emulate_deterministic(benchmark::State& state) {
  const auto& model = shared_model();
  const auto xs = probe_points(model, 256);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(emulator::emulate(model, xs[i], false));
    i = (i + 1) & 255;
  }
  state.SetItemsProcessed(state.iterations());
}

void emulate_stochastic(benchmark::State& state) {
  const auto& model = shared_model();
  const auto xs = probe_points(model, 256);
  RngStream rng(17);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(emulator::emulate(model, xs[i], true, &rng));
    i = (i + 1) & 255;
  }
  state.SetItemsProcessed(state.iterations());
}

void train_small(benchmark::State& state) {
  const auto table = wave_table(200);
  const auto config = small_config();
  for (auto _ : state) {
    benchmark::DoNotOptimize(emulator::train(table, config).accepted());
  }
}

void metrics_1k(benchmark::State& state) {
  RngStream rng(3);
  std::vector<double> truth(1000), pred(1000);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    truth[i] = rng.uniform();
    pred[i] = truth[i] + rng.normal(0.0, 0.1);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(emulator::compute_metrics(pred, truth).spearman_rho);
  }
}

}  // namespace

BENCHMARK(emulate_deterministic);
BENCHMARK(emulate_stochastic);
BENCHMARK(train_small)->Unit(benchmark::kMillisecond);
BENCHMARK(metrics_1k)->Unit(benchmark::kMicrosecond);
