#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>

#include "noisybench/dataset.hpp"
#include "noisybench/emulator.hpp"
#include "noisybench/errors.hpp"
#include "noisybench/rng.hpp"
#include "noisybench/surfaces.hpp"

using namespace noisybench;
using data::DatasetTable;
using emulator::ModelConfig;

namespace {

std::filesystem::path temp_dir() {
  auto dir = std::filesystem::temp_directory_path() / "noisybench_test_emulator";
  std::filesystem::create_directories(dir);
  return dir;
}

// d=1 table over [0,1] with y = f(x) on a dyadic grid (keeps affine feature
// rescaling exact in floating point).
DatasetTable grid_table(int n, double (*f)(double)) {
  DatasetTable t;
  t.name = "grid";
  t.space = std::make_shared<ParamSpace>(std::vector<ParamDef>{{"x", 0.0, 1.0}});
  t.target_name = "y";
  for (int i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) / n;
    t.rows.push_back({x, f(x)});
  }
  return t;
}

ModelConfig small_config(std::uint32_t seed = 3) {
  ModelConfig c;
  c.hidden_depth = 1;
  c.hidden_width = 16;
  c.members = 2;
  c.epochs = 400;
  c.seed = seed;
  return c;
}

double smooth(double x) { return std::sin(3.0 * x) + x; }

// Independent Spearman transcription (average ranks for ties).
double spearman_reference(std::vector<double> a, std::vector<double> b) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return v[x] < v[y]; });
    std::vector<double> r(v.size());
    std::size_t i = 0;
    while (i < order.size()) {
      std::size_t j = i;
      while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
      for (std::size_t k = i; k <= j; ++k) {
        r[order[k]] = 1.0 + 0.5 * static_cast<double>(i + j);
      }
      i = j + 1;
    }
    return r;
  };
  const auto ra = ranks(a), rb = ranks(b);
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += ra[i];
    mb += rb[i];
  }
  ma /= n;
  mb /= n;
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    cov += (ra[i] - ma) * (rb[i] - mb);
    va += (ra[i] - ma) * (ra[i] - ma);
    vb += (rb[i] - mb) * (rb[i] - mb);
  }
  return cov / std::sqrt(va * vb);
}

}  // namespace

TEST_CASE("metrics match closed-form references") {
  const std::vector<double> truth{1.0, 2.0, 4.0, 8.0};
  const std::vector<double> pred{1.5, 1.5, 4.5, 7.0};
  const auto m = emulator::compute_metrics(pred, truth);

  double ss_res = 0.0, mean = 0.0;
  for (double t : truth) mean += t;
  mean /= 4.0;
  double ss_tot = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    ss_res += (pred[i] - truth[i]) * (pred[i] - truth[i]);
    ss_tot += (truth[i] - mean) * (truth[i] - mean);
  }
  CHECK(m.r2 == doctest::Approx(1.0 - ss_res / ss_tot).epsilon(1e-12));
  CHECK(m.rmse == doctest::Approx(std::sqrt(ss_res / 4.0)).epsilon(1e-12));
  CHECK(m.spearman_rho == doctest::Approx(spearman_reference(pred, truth)).epsilon(1e-12));

  // monotone map preserves rank correlation exactly
  const std::vector<double> warped{0.1, 0.2, 0.9, 3.0};
  CHECK(emulator::compute_metrics(warped, truth).spearman_rho == doctest::Approx(1.0));
  const std::vector<double> reversed{8.0, 4.0, 2.0, 1.0};
  CHECK(emulator::compute_metrics(reversed, truth).spearman_rho == doctest::Approx(-1.0));
}

TEST_CASE("metrics agree with the reference on random tied data") {
  RngStream rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> a(50), b(50);
    for (std::size_t i = 0; i < 50; ++i) {
      a[i] = std::round(rng.uniform() * 10.0) / 10.0;  // force ties
      b[i] = std::round(rng.uniform() * 10.0) / 10.0;
    }
    if (std::set<double>(a.begin(), a.end()).size() < 2) continue;
    if (std::set<double>(b.begin(), b.end()).size() < 2) continue;
    const auto m = emulator::compute_metrics(a, b);
    CHECK(m.spearman_rho == doctest::Approx(spearman_reference(a, b)).epsilon(1e-12));
  }
}

TEST_CASE("metrics reject degenerate input") {
  using V = std::vector<double>;
  CHECK_THROWS_AS((void)emulator::compute_metrics(V{1.0}, V{1.0}), ValidationError);
  CHECK_THROWS_AS((void)emulator::compute_metrics(V{1.0, 2.0}, V{1.0, 2.0, 3.0}),
                  ValidationError);
  CHECK_THROWS_AS((void)emulator::compute_metrics(V{1.0, 2.0}, V{3.0, 3.0}),
                  ValidationError);
  CHECK_THROWS_AS((void)emulator::compute_metrics(V{1.0, std::nan("")}, V{1.0, 2.0}),
                  ValidationError);
}

TEST_CASE("dataset validation names the offending cell") {
  DatasetTable t = grid_table(12, smooth);
  data::validate_dataset(t);

  DatasetTable shorty = grid_table(9, smooth);
  CHECK_THROWS_AS(data::validate_dataset(shorty), ValidationError);

  DatasetTable bad = grid_table(12, smooth);
  bad.rows[4][0] = 1.5;  // outside [0,1]
  try {
    data::validate_dataset(bad);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("row 5") != std::string::npos);  // rows are named 1-based
    CHECK(msg.find("x") != std::string::npos);
  }

  DatasetTable nan_row = grid_table(12, smooth);
  nan_row.rows[7][1] = std::nan("");
  CHECK_THROWS_AS(data::validate_dataset(nan_row), ValidationError);

  DatasetTable ragged = grid_table(12, smooth);
  ragged.rows[3].push_back(1.0);
  CHECK_THROWS_AS(data::validate_dataset(ragged), ValidationError);
}

TEST_CASE("dataset csv round-trips through the sidecar format") {
  const auto dir = temp_dir();
  DatasetTable t = grid_table(20, smooth);
  t.name = "roundtrip";
  const auto csv = data::write_dataset(t, dir);
  const DatasetTable back = data::ingest(csv);
  CHECK(back.name == "roundtrip");
  CHECK(back.target_name == "y");
  CHECK(back.space->dim() == 1);
  CHECK(back.space->param(0).name == "x");
  CHECK(back.rows == t.rows);
}

TEST_CASE("ingest rejects malformed files with precise messages") {
  const auto dir = temp_dir();
  CHECK_THROWS_AS((void)data::ingest(dir / "missing.csv"), NotFoundError);

  // CSV without its sidecar
  const auto orphan = dir / "orphan.csv";
  std::ofstream(orphan) << "x,y\n0.5,1.0\n";
  CHECK_THROWS_AS((void)data::ingest(orphan), NotFoundError);

  DatasetTable t = grid_table(20, smooth);
  t.name = "broken";
  const auto csv = data::write_dataset(t, dir);

  // header column the meta does not know
  {
    std::ofstream out(dir / "broken.csv");
    out << "x,z\n";
    for (int i = 0; i < 20; ++i) out << 0.01 * i << "," << 1.0 << "\n";
  }
  CHECK_THROWS_AS((void)data::ingest(csv), ValidationError);

  // non-numeric cell
  {
    std::ofstream out(dir / "broken.csv");
    out << "x,y\n";
    out << "0.1,oops\n";
    for (int i = 0; i < 19; ++i) out << 0.01 * i << "," << 1.0 << "\n";
  }
  try {
    (void)data::ingest(csv);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("oops") != std::string::npos);
  }

  // header only
  std::ofstream(dir / "broken.csv") << "x,y\n";
  CHECK_THROWS_AS((void)data::ingest(csv), ValidationError);
}

TEST_CASE("split is deterministic, order-preserving, and exhaustive") {
  DatasetTable t = grid_table(25, smooth);
  const auto [train, test] = data::split(t, 0.8, 42);
  CHECK(train.size() == 20);  // ceil(0.8 * 25)
  CHECK(test.size() == 5);
  CHECK(train.name == "grid_train");
  CHECK(test.name == "grid_test");

  const auto [train2, test2] = data::split(t, 0.8, 42);
  CHECK(train.rows == train2.rows);
  CHECK(test.rows == test2.rows);
  const auto [train3, test3] = data::split(t, 0.8, 43);
  CHECK(train.rows != train3.rows);

  // each part keeps the original row order and together they cover the table
  auto is_subsequence = [&](const DatasetTable& part) {
    std::size_t cursor = 0;
    for (const auto& row : part.rows) {
      while (cursor < t.rows.size() && t.rows[cursor] != row) ++cursor;
      if (cursor == t.rows.size()) return false;
      ++cursor;
    }
    return true;
  };
  CHECK(is_subsequence(train));
  CHECK(is_subsequence(test));

  CHECK_THROWS_AS((void)data::split(t, 0.0, 1), ConfigError);
  CHECK_THROWS_AS((void)data::split(t, 1.0, 1), ConfigError);
}

TEST_CASE("synthetic datasets sample the surface in native coordinates") {
  const auto spec = surfaces::SurfaceSpec::parse("rastrigin:d=2");
  const DatasetTable t = data::gen_synthetic(spec, 50, 11);
  CHECK(t.name == "rastrigin_d2_n50");
  CHECK(t.size() == 50);
  CHECK(t.target_name == "target");
  CHECK(t.space->dim() == 2);
  CHECK(t.space->param(0).low == -5.0);
  CHECK(t.space->param(0).high == 5.0);
  data::validate_dataset(t);

  const DatasetTable again = data::gen_synthetic(spec, 50, 11);
  CHECK(t.rows == again.rows);
  const DatasetTable other = data::gen_synthetic(spec, 50, 12);
  CHECK(t.rows != other.rows);

  CHECK_THROWS_AS((void)data::gen_synthetic(spec, 5, 1), ConfigError);
}

TEST_CASE("registry honors NOISYBENCH_HOME") {
  const auto home = temp_dir() / "registry";
  std::filesystem::remove_all(home);
  setenv("NOISYBENCH_HOME", home.c_str(), 1);
  CHECK(data::registry_root() == home);
  CHECK(data::list_datasets().empty());

  DatasetTable t = grid_table(15, smooth);
  t.name = "staged";
  const auto staging = temp_dir() / "staging";
  std::filesystem::create_directories(staging);
  const auto csv = data::write_dataset(t, staging);
  const std::string name =
      data::add_dataset(csv, staging / "staged.meta.json");
  CHECK(name == "staged");
  CHECK(data::list_datasets() == std::vector<std::string>{"staged"});
  CHECK(data::ingest(data::datasets_dir() / "staged.csv").rows == t.rows);
  unsetenv("NOISYBENCH_HOME");
}

TEST_CASE("training fits a smooth function and is reproducible") {
  const DatasetTable t = grid_table(200, smooth);
  const ModelConfig config = small_config();
  const auto model = emulator::train(t, config);
  CHECK(model.accepted());
  CHECK(model.train_metrics().spearman_rho >= 0.90);
  CHECK(model.test_metrics().spearman_rho >= 0.90);
  CHECK(model.residual_sigma() >= 0.0);

  const auto again = emulator::train(t, config);
  RngStream probe(5);
  for (int i = 0; i < 40; ++i) {
    ParamVector x(model.space(), {probe.uniform()});
    CHECK(emulator::emulate(model, x, false) == emulator::emulate(again, x, false));
  }
}

TEST_CASE("affine feature rescaling does not change the model") {
  const int n = 256;
  DatasetTable plain = grid_table(n, smooth);
  DatasetTable scaled = plain;
  scaled.space = std::make_shared<ParamSpace>(std::vector<ParamDef>{{"x", 3.0, 7.0}});
  for (auto& row : scaled.rows) row[0] = 4.0 * row[0] + 3.0;

  const ModelConfig config = small_config(9);
  const auto a = emulator::train(plain, config);
  const auto b = emulator::train(scaled, config);
  RngStream probe(6);
  for (int i = 0; i < 40; ++i) {
    const double u = probe.uniform();
    ParamVector xa(a.space(), {u});
    ParamVector xb(b.space(), {4.0 * u + 3.0});
    CHECK(emulator::emulate(a, xa, false) ==
          doctest::Approx(emulator::emulate(b, xb, false)).epsilon(1e-6));
  }
}

TEST_CASE("output transforms constrain predictions") {
  const DatasetTable pos = grid_table(120, [](double x) { return std::exp(std::sin(4.0 * x)); });
  ModelConfig config = small_config(4);
  config.out_transform = emulator::OutTransform::Positive;
  const auto positive = emulator::train(pos, config);
  RngStream probe(7);
  for (int i = 0; i < 200; ++i) {
    ParamVector x(positive.space(), {probe.uniform()});
    CHECK(emulator::emulate(positive, x, false) > 0.0);
  }

  const DatasetTable within = grid_table(120, [](double x) {
    return 0.5 + 0.4 * std::sin(5.0 * x);
  });
  ModelConfig bounded = small_config(5);
  bounded.out_transform = emulator::OutTransform::Bounded;
  bounded.bound_low = 0.0;
  bounded.bound_high = 1.0;
  const auto banded = emulator::train(within, bounded);
  for (int i = 0; i < 200; ++i) {
    ParamVector x(banded.space(), {probe.uniform()});
    const double y = emulator::emulate(banded, x, false);
    CHECK(y >= 0.0);
    CHECK(y <= 1.0);
  }

  DatasetTable has_zero = grid_table(120, smooth);  // crosses zero
  CHECK_THROWS_AS((void)emulator::train(has_zero, config), ValidationError);
}

TEST_CASE("stochastic emulation spreads at least the residual noise") {
  const DatasetTable t = grid_table(200, smooth);
  const auto model = emulator::train(t, small_config(8));
  ParamVector x(model.space(), {0.4375});
  const double det = emulator::emulate(model, x, false);

  RngStream rng(100);
  const int n = 20000;
  double s = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = emulator::emulate(model, x, true, &rng);
    s += v;
    sq += v * v;
  }
  const double mean = s / n;
  const double var = sq / n - mean * mean;
  const double sigma2 = model.residual_sigma() * model.residual_sigma();
  CHECK(var >= 0.9 * sigma2);  // residual floor, allowing sampling error
  CHECK(std::fabs(mean - det) < 0.1 + 5.0 * model.residual_sigma() / std::sqrt(n));

  CHECK_THROWS_AS((void)emulator::emulate(model, x, true, nullptr), ContractError);
  auto wrong = std::make_shared<ParamSpace>(std::vector<ParamDef>{{"z", 0.0, 2.0}});
  CHECK_THROWS_AS((void)emulator::emulate(model, ParamVector(wrong, {1.0}), false),
                  ContractError);
}

TEST_CASE("saved models reload bit-identically") {
  const DatasetTable t = grid_table(200, smooth);
  const auto model = emulator::train(t, small_config(12));
  const auto path = temp_dir() / "model.emu";
  emulator::save(model, path);
  const auto loaded = emulator::load(path);

  CHECK(loaded.accepted() == model.accepted());
  CHECK(loaded.residual_sigma() == model.residual_sigma());
  CHECK(loaded.members() == model.members());
  RngStream probe(3);
  for (int i = 0; i < 60; ++i) {
    ParamVector x(model.space(), {probe.uniform()});
    CHECK(emulator::emulate(model, x, false) == emulator::emulate(loaded, x, false));
  }
  RngStream sa(9), sb(9);
  for (int i = 0; i < 60; ++i) {
    ParamVector x(model.space(), {0.25});
    CHECK(emulator::emulate(model, x, true, &sa) ==
          emulator::emulate(loaded, x, true, &sb));
  }

  CHECK_THROWS_AS((void)emulator::load(temp_dir() / "absent.emu"), NotFoundError);
}

TEST_CASE("tampered acceptance flags fail the load check") {
  const DatasetTable t = grid_table(200, smooth);
  const auto model = emulator::train(t, small_config(13));
  REQUIRE(model.accepted());
  const auto path = temp_dir() / "tampered.emu";
  emulator::save(model, path);

  std::ifstream in(path);
  std::string text((std::istreambuf_iterator<char>(in)), {});
  in.close();
  const auto pos = text.find("\"accepted\": true");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, std::string("\"accepted\": true").size(), "\"accepted\": false");
  std::ofstream(path) << text;
  CHECK_THROWS_AS((void)emulator::load(path), ValidationError);
}

TEST_CASE("future format versions are refused") {
  const DatasetTable t = grid_table(200, smooth);
  const auto model = emulator::train(t, small_config(14));
  const auto path = temp_dir() / "versioned.emu";
  emulator::save(model, path);
  std::ifstream in(path);
  std::string text((std::istreambuf_iterator<char>(in)), {});
  in.close();
  const auto pos = text.find("\"version\": 1");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, std::string("\"version\": 1").size(), "\"version\": 99");
  std::ofstream(path) << text;
  CHECK_THROWS_AS((void)emulator::load(path), VersionError);
}

TEST_CASE("cross-validation aggregates converged folds deterministically") {
  const DatasetTable t = grid_table(150, smooth);
  ModelConfig config = small_config(20);
  config.epochs = 150;
  const auto report = emulator::cross_validate(t, config, 3);
  CHECK(report.k == 3);
  REQUIRE(report.folds.size() == 3);
  for (int f = 0; f < 3; ++f) CHECK(report.folds[f].fold == f);

  const auto again = emulator::cross_validate(t, config, 3);
  for (int f = 0; f < 3; ++f) {
    CHECK(report.folds[f].converged == again.folds[f].converged);
    if (report.folds[f].converged) {
      CHECK(report.folds[f].metrics.rmse == again.folds[f].metrics.rmse);
    }
  }
  CHECK_THROWS_AS((void)emulator::cross_validate(t, config, 1), ConfigError);
}

TEST_CASE("emulator evaluator exposes the model as a target") {
  const DatasetTable t = grid_table(200, smooth);
  const auto model = emulator::train(t, small_config(21));
  emulator::EmulatorEvaluator det(model, "grid_emu", false);
  CHECK(det.id() == "grid_emu");
  CHECK(det.space()->dim() == 1);
  RngStream rng(2);
  ParamVector x(model.space(), {0.5});
  CHECK(det.evaluate(x, rng) == emulator::emulate(model, x, false));

  emulator::EmulatorEvaluator noisy(model, "grid_emu", true);
  RngStream ra(4), rb(4);
  CHECK(noisy.evaluate(x, ra) == noisy.evaluate(x, rb));
  CHECK_THROWS_AS(emulator::EmulatorEvaluator(model, "", false), ConfigError);
}
