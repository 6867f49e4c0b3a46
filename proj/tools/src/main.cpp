#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "noisybench/bench.hpp"
#include "noisybench/database.hpp"
#include "noisybench/dataset.hpp"
#include "noisybench/emulator.hpp"
#include "noisybench/errors.hpp"
#include "noisybench/noise.hpp"
#include "noisybench/planners.hpp"
#include "noisybench/plot.hpp"
#include "noisybench/surfaces.hpp"

namespace {

using namespace noisybench;

Goal parse_goal(const std::string& text) {
  if (text == "min" || text == "minimize") return Goal::Minimize;
  if (text == "max" || text == "maximize") return Goal::Maximize;
  throw ConfigError("unknown goal '" + text + "' (use min or max)");
}

// "--set key=value" entries; values must be numeric.
std::map<std::string, double> parse_hyperparams(const std::vector<std::string>& entries) {
  std::map<std::string, double> out;
  for (const std::string& entry : entries) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ConfigError("--set expects key=value, got '" + entry + "'");
    }
    const std::string key = entry.substr(0, eq);
    const std::string value = entry.substr(eq + 1);
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (value.empty() || end != value.c_str() + value.size()) {
      throw ConfigError("--set " + key + " needs a numeric value, got '" + value + "'");
    }
    out[key] = v;
  }
  return out;
}

bench::TargetRef make_target(const std::string& surface, const std::string& emulator,
                             const std::string& noise) {
  if (!surface.empty() && !emulator.empty()) {
    throw ConfigError("give either --surface or --emulator, not both");
  }
  if (!emulator.empty()) {
    if (!noise.empty()) throw ConfigError("--noise applies to surfaces only");
    return bench::TargetRef::emulator(emulator);
  }
  if (surface.empty()) throw ConfigError("a target is required: --surface or --emulator");
  surfaces::SurfaceSpec spec = surfaces::SurfaceSpec::parse(surface);
  if (!noise.empty()) spec.noise = noise::NoiseSpec::parse(noise);
  return bench::TargetRef::surface(std::move(spec));
}

std::string default_db() {
  return (data::registry_root() / "campaigns.jsonl").string();
}

void print_checkpoints(const std::vector<bench::CheckpointStats>& rows) {
  std::printf("%10s %14s %14s %14s %14s\n", "evals", "mean", "median", "q25", "q75");
  for (const auto& s : rows) {
    std::printf("%10d %14.6g %14.6g %14.6g %14.6g\n", s.checkpoint, s.mean, s.median,
                s.q25, s.q75);
  }
}

data::DatasetTable load_table(const std::string& ref) {
  const std::filesystem::path direct(ref);
  if (std::filesystem::exists(direct) && direct.extension() == ".csv") {
    return data::ingest(direct);
  }
  const std::filesystem::path named = data::datasets_dir() / (ref + ".csv");
  if (std::filesystem::exists(named)) return data::ingest(named);
  throw NotFoundError("dataset '" + ref + "' is neither a CSV file nor a registry entry");
}

struct RunArgs {
  std::string planner = "random";
  std::string surface, emulator, noise;
  int iters = 100;
  std::uint32_t seed = 0;
  std::string goal = "min";
  std::string db = default_db();
  std::string id;
  std::vector<std::string> set;
};

struct BenchArgs {
  std::vector<std::string> planners;
  std::vector<std::string> surfaces;
  std::vector<std::string> emulators;
  std::string noise;
  int iters = 100;
  int repeats = 1;
  std::uint32_t seed = 0;
  std::string goal = "min";
  std::string db = default_db();
  std::string out;
  int jobs = 1;
};

struct BaselineArgs {
  std::string surface, emulator, noise;
  int iters = 10000;
  int repeats = 100;
  std::uint32_t seed = 0;
  std::string goal = "min";
  std::string db = default_db();
  int jobs = 1;
};

struct TrainArgs {
  std::string data;
  std::string out;
  emulator::ModelConfig config;
  std::string activation = "softplus";
  std::string transform = "identity";
  bool no_bootstrap = false;
  int cv = 0;
};

int cmd_run(const RunArgs& a) {
  planners::PlannerConfig config;
  config.name = planners::resolve_name(a.planner);
  config.goal = parse_goal(a.goal);
  config.seed = a.seed;
  config.hyperparams = parse_hyperparams(a.set);

  const bench::TargetRef target = make_target(a.surface, a.emulator, a.noise);
  const auto evaluator = target.make_evaluator();
  Database db(a.db);
  const Campaign campaign = planners::optimize(config, *evaluator, a.iters, a.id);
  db.append(campaign);

  std::printf("campaign %s: %zu observations on %s\n", campaign.id().c_str(),
              campaign.size(), campaign.surface_id().c_str());
  if (!campaign.observations().empty()) {
    std::printf("best value: %.10g\n", best_so_far(campaign).back());
  }
  if (!campaign.error().empty()) {
    std::fprintf(stderr, "campaign stopped early: %s\n", campaign.error().c_str());
    return 1;
  }
  return 0;
}

int cmd_benchmark(const BenchArgs& a) {
  bench::BenchmarkPlan plan;
  const Goal goal = parse_goal(a.goal);
  for (const std::string& name : a.planners) {
    planners::PlannerConfig config;
    config.name = name;
    config.goal = goal;
    plan.planners.push_back(std::move(config));
  }
  for (const std::string& s : a.surfaces) {
    plan.targets.push_back(make_target(s, "", a.noise));
  }
  for (const std::string& e : a.emulators) {
    plan.targets.push_back(bench::TargetRef::emulator(e));
  }
  plan.num_iter = a.iters;
  plan.repeats = a.repeats;
  plan.base_seed = a.seed;

  Database db(a.db);
  const bench::BenchmarkReport report = bench::run_benchmark(plan, db, a.jobs);
  for (const auto& cell : report.cells) {
    if (cell.mean_trace.empty()) {
      std::printf("%-20s %-24s all %d repeats failed\n", cell.planner.c_str(),
                  cell.target.c_str(), a.repeats);
    } else {
      std::printf("%-20s %-24s mean best %.6g over %zu repeats\n", cell.planner.c_str(),
                  cell.target.c_str(), cell.mean_trace.back(),
                  cell.campaign_ids.size() - cell.failed_repeats.size());
    }
  }
  if (!a.out.empty()) {
    bench::write_report(report, a.out);
    std::printf("report written to %s\n", a.out.c_str());
  }
  return 0;
}

int cmd_baseline(const BaselineArgs& a) {
  const bench::TargetRef target = make_target(a.surface, a.emulator, a.noise);
  Database db(a.db);
  const bench::BaselineSummary summary = bench::baseline(
      target, db, a.iters, a.repeats, a.seed, parse_goal(a.goal), a.jobs);
  std::printf("random-search baseline on %s (%d repeats x %d evals)\n",
              summary.target_id.c_str(), summary.repeats, summary.num_iter);
  print_checkpoints(summary.checkpoints);
  return 0;
}

int cmd_train(TrainArgs& a) {
  const data::DatasetTable table = load_table(a.data);
  a.config.activation = a.activation;
  a.config.out_transform = emulator::transform_from_string(a.transform);
  a.config.bootstrap = !a.no_bootstrap;

  if (a.cv > 0) {
    const emulator::CvReport cv = emulator::cross_validate(table, a.config, a.cv);
    std::printf("%d-fold cross-validation on %s:\n", cv.k, table.name.c_str());
    for (const auto& fold : cv.folds) {
      if (fold.converged) {
        std::printf("  fold %d: r2=%.4f rho=%.4f rmse=%.4g\n", fold.fold,
                    fold.metrics.r2, fold.metrics.spearman_rho, fold.metrics.rmse);
      } else {
        std::printf("  fold %d: failed (%s)\n", fold.fold, fold.note.c_str());
      }
    }
    std::printf("  mean: r2=%.4f rho=%.4f rmse=%.4g\n", cv.mean.r2, cv.mean.spearman_rho,
                cv.mean.rmse);
  }

  const emulator::EmulatorModel model = emulator::train(table, a.config);
  std::printf("train: r2=%.4f rho=%.4f rmse=%.4g\n", model.train_metrics().r2,
              model.train_metrics().spearman_rho, model.train_metrics().rmse);
  std::printf("test:  r2=%.4f rho=%.4f rmse=%.4g\n", model.test_metrics().r2,
              model.test_metrics().spearman_rho, model.test_metrics().rmse);
  std::printf("residual sigma: %.4g\n", model.residual_sigma());
  std::printf("accepted: %s\n", model.accepted() ? "yes" : "no");

  std::filesystem::path out = a.out.empty()
                                  ? data::emulators_dir() / (table.name + ".emu")
                                  : std::filesystem::path(a.out);
  emulator::save(model, out);
  std::printf("model written to %s\n", out.string().c_str());
  return model.accepted() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"noisybench: planner benchmarking on noisy surfaces and emulators"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML-style config file; command-line flags win");
  app.failure_message(CLI::FailureMessage::help);

  RunArgs run_args;
  CLI::App* run = app.add_subcommand("run", "Run one optimization campaign");
  run->add_option("--planner,-p", run_args.planner, "planner name (see benchmark --help)")
      ->capture_default_str();
  run->add_option("--surface", run_args.surface,
                  "surface spec, e.g. dejong:d=2 or everest:d=2");
  run->add_option("--emulator", run_args.emulator, "path to a trained .emu model");
  run->add_option("--noise", run_args.noise, "noise spec applied to the surface, e.g. gaussian:0.5");
  run->add_option("--iters,-n", run_args.iters, "number of evaluations")->capture_default_str();
  run->add_option("--seed", run_args.seed, "campaign seed")->capture_default_str();
  run->add_option("--goal", run_args.goal, "min or max")->capture_default_str();
  run->add_option("--db", run_args.db, "campaign database (JSONL)")->capture_default_str();
  run->add_option("--id", run_args.id, "campaign id (default: planner_target_sSEED)");
  run->add_option("--set", run_args.set, "planner hyperparameter, key=value (repeatable)");

  BenchArgs bench_args;
  CLI::App* bench_cmd = app.add_subcommand("benchmark", "Run a planner x target grid");
  bench_cmd->add_option("--planner,-p", bench_args.planners, "planner name (repeatable)")
      ->required();
  bench_cmd->add_option("--surface", bench_args.surfaces, "surface spec (repeatable)");
  bench_cmd->add_option("--emulator", bench_args.emulators, "path to a .emu model (repeatable)");
  bench_cmd->add_option("--noise", bench_args.noise, "noise spec applied to every surface");
  bench_cmd->add_option("--iters,-n", bench_args.iters, "evaluations per campaign")
      ->capture_default_str();
  bench_cmd->add_option("--repeats,-r", bench_args.repeats, "campaigns per cell")
      ->capture_default_str();
  bench_cmd->add_option("--seed", bench_args.seed, "base seed; repeat r uses seed base+r")
      ->capture_default_str();
  bench_cmd->add_option("--goal", bench_args.goal, "min or max")->capture_default_str();
  bench_cmd->add_option("--db", bench_args.db, "campaign database (JSONL)")
      ->capture_default_str();
  bench_cmd->add_option("--out", bench_args.out, "directory for report.json and summary.csv");
  bench_cmd->add_option("--jobs,-j", bench_args.jobs, "parallel workers; results do not depend on it")
      ->capture_default_str();

  BaselineArgs base_args;
  CLI::App* base_cmd = app.add_subcommand("baseline", "Random-search reference on one target");
  base_cmd->add_option("--surface", base_args.surface, "surface spec");
  base_cmd->add_option("--emulator", base_args.emulator, "path to a .emu model");
  base_cmd->add_option("--noise", base_args.noise, "noise spec applied to the surface");
  base_cmd->add_option("--iters,-n", base_args.iters, "evaluations per campaign")
      ->capture_default_str();
  base_cmd->add_option("--repeats,-r", base_args.repeats, "number of campaigns")
      ->capture_default_str();
  base_cmd->add_option("--seed", base_args.seed, "base seed")->capture_default_str();
  base_cmd->add_option("--goal", base_args.goal, "min or max")->capture_default_str();
  base_cmd->add_option("--db", base_args.db, "campaign database (JSONL)")
      ->capture_default_str();
  base_cmd->add_option("--jobs,-j", base_args.jobs, "parallel workers")->capture_default_str();

  TrainArgs train_args;
  CLI::App* train = app.add_subcommand("train-emulator", "Fit an ensemble surrogate to a dataset");
  train->add_option("--data", train_args.data, "dataset name in the registry, or a CSV path")
      ->required();
  train->add_option("--out", train_args.out, "output .emu path (default: registry)");
  train->add_option("--depth", train_args.config.hidden_depth, "hidden layers per member")
      ->capture_default_str();
  train->add_option("--width", train_args.config.hidden_width, "units per hidden layer")
      ->capture_default_str();
  train->add_option("--members", train_args.config.members, "ensemble size")
      ->capture_default_str();
  train->add_option("--activation", train_args.activation, "softplus, tanh, or relu")
      ->capture_default_str();
  train->add_option("--transform", train_args.transform,
                    "output transform: identity, positive, or bounded")
      ->capture_default_str();
  train->add_option("--bound-low", train_args.config.bound_low, "lower bound (bounded transform)")
      ->capture_default_str();
  train->add_option("--bound-high", train_args.config.bound_high, "upper bound (bounded transform)")
      ->capture_default_str();
  train->add_option("--epochs", train_args.config.epochs, "max training epochs")
      ->capture_default_str();
  train->add_option("--lr", train_args.config.learning_rate, "learning rate")
      ->capture_default_str();
  train->add_option("--batch", train_args.config.batch_size, "mini-batch size")
      ->capture_default_str();
  train->add_option("--momentum", train_args.config.momentum, "SGD momentum")
      ->capture_default_str();
  train->add_option("--split-ratio", train_args.config.split_ratio, "train fraction of the data")
      ->capture_default_str();
  train->add_option("--seed", train_args.config.seed, "training seed")->capture_default_str();
  train->add_flag("--no-bootstrap", train_args.no_bootstrap,
                  "train every member on the full training set");
  train->add_option("--cv", train_args.cv, "also run k-fold cross-validation (0 = off)")
      ->capture_default_str();

  CLI::App* dataset = app.add_subcommand("dataset", "Manage the dataset registry");
  dataset->require_subcommand(1);
  CLI::App* ds_list = dataset->add_subcommand("list", "List registered datasets");
  (void)ds_list;

  std::string add_csv, add_meta;
  CLI::App* ds_add = dataset->add_subcommand("add", "Validate and copy a dataset into the registry");
  ds_add->add_option("--data", add_csv, "CSV file with named feature columns and a target")
      ->required();
  ds_add->add_option("--meta", add_meta, "sidecar JSON (default: <data>.meta.json)");

  std::string gen_kind, gen_noise;
  int gen_n = 0;
  std::uint32_t gen_seed = 0;
  CLI::App* ds_gen = dataset->add_subcommand("gen-synthetic", "Sample a surface into a dataset");
  ds_gen->add_option("--kind", gen_kind, "surface spec, e.g. dejong or rastrigin:d=3")
      ->required();
  ds_gen->add_option("--n", gen_n, "number of rows")->required();
  ds_gen->add_option("--noise", gen_noise, "noise spec added to the target column");
  ds_gen->add_option("--seed", gen_seed, "sampling seed")->capture_default_str();

  std::string plot_db = default_db(), plot_out = "plots";
  CLI::App* plot_cmd = app.add_subcommand("plot", "Render convergence charts from a database");
  plot_cmd->add_option("--db", plot_db, "campaign database (JSONL)")->capture_default_str();
  plot_cmd->add_option("--out", plot_out, "output directory for SVG and CSV files")
      ->capture_default_str();

  try {
    app.parse(argc, argv);

    if (*run) return cmd_run(run_args);
    if (*bench_cmd) return cmd_benchmark(bench_args);
    if (*base_cmd) return cmd_baseline(base_args);
    if (*train) return cmd_train(train_args);
    if (*dataset) {
      if (*ds_list) {
        for (const std::string& name : data::list_datasets()) std::printf("%s\n", name.c_str());
        return 0;
      }
      if (*ds_add) {
        std::filesystem::path meta = add_meta.empty()
                                         ? std::filesystem::path(add_csv).replace_extension(
                                               ".meta.json")
                                         : std::filesystem::path(add_meta);
        const std::string name = data::add_dataset(add_csv, meta);
        std::printf("added dataset %s to %s\n", name.c_str(),
                    data::datasets_dir().string().c_str());
        return 0;
      }
      surfaces::SurfaceSpec spec = surfaces::SurfaceSpec::parse(gen_kind);
      if (!gen_noise.empty()) spec.noise = noise::NoiseSpec::parse(gen_noise);
      const data::DatasetTable table = data::gen_synthetic(spec, gen_n, gen_seed);
      const std::filesystem::path path = data::write_dataset(table, data::datasets_dir());
      std::printf("wrote %zu rows to %s\n", table.size(), path.string().c_str());
      return 0;
    }
    const auto rendered = plot::render(Database::load(plot_db), plot_out);
    for (const auto& r : rendered) {
      std::printf("%s -> %s\n", r.target.c_str(), r.svg.string().c_str());
    }
    return 0;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
