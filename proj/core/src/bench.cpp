#include "noisybench/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <optional>
#include <thread>
#include <utility>

#include <json.hpp>

#include "noisybench/emulator.hpp"
#include "noisybench/errors.hpp"
#include "json_util.hpp"

namespace noisybench::bench {

using nlohmann::json;

TargetRef TargetRef::surface(surfaces::SurfaceSpec spec) {
  // Build one evaluator up front: validates the spec and pins the id (which
  // carries the noise suffix when present).
  const std::string id = surfaces::make_evaluator(spec)->id();
  return TargetRef(id, [spec] { return surfaces::make_evaluator(spec); });
}

TargetRef TargetRef::emulator(const std::filesystem::path& emu_path) {
  emulator::EmulatorModel model = emulator::load(emu_path);
  std::string id = emu_path.stem().string();
  return TargetRef(id, [model, id]() -> std::shared_ptr<Evaluator> {
    return std::make_shared<emulator::EmulatorEvaluator>(model, id, true);
  });
}

TargetRef TargetRef::custom(std::string id,
                            std::function<std::shared_ptr<Evaluator>()> factory) {
  if (id.empty()) throw ConfigError("custom target needs a non-empty id");
  if (!factory) throw ConfigError("custom target needs a factory");
  return TargetRef(std::move(id), std::move(factory));
}

TargetRef TargetRef::parse(const std::string& text) {
  if (text.size() > 4 && text.substr(text.size() - 4) == ".emu") {
    return emulator(text);
  }
  return surface(surfaces::SurfaceSpec::parse(text));
}

const std::vector<int>& checkpoint_ladder() {
  static const std::vector<int> ladder{1, 3, 10, 30, 100, 300, 1000, 3000, 10000};
  return ladder;
}

std::vector<int> checkpoints_for(int num_iter) {
  std::vector<int> out;
  for (int c : checkpoint_ladder()) {
    if (c <= num_iter) out.push_back(c);
  }
  return out;
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw ContractError("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw ContractError("quantile level must be in [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(h);
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = h - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

namespace {

CheckpointStats make_stats(int checkpoint, const std::vector<double>& values) {
  CheckpointStats s;
  s.checkpoint = checkpoint;
  double total = 0.0;
  for (double v : values) total += v;
  s.mean = total / static_cast<double>(values.size());
  s.median = quantile(values, 0.5);
  s.q25 = quantile(values, 0.25);
  s.q75 = quantile(values, 0.75);
  s.min = *std::min_element(values.begin(), values.end());
  s.max = *std::max_element(values.begin(), values.end());
  return s;
}

void validate_plan(const BenchmarkPlan& plan) {
  if (plan.planners.empty()) throw ConfigError("plan has no planners");
  if (plan.targets.empty()) throw ConfigError("plan has no targets");
  if (plan.num_iter < 1) throw ConfigError("num_iter must be at least 1");
  if (plan.repeats < 1) throw ConfigError("repeats must be at least 1");
  std::vector<std::string> names;
  for (const auto& p : plan.planners) names.push_back(planners::resolve_name(p.name));
  std::sort(names.begin(), names.end());
  if (std::adjacent_find(names.begin(), names.end()) != names.end()) {
    throw ConfigError("plan lists the same planner twice");
  }
  std::vector<std::string> ids;
  for (const auto& t : plan.targets) ids.push_back(t.id());
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    throw ConfigError("plan lists the same target twice");
  }
}

}  // namespace

BenchmarkReport run_benchmark(const BenchmarkPlan& plan, Database& db, int jobs) {
  validate_plan(plan);
  if (jobs < 1) throw ConfigError("jobs must be at least 1");

  const std::size_t n_planners = plan.planners.size();
  const std::size_t n_targets = plan.targets.size();
  const auto repeats = static_cast<std::size_t>(plan.repeats);
  const std::size_t total = n_planners * n_targets * repeats;

  std::vector<std::optional<Campaign>> results(total);
  std::atomic<std::size_t> next{0};

  const auto worker = [&] {
    for (;;) {
      const std::size_t j = next.fetch_add(1);
      if (j >= total) return;
      const std::size_t p = j / (n_targets * repeats);
      const std::size_t t = (j / repeats) % n_targets;
      const std::size_t r = j % repeats;

      planners::PlannerConfig config = plan.planners[p];
      config.name = planners::resolve_name(config.name);
      config.seed = plan.base_seed + static_cast<std::uint32_t>(r);
      const std::string id =
          planners::default_campaign_id(config, plan.targets[t].id());
      try {
        const auto evaluator = plan.targets[t].make_evaluator();
        results[j] = planners::optimize(std::move(config), *evaluator, plan.num_iter, id);
      } catch (const std::exception& e) {
        // Quarantine: the cell is reported as failed, the run carries on.
        Campaign failed(id, config.name, plan.targets[t].id(), config.goal, config.seed);
        failed.set_error(e.what());
        results[j] = std::move(failed);
      }
    }
  };

  const int n_workers = std::max(1, std::min<int>(jobs, static_cast<int>(total)));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_workers));
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }

  // Single writer, deterministic order regardless of worker scheduling.
  for (const auto& campaign : results) db.append(*campaign);

  BenchmarkReport report;
  report.num_iter = plan.num_iter;
  report.repeats = plan.repeats;
  report.base_seed = plan.base_seed;

  const std::vector<int> checkpoints = checkpoints_for(plan.num_iter);
  for (std::size_t p = 0; p < n_planners; ++p) {
    for (std::size_t t = 0; t < n_targets; ++t) {
      CellResult cell;
      cell.planner = planners::resolve_name(plan.planners[p].name);
      cell.target = plan.targets[t].id();

      std::vector<std::vector<double>> traces;
      for (std::size_t r = 0; r < repeats; ++r) {
        const Campaign& c = *results[(p * n_targets + t) * repeats + r];
        cell.campaign_ids.push_back(c.id());
        if (!c.error().empty() ||
            c.observations().size() != static_cast<std::size_t>(plan.num_iter)) {
          cell.failed_repeats.push_back(static_cast<int>(r));
          continue;
        }
        traces.push_back(best_so_far(c));
      }

      if (!traces.empty()) {
        cell.mean_trace.assign(static_cast<std::size_t>(plan.num_iter), 0.0);
        for (const auto& trace : traces) {
          for (std::size_t i = 0; i < trace.size(); ++i) cell.mean_trace[i] += trace[i];
        }
        for (double& v : cell.mean_trace) v /= static_cast<double>(traces.size());
        for (int c : checkpoints) {
          std::vector<double> at;
          at.reserve(traces.size());
          for (const auto& trace : traces) {
            at.push_back(trace[static_cast<std::size_t>(c - 1)]);
          }
          cell.checkpoints.push_back(make_stats(c, at));
        }
      }
      report.cells.push_back(std::move(cell));
    }
  }
  return report;
}

BaselineSummary baseline(const TargetRef& target, Database& db, int num_iter, int repeats,
                         std::uint32_t base_seed, Goal goal, int jobs) {
  BenchmarkPlan plan;
  planners::PlannerConfig random;
  random.name = "RandomSearch";
  random.goal = goal;
  plan.planners.push_back(std::move(random));
  plan.targets.push_back(target);
  plan.num_iter = num_iter;
  plan.repeats = repeats;
  plan.base_seed = base_seed;

  const BenchmarkReport report = run_benchmark(plan, db, jobs);
  BaselineSummary summary;
  summary.target_id = target.id();
  summary.num_iter = num_iter;
  summary.repeats = repeats;
  summary.checkpoints = report.cells.front().checkpoints;
  return summary;
}

std::vector<Campaign> campaigns_for(const Database& db, const std::string& target_id) {
  std::vector<Campaign> campaigns;
  for (const Campaign* c : db.for_target(target_id)) campaigns.push_back(*c);
  if (campaigns.empty()) {
    throw NotFoundError("no campaigns stored for target '" + target_id + "'");
  }
  return campaigns;
}

BaselineSummary summarize(const Database& db, const std::string& target_id) {
  const std::vector<Campaign> all = campaigns_for(db, target_id);
  std::vector<std::vector<double>> traces;
  for (const Campaign& c : all) {
    if (c.error().empty() && !c.observations().empty()) {
      traces.push_back(best_so_far(c));
    }
  }
  if (traces.empty()) {
    throw NotFoundError("no completed campaigns stored for target '" + target_id + "'");
  }
  std::size_t shortest = traces.front().size();
  for (const auto& t : traces) shortest = std::min(shortest, t.size());

  BaselineSummary summary;
  summary.target_id = target_id;
  summary.num_iter = static_cast<int>(shortest);
  summary.repeats = static_cast<int>(traces.size());
  for (int c : checkpoints_for(summary.num_iter)) {
    std::vector<double> at;
    at.reserve(traces.size());
    for (const auto& t : traces) at.push_back(t[static_cast<std::size_t>(c - 1)]);
    summary.checkpoints.push_back(make_stats(c, at));
  }
  return summary;
}

void write_report(const BenchmarkReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);

  json j;
  j["num_iter"] = report.num_iter;
  j["repeats"] = report.repeats;
  j["base_seed"] = report.base_seed;
  j["cells"] = json::array();
  for (const CellResult& cell : report.cells) {
    json jc;
    jc["planner"] = cell.planner;
    jc["target"] = cell.target;
    jc["campaigns"] = cell.campaign_ids;
    jc["failed_repeats"] = cell.failed_repeats;
    jc["mean_trace"] = cell.mean_trace;
    jc["checkpoints"] = json::array();
    for (const CheckpointStats& s : cell.checkpoints) {
      jc["checkpoints"].push_back({{"checkpoint", s.checkpoint},
                                   {"mean", s.mean},
                                   {"median", s.median},
                                   {"q25", s.q25},
                                   {"q75", s.q75},
                                   {"min", s.min},
                                   {"max", s.max}});
    }
    j["cells"].push_back(std::move(jc));
  }
  std::ofstream out(dir / "report.json", std::ios::trunc);
  if (!out) throw Error("cannot write " + (dir / "report.json").string());
  out << j.dump(2) << '\n';

  std::ofstream csv(dir / "summary.csv", std::ios::trunc);
  if (!csv) throw Error("cannot write " + (dir / "summary.csv").string());
  static const char* kStats[] = {"mean", "median", "q25", "q75", "min", "max"};
  csv << "checkpoint";
  for (const CellResult& cell : report.cells) {
    for (const char* stat : kStats) {
      csv << ',' << cell.target << '/' << cell.planner << '/' << stat;
    }
  }
  csv << '\n';
  for (std::size_t row = 0; row < checkpoints_for(report.num_iter).size(); ++row) {
    csv << checkpoints_for(report.num_iter)[row];
    for (const CellResult& cell : report.cells) {
      if (row < cell.checkpoints.size()) {
        const CheckpointStats& s = cell.checkpoints[row];
        for (double v : {s.mean, s.median, s.q25, s.q75, s.min, s.max}) {
          csv << ',' << detail::format_double(v);
        }
      } else {
        for (int k = 0; k < 6; ++k) csv << ",nan";
      }
    }
    csv << '\n';
  }
}

}  // namespace noisybench::bench
