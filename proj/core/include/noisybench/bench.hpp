#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "noisybench/campaign.hpp"
#include "noisybench/database.hpp"
#include "noisybench/evaluator.hpp"
#include "noisybench/planners.hpp"
#include "noisybench/surfaces.hpp"

namespace noisybench::bench {

// Something a campaign can run against: an analytical surface, a trained
// emulator file, or a programmatic evaluator factory (tests, ad-hoc targets).
class TargetRef {
 public:
  static TargetRef surface(surfaces::SurfaceSpec spec);
  static TargetRef emulator(const std::filesystem::path& emu_path);
  static TargetRef custom(std::string id,
                          std::function<std::shared_ptr<Evaluator>()> factory);

  // "<something>.emu" loads an emulator file; anything else parses as a
  // surface spec.
  static TargetRef parse(const std::string& text);

  const std::string& id() const { return id_; }
  std::shared_ptr<Evaluator> make_evaluator() const { return factory_(); }

 private:
  TargetRef(std::string id, std::function<std::shared_ptr<Evaluator>()> factory)
      : id_(std::move(id)), factory_(std::move(factory)) {}

  std::string id_;
  std::function<std::shared_ptr<Evaluator>()> factory_;
};

struct BenchmarkPlan {
  std::vector<planners::PlannerConfig> planners;  // distinct names; per-config seeds are ignored
  std::vector<TargetRef> targets;                 // distinct ids
  int num_iter = 100;
  int repeats = 1;
  std::uint32_t base_seed = 0;
};

// The fixed checkpoint ladder, truncated to counts <= num_iter.
const std::vector<int>& checkpoint_ladder();
std::vector<int> checkpoints_for(int num_iter);

struct CheckpointStats {
  int checkpoint = 0;
  double mean = 0.0;
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
  double min = 0.0;
  double max = 0.0;
};

// Aggregates for one (planner, target) pair over the plan's repeats.
// Campaigns that ended early (error flag set) are excluded from the numbers
// and listed in failed_repeats.
struct CellResult {
  std::string planner;
  std::string target;
  std::vector<std::string> campaign_ids;  // one per repeat, in repeat order
  std::vector<int> failed_repeats;
  std::vector<double> mean_trace;  // mean best-so-far per evaluation index
  std::vector<CheckpointStats> checkpoints;
};

struct BenchmarkReport {
  int num_iter = 0;
  int repeats = 0;
  std::uint32_t base_seed = 0;
  std::vector<CellResult> cells;  // planner-major, target-minor plan order
};

struct BaselineSummary {
  std::string target_id;
  int num_iter = 0;
  int repeats = 0;
  std::vector<CheckpointStats> checkpoints;
};

// Runs every (planner, target, repeat) campaign, appends each to the db, and
// aggregates the traces. The campaign seed for repeat r is base_seed + r for
// every planner, so all planners face identical seed sets. `jobs` sets the
// worker count; results do not depend on it.
BenchmarkReport run_benchmark(const BenchmarkPlan& plan, Database& db, int jobs = 1);

// RandomSearch reference distribution on one target.
BaselineSummary baseline(const TargetRef& target, Database& db, int num_iter = 10000,
                         int repeats = 100, std::uint32_t base_seed = 0,
                         Goal goal = Goal::Minimize, int jobs = 1);

// Recomputes a summary from the campaigns stored for a target (error-free
// campaigns only; checkpoint set truncated to the shortest of them).
// NotFoundError when the db has nothing for the target.
BaselineSummary summarize(const Database& db, const std::string& target_id);
std::vector<Campaign> campaigns_for(const Database& db, const std::string& target_id);

// report.json plus summary.csv (rows = checkpoints, one column block per
// cell). Both are byte-deterministic, with no timestamps.
void write_report(const BenchmarkReport& report, const std::filesystem::path& dir);

// Type-7 linear-interpolation quantile of an unsorted sample; p in [0, 1].
double quantile(std::vector<double> values, double p);

}  // namespace noisybench::bench
