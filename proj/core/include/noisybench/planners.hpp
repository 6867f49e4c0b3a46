#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "noisybench/campaign.hpp"
#include "noisybench/evaluator.hpp"
#include "noisybench/param_space.hpp"
#include "noisybench/rng.hpp"

namespace noisybench::planners {

// Canonical built-in planner names, in the order used by listings.
const std::vector<std::string>& builtin_names();

// Maps user input ("random", "cmaes", "DifferentialEvolution", ...) to the
// canonical name; registered custom names pass through unchanged.
// NotFoundError for anything else.
std::string resolve_name(const std::string& name);

struct PlannerConfig {
  std::string name = "RandomSearch";
  Goal goal = Goal::Minimize;
  std::uint32_t seed = 0;
  std::map<std::string, double> hyperparams;

  std::string to_json() const;
  static PlannerConfig from_json(const std::string& json_text);
};

struct HistoryEntry {
  ParamVector params;
  double value;  // as told by the caller (no goal transform)
};

// Sequential ask/tell optimizer. The contract every implementation honors:
//  - ask() returns a point within the space; proposals outside are clipped.
//  - Repeated ask() without an intervening tell() returns the same point.
//  - tell() accepts any in-bounds point (warm starts included), not just the
//    pending ask.
//  - After any fixed (config, seed, tell sequence), the next ask is fully
//    determined: strategy state changes only inside tell(), and random draws
//    come from streams keyed by (seed, purpose, round).
// Instances are single-threaded; run one per thread.
class Planner {
 public:
  virtual ~Planner() = default;

  ParamVector ask();
  void tell(const ParamVector& params, double value);

  const PlannerConfig& config() const { return config_; }
  const std::shared_ptr<const ParamSpace>& space() const { return space_; }
  const std::vector<HistoryEntry>& history() const { return history_; }

 protected:
  Planner(PlannerConfig config, std::shared_ptr<const ParamSpace> space);

  // Next proposal in unit coordinates, for the round equal to the current
  // history size. Must not mutate strategy state.
  virtual std::vector<double> propose(std::size_t round) = 0;

  // Folds one observation into strategy state. `unit` is the told point in
  // unit coordinates, `value` is goal-normalized (lower is always better).
  virtual void absorb(std::span<const double> unit, double value, std::size_t round) = 0;

  std::size_t dim() const { return space_->dim(); }

  // Stream for a (purpose, round) pair; the same pair always reproduces the
  // same draws.
  RngStream stream(std::string_view purpose, std::uint64_t index) const;

  // The shared uniform proposal; every stochastic planner uses this for its
  // initial point(s), so planners with equal seeds start identically.
  std::vector<double> uniform_point(std::size_t round) const;

  double normalized(double value) const {
    return config_.goal == Goal::Minimize ? value : -value;
  }

 private:
  PlannerConfig config_;
  std::shared_ptr<const ParamSpace> space_;
  std::vector<HistoryEntry> history_;
  std::optional<ParamVector> pending_;
};

// Builds a planner over the given space. The config name may be a built-in
// (any accepted spelling) or a registered custom planner; unknown
// hyperparameter keys are rejected.
std::unique_ptr<Planner> make_planner(PlannerConfig config,
                                      std::shared_ptr<const ParamSpace> space);

// A custom strategy: returns the next point in space coordinates given the
// space and full history. Out-of-bounds proposals are clipped with a warning
// on stderr. The stream is derived from (seed, round) by the harness.
using CustomAsk = std::function<std::vector<double>(
    const ParamSpace& space, const std::vector<HistoryEntry>& history, RngStream& rng)>;

// Registers a custom planner under `name`, making it usable wherever a
// planner name is accepted. Re-registering a custom name replaces it;
// built-in names and a missing callback are rejected.
void register_custom(const std::string& name, CustomAsk ask);
bool is_registered_custom(const std::string& name);

// Runs num_iter ask -> evaluate -> tell rounds and returns the campaign
// (raw values; best_so_far honors the goal). If evaluation fails or a finite
// plan runs out, the campaign keeps the completed prefix and carries an
// error note. An empty id picks "<planner>_<target>_s<seed>".
Campaign optimize(Planner& planner, Evaluator& evaluator, int num_iter,
                  const std::string& campaign_id = "");

// Same, but builds the planner first and fills plan-driven defaults:
// GridSearch gets levels = ceil(num_iter^(1/d)) and LatinHypercube gets
// samples = num_iter, unless set explicitly.
Campaign optimize(PlannerConfig config, Evaluator& evaluator, int num_iter,
                  const std::string& campaign_id = "");

// Campaign id helper: "<planner>_<target>_s<seed>" with the planner name in
// canonical spelling and characters outside [A-Za-z0-9_.-] replaced by '-'.
std::string default_campaign_id(const PlannerConfig& config, const std::string& target_id);

}  // namespace noisybench::planners
