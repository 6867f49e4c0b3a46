#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "noisybench/param_space.hpp"

namespace noisybench {

enum class Goal { Minimize, Maximize };

std::string to_string(Goal goal);
Goal goal_from_string(const std::string& s);

// One objective evaluation. eval_index is 1-based and strictly increasing
// within a campaign. The timestamp records wall-clock time of the evaluation
// and is informational only: it takes no part in equality or serialized
// reports that must be reproducible.
struct Observation {
  ParamVector params;
  double value = 0.0;
  int eval_index = 0;
  std::string timestamp;
};

// A sequential optimization run: fixed planner, target, goal, and seed, plus
// the ordered evaluations. If the run stopped early (evaluation failure,
// exhausted plan), the completed prefix is kept and `error` says why.
class Campaign {
 public:
  Campaign(std::string id, std::string planner_name, std::string surface_id,
           Goal goal, std::uint32_t seed);

  // Appends an observation; assigns the next eval_index. The value must be
  // finite and the point's space must match the previous observations'.
  // An empty timestamp is replaced with the current UTC time.
  void add(ParamVector params, double value, std::string timestamp = {});

  const std::string& id() const { return id_; }
  const std::string& planner_name() const { return planner_name_; }
  const std::string& surface_id() const { return surface_id_; }
  Goal goal() const { return goal_; }
  std::uint32_t seed() const { return seed_; }
  const std::vector<Observation>& observations() const { return observations_; }
  std::size_t size() const { return observations_.size(); }

  const std::string& error() const { return error_; }
  void set_error(std::string message) { error_ = std::move(message); }

 private:
  std::string id_;
  std::string planner_name_;
  std::string surface_id_;
  Goal goal_;
  std::uint32_t seed_;
  std::vector<Observation> observations_;
  std::string error_;
};

// Field-wise equality that ignores observation timestamps.
bool equivalent(const Campaign& a, const Campaign& b);

// Running extremum of the values under the goal (minimum for Minimize,
// maximum for Maximize). Same length as the input; empty input is an error.
std::vector<double> best_so_far(std::span<const double> values, Goal goal);
std::vector<double> best_so_far(const Campaign& campaign);

// Current UTC time as ISO-8601 (e.g. 2026-01-31T08:45:00Z).
std::string utc_now_iso8601();

}  // namespace noisybench
