#include "noisybench/campaign.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>

#include "noisybench/errors.hpp"

namespace noisybench {

std::string to_string(Goal goal) {
  return goal == Goal::Minimize ? "minimize" : "maximize";
}

Goal goal_from_string(const std::string& s) {
  if (s == "minimize") return Goal::Minimize;
  if (s == "maximize") return Goal::Maximize;
  throw ConfigError("unknown goal: " + s + " (expected minimize or maximize)");
}

Campaign::Campaign(std::string id, std::string planner_name, std::string surface_id,
                   Goal goal, std::uint32_t seed)
    : id_(std::move(id)),
      planner_name_(std::move(planner_name)),
      surface_id_(std::move(surface_id)),
      goal_(goal),
      seed_(seed) {
  if (id_.empty()) throw ConfigError("campaign id must not be empty");
}

void Campaign::add(ParamVector params, double value, std::string timestamp) {
  if (!std::isfinite(value)) {
    throw ContractError("campaign " + id_ + ": observation value must be finite");
  }
  if (!observations_.empty() && params.space() != observations_.front().params.space()) {
    throw ContractError("campaign " + id_ + ": observation space changed mid-run");
  }
  if (timestamp.empty()) timestamp = utc_now_iso8601();
  const int index = static_cast<int>(observations_.size()) + 1;
  observations_.push_back({std::move(params), value, index, std::move(timestamp)});
}

bool equivalent(const Campaign& a, const Campaign& b) {
  if (a.id() != b.id() || a.planner_name() != b.planner_name() ||
      a.surface_id() != b.surface_id() || a.goal() != b.goal() || a.seed() != b.seed() ||
      a.error() != b.error() || a.size() != b.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Observation& oa = a.observations()[i];
    const Observation& ob = b.observations()[i];
    if (oa.eval_index != ob.eval_index || oa.value != ob.value || oa.params != ob.params) {
      return false;
    }
  }
  return true;
}

std::vector<double> best_so_far(std::span<const double> values, Goal goal) {
  if (values.empty()) throw ContractError("best_so_far: empty value trace");
  std::vector<double> out(values.size());
  double best = values[0];
  for (std::size_t i = 0; i < values.size(); ++i) {
    best = goal == Goal::Minimize ? std::min(best, values[i]) : std::max(best, values[i]);
    out[i] = best;
  }
  return out;
}

std::vector<double> best_so_far(const Campaign& campaign) {
  std::vector<double> values;
  values.reserve(campaign.size());
  for (const Observation& o : campaign.observations()) values.push_back(o.value);
  return best_so_far(values, campaign.goal());
}

std::string utc_now_iso8601() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
  return buf;
}

}  // namespace noisybench
