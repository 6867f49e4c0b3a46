#pragma once

// Internal factory functions and shared helpers for the planner
// implementations, split across translation units by strategy family.

#include <algorithm>
#include <initializer_list>
#include <memory>
#include <string>
#include <string_view>

#include "noisybench/errors.hpp"
#include "noisybench/planners.hpp"

namespace noisybench::planners::detail {

std::unique_ptr<Planner> make_random_search(PlannerConfig c, std::shared_ptr<const ParamSpace> s);
std::unique_ptr<Planner> make_grid_search(PlannerConfig c, std::shared_ptr<const ParamSpace> s);
std::unique_ptr<Planner> make_latin_hypercube(PlannerConfig c, std::shared_ptr<const ParamSpace> s);
std::unique_ptr<Planner> make_sobol(PlannerConfig c, std::shared_ptr<const ParamSpace> s);
std::unique_ptr<Planner> make_simplex(PlannerConfig c, std::shared_ptr<const ParamSpace> s);
std::unique_ptr<Planner> make_steepest_descent(PlannerConfig c, std::shared_ptr<const ParamSpace> s);
std::unique_ptr<Planner> make_basin_hopping(PlannerConfig c, std::shared_ptr<const ParamSpace> s);
std::unique_ptr<Planner> make_differential_evolution(PlannerConfig c, std::shared_ptr<const ParamSpace> s);
std::unique_ptr<Planner> make_particle_swarm(PlannerConfig c, std::shared_ptr<const ParamSpace> s);
std::unique_ptr<Planner> make_genetic(PlannerConfig c, std::shared_ptr<const ParamSpace> s);
std::unique_ptr<Planner> make_cma_es(PlannerConfig c, std::shared_ptr<const ParamSpace> s);
std::unique_ptr<Planner> make_gp_bayes_opt(PlannerConfig c, std::shared_ptr<const ParamSpace> s);

// Hyperparameter access with validation. `allowed` lists every key the
// planner understands; anything else in the config is a ConfigError.
void check_hyperparams(const PlannerConfig& config,
                       std::initializer_list<std::string_view> allowed);
double hyper(const PlannerConfig& config, const std::string& key, double fallback);
int hyper_int(const PlannerConfig& config, const std::string& key, int fallback,
              int min_value);

// Default population size for the evolutionary planners.
inline int default_popsize(std::size_t dim) {
  return static_cast<int>(std::max<std::size_t>(8, 4 * dim));
}

}  // namespace noisybench::planners::detail
