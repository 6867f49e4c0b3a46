#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <unordered_map>

#include <json.hpp>

#include "json_util.hpp"
#include "noisybench/errors.hpp"
#include "noisybench/planners.hpp"
#include "planners_impl.hpp"

namespace noisybench::planners {

namespace {

struct Builtin {
  const char* canonical;
  std::unique_ptr<Planner> (*factory)(PlannerConfig, std::shared_ptr<const ParamSpace>);
};

const Builtin kBuiltins[] = {
    {"RandomSearch", detail::make_random_search},
    {"GridSearch", detail::make_grid_search},
    {"LatinHypercube", detail::make_latin_hypercube},
    {"Sobol", detail::make_sobol},
    {"Simplex", detail::make_simplex},
    {"SteepestDescent", detail::make_steepest_descent},
    {"DifferentialEvolution", detail::make_differential_evolution},
    {"ParticleSwarm", detail::make_particle_swarm},
    {"CmaEs", detail::make_cma_es},
    {"Genetic", detail::make_genetic},
    {"BasinHopping", detail::make_basin_hopping},
    {"GpBayesOpt", detail::make_gp_bayes_opt},
};

std::string fold_name(const std::string& name) {
  std::string out;
  for (const char c : name) {
    if (c == '_' || c == '-') continue;
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

// Accepted spellings beyond the folded canonical names.
const std::unordered_map<std::string, const char*>& aliases() {
  static const std::unordered_map<std::string, const char*> map = {
      {"random", "RandomSearch"}, {"grid", "GridSearch"},
      {"lhs", "LatinHypercube"},  {"latin", "LatinHypercube"},
      {"neldermead", "Simplex"},  {"gradient", "SteepestDescent"},
      {"de", "DifferentialEvolution"}, {"pso", "ParticleSwarm"},
      {"ga", "Genetic"},          {"gp", "GpBayesOpt"},
      {"bayesopt", "GpBayesOpt"},
  };
  return map;
}

std::mutex& registry_mutex() {
  static std::mutex m;
  return m;
}

std::unordered_map<std::string, CustomAsk>& registry() {
  static std::unordered_map<std::string, CustomAsk> r;
  return r;
}

class CustomPlanner final : public Planner {
 public:
  CustomPlanner(PlannerConfig config, std::shared_ptr<const ParamSpace> space, CustomAsk ask)
      : Planner(std::move(config), std::move(space)), ask_(std::move(ask)) {}

 protected:
  std::vector<double> propose(std::size_t round) override {
    RngStream rng = stream("custom", round);
    std::vector<double> point = ask_(*space(), history(), rng);
    if (point.size() != dim()) {
      throw ContractError("custom planner " + config().name + " returned " +
                          std::to_string(point.size()) + " components, expected " +
                          std::to_string(dim()));
    }
    for (double c : point) {
      if (!std::isfinite(c)) {
        throw ContractError("custom planner " + config().name +
                            " returned a non-finite component");
      }
    }
    if (!space()->contains(point)) {
      std::fprintf(stderr, "warning: custom planner %s proposed an out-of-bounds point; clipping\n",
                   config().name.c_str());
      point = space()->clip(point);
    }
    // The harness works in unit coordinates.
    std::vector<double> unit(point.size());
    for (std::size_t i = 0; i < point.size(); ++i) {
      const ParamDef& p = space()->param(i);
      unit[i] = (point[i] - p.low) / (p.high - p.low);
    }
    return unit;
  }

  void absorb(std::span<const double>, double, std::size_t) override {}

 private:
  CustomAsk ask_;
};

}  // namespace

const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const Builtin& b : kBuiltins) out.push_back(b.canonical);
    return out;
  }();
  return names;
}

std::string resolve_name(const std::string& name) {
  {
    std::lock_guard<std::mutex> lock(registry_mutex());
    if (registry().count(name) != 0) return name;
  }
  const std::string folded = fold_name(name);
  for (const Builtin& b : kBuiltins) {
    if (folded == fold_name(b.canonical)) return b.canonical;
  }
  if (const auto it = aliases().find(folded); it != aliases().end()) return it->second;
  throw NotFoundError("unknown planner: " + name);
}

void register_custom(const std::string& name, CustomAsk ask) {
  if (name.empty()) throw ConfigError("custom planner name must not be empty");
  if (!ask) throw ConfigError("custom planner " + name + " has no ask callback");
  const std::string folded = fold_name(name);
  for (const Builtin& b : kBuiltins) {
    if (folded == fold_name(b.canonical)) {
      throw ConfigError("cannot register custom planner over built-in name " + name);
    }
  }
  if (aliases().count(folded) != 0) {
    throw ConfigError("cannot register custom planner over built-in name " + name);
  }
  std::lock_guard<std::mutex> lock(registry_mutex());
  registry()[name] = std::move(ask);
}

bool is_registered_custom(const std::string& name) {
  std::lock_guard<std::mutex> lock(registry_mutex());
  return registry().count(name) != 0;
}

Planner::Planner(PlannerConfig config, std::shared_ptr<const ParamSpace> space)
    : config_(std::move(config)), space_(std::move(space)) {
  if (!space_) throw ContractError("planner needs a parameter space");
}

ParamVector Planner::ask() {
  if (pending_) return *pending_;
  std::vector<double> unit = propose(history_.size());
  if (unit.size() != dim()) {
    throw ContractError("planner proposal has wrong dimensionality");
  }
  for (double& c : unit) {
    if (!std::isfinite(c)) c = 0.5;
    c = std::clamp(c, 0.0, 1.0);
  }
  pending_ = lift_from_unit(space_, unit);
  return *pending_;
}

void Planner::tell(const ParamVector& params, double value) {
  if (!std::isfinite(value)) {
    throw ContractError("tell: value must be finite");
  }
  if (params.space() != *space_) {
    throw ContractError("tell: point belongs to a different space");
  }
  const std::size_t round = history_.size();
  history_.push_back({params, value});
  const std::vector<double> unit = project_to_unit(*space_, params);
  absorb(unit, normalized(value), round);
  pending_.reset();
}

RngStream Planner::stream(std::string_view purpose, std::uint64_t index) const {
  return RngStream(derive_seed(config_.seed, hash_tag(purpose), index));
}

std::vector<double> Planner::uniform_point(std::size_t round) const {
  RngStream rng = stream("uniform", round);
  std::vector<double> u(dim());
  for (double& c : u) c = rng.uniform();
  return u;
}

std::unique_ptr<Planner> make_planner(PlannerConfig config,
                                      std::shared_ptr<const ParamSpace> space) {
  if (!space) throw ContractError("make_planner: null space");
  config.name = resolve_name(config.name);
  {
    std::lock_guard<std::mutex> lock(registry_mutex());
    if (const auto it = registry().find(config.name); it != registry().end()) {
      if (!config.hyperparams.empty()) {
        throw ConfigError("custom planner " + config.name + " takes no hyperparameters");
      }
      return std::make_unique<CustomPlanner>(std::move(config), std::move(space), it->second);
    }
  }
  for (const Builtin& b : kBuiltins) {
    if (config.name == b.canonical) return b.factory(std::move(config), std::move(space));
  }
  throw NotFoundError("unknown planner: " + config.name);
}

std::string PlannerConfig::to_json() const {
  std::string out = "{\"name\":" + noisybench::detail::json_quote(name);
  out += ",\"goal\":" + noisybench::detail::json_quote(to_string(goal));
  out += ",\"seed\":" + std::to_string(seed);
  out += ",\"hyperparams\":{";
  bool first = true;
  for (const auto& [key, value] : hyperparams) {
    if (!first) out += ',';
    first = false;
    out += noisybench::detail::json_quote(key) + ":" + noisybench::detail::format_double(value);
  }
  out += "}}";
  return out;
}

PlannerConfig PlannerConfig::from_json(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad planner config: ") + e.what());
  }
  try {
    PlannerConfig config;
    config.name = resolve_name(j.at("name").get<std::string>());
    config.goal = goal_from_string(j.at("goal").get<std::string>());
    config.seed = j.at("seed").get<std::uint32_t>();
    if (j.contains("hyperparams")) {
      for (const auto& [key, value] : j.at("hyperparams").items()) {
        config.hyperparams[key] = value.get<double>();
      }
    }
    return config;
  } catch (const ValidationError&) {
    throw;
  } catch (const std::exception& e) {
    throw ParseError(std::string("bad planner config: ") + e.what());
  }
}

namespace detail {

void check_hyperparams(const PlannerConfig& config,
                       std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : config.hyperparams) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError("planner " + config.name + " does not take hyperparameter '" +
                        key + "'");
    }
    if (!std::isfinite(value)) {
      throw ConfigError("hyperparameter " + key + " must be finite");
    }
  }
}

double hyper(const PlannerConfig& config, const std::string& key, double fallback) {
  const auto it = config.hyperparams.find(key);
  return it == config.hyperparams.end() ? fallback : it->second;
}

int hyper_int(const PlannerConfig& config, const std::string& key, int fallback,
              int min_value) {
  const auto it = config.hyperparams.find(key);
  if (it == config.hyperparams.end()) return fallback;
  const double v = it->second;
  if (v != std::floor(v) || v < static_cast<double>(min_value) || v > 1e9) {
    throw ConfigError("hyperparameter " + key + " must be an integer >= " +
                      std::to_string(min_value));
  }
  return static_cast<int>(v);
}

}  // namespace detail

}  // namespace noisybench::planners
