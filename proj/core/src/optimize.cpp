#include <cmath>
#include <string>
#include <utility>

#include "noisybench/errors.hpp"
#include "noisybench/planners.hpp"

namespace noisybench::planners {

std::string default_campaign_id(const PlannerConfig& config, const std::string& target_id) {
  std::string id =
      resolve_name(config.name) + "_" + target_id + "_s" + std::to_string(config.seed);
  for (char& c : id) {
    const bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
                    (c >= '0' && c <= '9') || c == '_' || c == '.' || c == '-';
    if (!ok) c = '-';
  }
  return id;
}

Campaign optimize(Planner& planner, Evaluator& evaluator, int num_iter,
                  const std::string& campaign_id) {
  if (num_iter < 1) throw ConfigError("num_iter must be at least 1");
  if (!(*planner.space() == *evaluator.space())) {
    throw ContractError("planner and evaluator operate on different spaces");
  }
  const std::string id =
      campaign_id.empty() ? default_campaign_id(planner.config(), evaluator.id())
                          : campaign_id;
  Campaign campaign(id, planner.config().name, evaluator.id(), planner.config().goal,
                    planner.config().seed);
  RngStream eval_rng(derive_seed(planner.config().seed, hash_tag("evaluation")));
  for (int i = 0; i < num_iter; ++i) {
    try {
      const ParamVector x = planner.ask();
      const double y = evaluator.evaluate(x, eval_rng);
      if (!std::isfinite(y)) {
        throw EvaluationError("evaluator returned a non-finite value");
      }
      planner.tell(x, y);
      campaign.add(x, y);
    } catch (const PlanExhaustedError& e) {
      campaign.set_error(e.what());
      break;
    } catch (const EvaluationError& e) {
      campaign.set_error(e.what());
      break;
    }
  }
  return campaign;
}

Campaign optimize(PlannerConfig config, Evaluator& evaluator, int num_iter,
                  const std::string& campaign_id) {
  if (num_iter < 1) throw ConfigError("num_iter must be at least 1");
  config.name = resolve_name(config.name);
  const auto dim = static_cast<double>(evaluator.space()->dim());
  if (config.name == "GridSearch" && !config.hyperparams.count("levels")) {
    const double levels = std::ceil(std::pow(static_cast<double>(num_iter), 1.0 / dim));
    config.hyperparams["levels"] = std::max(1.0, levels);
  }
  if (config.name == "LatinHypercube" && !config.hyperparams.count("samples")) {
    config.hyperparams["samples"] = static_cast<double>(num_iter);
  }
  const auto planner = make_planner(std::move(config), evaluator.space());
  return optimize(*planner, evaluator, num_iter, campaign_id);
}

}  // namespace noisybench::planners
