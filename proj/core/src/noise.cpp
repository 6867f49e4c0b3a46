#include "noisybench/noise.hpp"

#include <cmath>

#include <json.hpp>

#include "json_util.hpp"
#include "noisybench/errors.hpp"

namespace noisybench::noise {

std::string to_string(Kind kind) {
  switch (kind) {
    case Kind::Gaussian: return "gaussian";
    case Kind::Uniform: return "uniform";
    case Kind::Gamma: return "gamma";
    case Kind::Custom: return "custom";
  }
  throw ContractError("unreachable noise kind");
}

namespace {

void check_scale(double scale) {
  if (!std::isfinite(scale) || !(scale > 0.0)) {
    throw ConfigError("noise scale must be finite and > 0");
  }
}

Kind kind_from_string(const std::string& s) {
  if (s == "gaussian") return Kind::Gaussian;
  if (s == "uniform") return Kind::Uniform;
  if (s == "gamma") return Kind::Gamma;
  throw ConfigError("unknown noise kind: " + s);
}

}  // namespace

NoiseSpec NoiseSpec::gaussian(double scale) {
  check_scale(scale);
  return {Kind::Gaussian, scale, 2.0, {}, {}};
}

NoiseSpec NoiseSpec::uniform(double scale) {
  check_scale(scale);
  return {Kind::Uniform, scale, 2.0, {}, {}};
}

NoiseSpec NoiseSpec::gamma(double scale, double shape) {
  check_scale(scale);
  if (!std::isfinite(shape) || !(shape > 0.0)) {
    throw ConfigError("gamma noise shape must be finite and > 0");
  }
  return {Kind::Gamma, scale, shape, {}, {}};
}

NoiseSpec NoiseSpec::custom(std::string label, CustomSampler sampler) {
  if (!sampler) throw ConfigError("custom noise needs a sampler callback");
  if (label.empty()) label = "custom";
  return {Kind::Custom, 1.0, 2.0, std::move(label), std::move(sampler)};
}

double NoiseSpec::analytic_std() const {
  switch (kind) {
    case Kind::Gaussian: return scale;
    case Kind::Uniform: return scale / std::sqrt(3.0);
    case Kind::Gamma: return scale;
    case Kind::Custom: break;
  }
  throw ContractError("custom noise has no closed-form standard deviation");
}

std::string NoiseSpec::text() const {
  if (kind == Kind::Custom) return label;
  std::string out = to_string(kind) + ":" + detail::format_double(scale);
  if (kind == Kind::Gamma && shape != 2.0) {
    out += ",shape=" + detail::format_double(shape);
  }
  return out;
}

NoiseSpec NoiseSpec::parse(const std::string& text) {
  const std::size_t colon = text.find(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 >= text.size()) {
    throw ConfigError("noise spec must look like kind:scale, got: " + text);
  }
  const Kind kind = kind_from_string(text.substr(0, colon));
  std::string rest = text.substr(colon + 1);
  double shape = 2.0;
  const std::size_t comma = rest.find(',');
  if (comma != std::string::npos) {
    const std::string extra = rest.substr(comma + 1);
    rest = rest.substr(0, comma);
    if (kind != Kind::Gamma || extra.rfind("shape=", 0) != 0) {
      throw ConfigError("unexpected noise option: " + extra);
    }
    try {
      shape = std::stod(extra.substr(6));
    } catch (const std::exception&) {
      throw ConfigError("bad noise shape in: " + text);
    }
  }
  double scale = 0.0;
  try {
    std::size_t used = 0;
    scale = std::stod(rest, &used);
    if (used != rest.size()) throw ConfigError("bad noise scale in: " + text);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigError("bad noise scale in: " + text);
  }
  switch (kind) {
    case Kind::Gaussian: return gaussian(scale);
    case Kind::Uniform: return uniform(scale);
    case Kind::Gamma: return gamma(scale, shape);
    case Kind::Custom: break;
  }
  throw ConfigError("unknown noise kind in: " + text);
}

std::string NoiseSpec::to_json() const {
  if (!serializable()) throw ContractError("custom noise is not serializable");
  std::string out = "{\"kind\":" + detail::json_quote(to_string(kind));
  out += ",\"scale\":" + detail::format_double(scale);
  out += ",\"extra\":{";
  if (kind == Kind::Gamma) out += "\"shape\":" + detail::format_double(shape);
  out += "}}";
  return out;
}

NoiseSpec NoiseSpec::from_json(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad noise spec: ") + e.what());
  }
  try {
    const Kind kind = kind_from_string(j.at("kind").get<std::string>());
    const double scale = j.at("scale").get<double>();
    double shape = 2.0;
    if (j.contains("extra") && j.at("extra").contains("shape")) {
      shape = j.at("extra").at("shape").get<double>();
    }
    switch (kind) {
      case Kind::Gaussian: return gaussian(scale);
      case Kind::Uniform: return uniform(scale);
      case Kind::Gamma: return gamma(scale, shape);
      case Kind::Custom: break;
    }
    throw ConfigError("unknown noise kind");
  } catch (const ValidationError&) {
    throw;
  } catch (const std::exception& e) {
    throw ParseError(std::string("bad noise spec: ") + e.what());
  }
}

double sample(const NoiseSpec& spec, RngStream& rng) {
  switch (spec.kind) {
    case Kind::Gaussian:
      return rng.normal(0.0, spec.scale);
    case Kind::Uniform:
      return rng.uniform(-spec.scale, spec.scale);
    case Kind::Gamma: {
      // theta = scale/sqrt(k) makes the std equal scale; shifting by the mean
      // k*theta centers the draw at zero.
      const double theta = spec.scale / std::sqrt(spec.shape);
      return rng.gamma(spec.shape, theta) - spec.shape * theta;
    }
    case Kind::Custom: {
      if (!spec.sampler) throw ContractError("custom noise has no sampler");
      const double draw = spec.sampler(rng);
      if (!std::isfinite(draw)) {
        throw EvaluationError("custom noise sampler returned a non-finite value");
      }
      return draw;
    }
  }
  throw ContractError("unreachable noise kind");
}

NoisyEvaluator::NoisyEvaluator(std::shared_ptr<Evaluator> base, NoiseSpec spec)
    : base_(std::move(base)), spec_(std::move(spec)) {
  if (!base_) throw ContractError("noisy evaluator needs a target");
  if (spec_.kind == Kind::Custom && !spec_.sampler) {
    throw ConfigError("custom noise needs a sampler callback");
  }
}

const std::shared_ptr<const ParamSpace>& NoisyEvaluator::space() const {
  return base_->space();
}

double NoisyEvaluator::evaluate(const ParamVector& x, RngStream& rng) {
  return base_->evaluate(x, rng) + sample(spec_, rng);
}

std::string NoisyEvaluator::id() const { return base_->id() + "+" + spec_.text(); }

std::shared_ptr<Evaluator> attach(std::shared_ptr<Evaluator> target, NoiseSpec spec) {
  if (!target) throw ContractError("attach: null target");
  if (dynamic_cast<NoisyEvaluator*>(target.get()) != nullptr) {
    throw ConfigError("target already has noise attached");
  }
  return std::make_shared<NoisyEvaluator>(std::move(target), std::move(spec));
}

}  // namespace noisybench::noise
