#pragma once

#include <functional>
#include <memory>
#include <string>

#include "noisybench/evaluator.hpp"
#include "noisybench/rng.hpp"

namespace noisybench::noise {

enum class Kind { Gaussian, Uniform, Gamma, Custom };

std::string to_string(Kind kind);

// Draws one additive perturbation; the stream is owned by the caller.
using CustomSampler = std::function<double(RngStream&)>;

// Declarative description of a zero-mean perturbation added to objective
// values. `scale` controls the spread: Gaussian has standard deviation
// `scale`, Uniform is U(-scale, +scale), Gamma is a Gamma(shape, theta) draw
// shifted to zero mean with theta chosen so the standard deviation is
// `scale`. Custom wraps a user callback and cannot be serialized.
struct NoiseSpec {
  Kind kind = Kind::Gaussian;
  double scale = 1.0;
  double shape = 2.0;   // Gamma only
  std::string label;    // Custom only
  CustomSampler sampler;

  static NoiseSpec gaussian(double scale);
  static NoiseSpec uniform(double scale);
  static NoiseSpec gamma(double scale, double shape = 2.0);
  static NoiseSpec custom(std::string label, CustomSampler sampler);

  // Closed-form standard deviation of the sampler; ContractError for Custom.
  double analytic_std() const;

  bool serializable() const { return kind != Kind::Custom; }

  // Compact text form, e.g. "gaussian:0.5" or "gamma:0.5,shape=3"; also the
  // accepted input of parse(). Custom specs render as their label.
  std::string text() const;
  static NoiseSpec parse(const std::string& text);

  // JSON object {kind, scale, extra}; ContractError for Custom.
  std::string to_json() const;
  static NoiseSpec from_json(const std::string& json_text);
};

// One perturbation draw per call. A non-finite draw from a Custom sampler is
// reported as an EvaluationError.
double sample(const NoiseSpec& spec, RngStream& rng);

// An evaluator returning base(x) + sample(spec). The clean target stays
// reachable for tests and reporting.
class NoisyEvaluator : public Evaluator {
 public:
  NoisyEvaluator(std::shared_ptr<Evaluator> base, NoiseSpec spec);

  const std::shared_ptr<const ParamSpace>& space() const override;
  double evaluate(const ParamVector& x, RngStream& rng) override;
  std::string id() const override;

  Evaluator& clean() { return *base_; }
  const std::shared_ptr<Evaluator>& clean_ptr() const { return base_; }
  const NoiseSpec& spec() const { return spec_; }

 private:
  std::shared_ptr<Evaluator> base_;
  NoiseSpec spec_;
};

// Wraps a target with noise. Wrapping an already-noisy evaluator is a
// ConfigError; use one spec per target.
std::shared_ptr<Evaluator> attach(std::shared_ptr<Evaluator> target, NoiseSpec spec);

}  // namespace noisybench::noise
