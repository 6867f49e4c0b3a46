#pragma once

#include <memory>
#include <string>

#include "noisybench/param_space.hpp"
#include "noisybench/rng.hpp"

namespace noisybench {

// Anything a planner can optimize: a parameter space plus a scalar objective.
// Implementations draw all stochasticity from the caller's stream, so a fixed
// seed reproduces the same evaluations. Deterministic objectives simply
// ignore the stream.
class Evaluator {
 public:
  virtual ~Evaluator() = default;

  virtual const std::shared_ptr<const ParamSpace>& space() const = 0;
  virtual double evaluate(const ParamVector& x, RngStream& rng) = 0;

  // Stable identifier used as the campaign's target id.
  virtual std::string id() const = 0;
};

}  // namespace noisybench
