#include "noisybench/param_space.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "noisybench/errors.hpp"

namespace noisybench {

ParamSpace::ParamSpace(std::vector<ParamDef> params) : params_(std::move(params)) {
  if (params_.empty()) throw ConfigError("parameter space needs at least one parameter");
  std::unordered_set<std::string> seen;
  for (const ParamDef& p : params_) {
    if (p.name.empty()) throw ConfigError("parameter name must not be empty");
    if (!seen.insert(p.name).second) {
      throw ConfigError("duplicate parameter name: " + p.name);
    }
    if (!std::isfinite(p.low) || !std::isfinite(p.high) || !(p.low < p.high)) {
      throw ConfigError("parameter " + p.name + ": bounds must be finite with low < high");
    }
  }
}

std::shared_ptr<const ParamSpace> ParamSpace::unit(std::size_t dim) {
  std::vector<ParamDef> defs;
  defs.reserve(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    defs.push_back({"x" + std::to_string(i), 0.0, 1.0});
  }
  return std::make_shared<const ParamSpace>(std::move(defs));
}

std::size_t ParamSpace::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (params_[i].name == name) return i;
  }
  throw NotFoundError("no parameter named " + name);
}

bool ParamSpace::contains(std::span<const double> values) const {
  if (values.size() != params_.size()) return false;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (!(values[i] >= params_[i].low && values[i] <= params_[i].high)) return false;
  }
  return true;
}

std::vector<double> ParamSpace::clip(std::span<const double> values) const {
  if (values.size() != params_.size()) {
    throw ContractError("clip: expected " + std::to_string(params_.size()) +
                        " components, got " + std::to_string(values.size()));
  }
  std::vector<double> out(values.begin(), values.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::clamp(out[i], params_[i].low, params_[i].high);
  }
  return out;
}

bool operator==(const ParamSpace& a, const ParamSpace& b) {
  if (a.params_.size() != b.params_.size()) return false;
  for (std::size_t i = 0; i < a.params_.size(); ++i) {
    const ParamDef& pa = a.params_[i];
    const ParamDef& pb = b.params_[i];
    if (pa.name != pb.name || pa.low != pb.low || pa.high != pb.high) return false;
  }
  return true;
}

ParamVector::ParamVector(std::shared_ptr<const ParamSpace> space, std::vector<double> values)
    : space_(std::move(space)), values_(std::move(values)) {
  if (!space_) throw ContractError("ParamVector: null space");
  if (values_.size() != space_->dim()) {
    throw ContractError("ParamVector: expected " + std::to_string(space_->dim()) +
                        " components, got " + std::to_string(values_.size()));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const ParamDef& p = space_->param(i);
    if (!(values_[i] >= p.low && values_[i] <= p.high)) {
      throw ContractError("ParamVector: component " + p.name + " out of bounds");
    }
  }
}

bool operator==(const ParamVector& a, const ParamVector& b) {
  return *a.space_ == *b.space_ && a.values_ == b.values_;
}

std::vector<double> project_to_unit(const ParamSpace& space, const ParamVector& x) {
  if (x.space() != space) {
    throw ContractError("project_to_unit: point belongs to a different space");
  }
  std::vector<double> u(x.dim());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const ParamDef& p = space.param(i);
    u[i] = (x[i] - p.low) / (p.high - p.low);
  }
  return u;
}

ParamVector lift_from_unit(std::shared_ptr<const ParamSpace> space,
                           std::span<const double> unit) {
  if (!space) throw ContractError("lift_from_unit: null space");
  if (unit.size() != space->dim()) {
    throw ContractError("lift_from_unit: expected " + std::to_string(space->dim()) +
                        " components, got " + std::to_string(unit.size()));
  }
  std::vector<double> v(unit.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const ParamDef& p = space->param(i);
    v[i] = std::clamp(p.low + unit[i] * (p.high - p.low), p.low, p.high);
  }
  return ParamVector(std::move(space), std::move(v));
}

}  // namespace noisybench
