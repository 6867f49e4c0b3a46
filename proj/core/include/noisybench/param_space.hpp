#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace noisybench {

// One bounded continuous parameter.
struct ParamDef {
  std::string name;
  double low = 0.0;
  double high = 1.0;
};

// An ordered list of bounded continuous parameters. The order defines the
// component order of every point in the space. Immutable once built.
class ParamSpace {
 public:
  explicit ParamSpace(std::vector<ParamDef> params);

  // The unit hypercube [0,1]^dim with parameter names x0, x1, ...
  static std::shared_ptr<const ParamSpace> unit(std::size_t dim);

  std::size_t dim() const { return params_.size(); }
  const ParamDef& param(std::size_t i) const { return params_[i]; }
  const std::vector<ParamDef>& params() const { return params_; }

  // Index of a parameter by name; NotFoundError if absent.
  std::size_t index_of(const std::string& name) const;

  bool contains(std::span<const double> values) const;  // bounds inclusive
  std::vector<double> clip(std::span<const double> values) const;

  friend bool operator==(const ParamSpace& a, const ParamSpace& b);
  friend bool operator!=(const ParamSpace& a, const ParamSpace& b) { return !(a == b); }

 private:
  std::vector<ParamDef> params_;
};

// A point bound to its space. Components are validated against the bounds
// (inclusive) at construction.
class ParamVector {
 public:
  ParamVector(std::shared_ptr<const ParamSpace> space, std::vector<double> values);

  const ParamSpace& space() const { return *space_; }
  const std::shared_ptr<const ParamSpace>& space_ptr() const { return space_; }
  const std::vector<double>& values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t dim() const { return values_.size(); }

  friend bool operator==(const ParamVector& a, const ParamVector& b);
  friend bool operator!=(const ParamVector& a, const ParamVector& b) { return !(a == b); }

 private:
  std::shared_ptr<const ParamSpace> space_;
  std::vector<double> values_;
};

// Affine map of a point into [0,1]^dim. The point's space must equal `space`.
std::vector<double> project_to_unit(const ParamSpace& space, const ParamVector& x);

// Inverse of project_to_unit; the result is clamped into bounds so that unit
// coordinates within roundoff of 0 or 1 stay valid. Round-tripping a point
// through project/lift reproduces it to within 1e-12.
ParamVector lift_from_unit(std::shared_ptr<const ParamSpace> space,
                           std::span<const double> unit);

}  // namespace noisybench
