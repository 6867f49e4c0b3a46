#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "noisybench/evaluator.hpp"
#include "noisybench/noise.hpp"
#include "noisybench/param_space.hpp"

namespace noisybench::surfaces {

enum class Kind {
  AckleyPath,
  Branin,
  Dejong,
  HyperEllipsoid,
  Levy,
  Michalewicz,
  Rastrigin,
  Rosenbrock,
  Schwefel,
  StyblinskiTang,
  Zakharov,
  LinearFunnel,
  NarrowFunnel,
  DiscreteAckley,
  DiscreteDoubleWell,
  DiscreteMichalewicz,
  GaussianMixture,
};

std::string to_string(Kind kind);
Kind kind_from_string(const std::string& name);
const std::vector<std::string>& kind_names();

// Named Gaussian-mixture presets: mountain name -> construction seed (the
// peak's elevation in meters). Fixed here so the same name always builds the
// same surface.
const std::map<std::string, std::uint64_t>& mixture_presets();

// Declarative description of a surface. `extra` holds kind-specific knobs
// (validated against the kind): m (Michalewicz steepness, default 10),
// levels (value bins of the piece-wise constant kinds; funnels default 8,
// discrete kinds 16), seed / components / diagonal (Gaussian mixture,
// defaults 42 / 5 / 0). `preset` is set when the spec came from a named
// mixture preset, which pins the seed.
struct SurfaceSpec {
  Kind kind = Kind::Dejong;
  std::size_t param_dim = 2;
  std::map<std::string, double> extra;
  std::optional<noise::NoiseSpec> noise;
  std::string preset;

  // Canonical id, e.g. "dejong_d2", "everest_d2", "gaussian_mixture_d3_s7".
  // Noise is not part of the id; noisy evaluators append their own suffix.
  std::string id() const;

  // Text form accepted by the CLI: "<kind>[:key=value,...]" with keys
  // d, m, levels, seed, components, diagonal; kind may be a preset name.
  static SurfaceSpec parse(const std::string& text);

  // JSON object {kind, param_dim, extra, noise?}; presets round-trip via
  // their name in "kind". ContractError when custom noise is attached.
  std::string to_json() const;
  static SurfaceSpec from_json(const std::string& json_text);
};

// A seeded mixture of Gaussian bumps on the unit hypercube. Covariances are
// symmetric positive definite; weights are positive and sum to 1. The
// Cholesky factors and peak normalizations are cached for evaluation.
struct MixtureModel {
  std::size_t dim = 0;
  std::size_t n_components = 0;
  std::uint64_t seed = 0;
  bool diagonal = false;
  std::vector<std::vector<double>> means;        // K x d
  std::vector<std::vector<double>> covariances;  // K x (d*d), row-major
  std::vector<double> weights;                   // K, sums to 1
  std::vector<std::vector<double>> chol;         // K x (d*d), lower triangular
  std::vector<double> norm_const;                // K, density peak scale

  // Weighted mixture density at a unit-cube point.
  double density(std::span<const double> u) const;
};

// Pure function of its arguments: the same inputs always rebuild identical
// means, covariances, and weights.
MixtureModel build_mixture(std::uint64_t seed, std::size_t d, std::size_t n_components,
                           bool diagonal);

// An analytical objective on the unit hypercube. Callers pass u in [0,1]^d;
// the surface owns the affine lift to its native domain. Evaluation is pure:
// no internal state, safe for concurrent use.
class Surface : public Evaluator {
 public:
  Surface(SurfaceSpec spec, std::shared_ptr<const ParamSpace> domain);

  const std::shared_ptr<const ParamSpace>& space() const override { return unit_space_; }
  double evaluate(const ParamVector& u, RngStream& rng) override;
  std::string id() const override { return spec_.id(); }

  // Objective value at a unit-cube point; rejects points outside [0,1]^d.
  double value(std::span<const double> u) const;

  // The unit point lifted into the native domain.
  std::vector<double> to_domain(std::span<const double> u) const;
  const std::shared_ptr<const ParamSpace>& domain() const { return domain_; }

  Kind kind() const { return spec_.kind; }
  std::size_t dim() const { return spec_.param_dim; }
  const SurfaceSpec& spec() const { return spec_; }

  // A value no point of the surface falls below (exact minimum where known,
  // a safe lower bound otherwise); nullopt when none is declared.
  std::optional<double> declared_minimum() const { return declared_minimum_; }

 protected:
  virtual double value_at(std::span<const double> x) const = 0;
  void set_declared_minimum(double v) { declared_minimum_ = v; }

  SurfaceSpec spec_;
  std::shared_ptr<const ParamSpace> unit_space_;
  std::shared_ptr<const ParamSpace> domain_;
  std::optional<double> declared_minimum_;
};

// Builds the clean surface described by the spec (noise is ignored here; use
// make_evaluator for the noisy wrapper).
std::shared_ptr<Surface> make_surface(const SurfaceSpec& spec);

// Builds the surface and attaches spec.noise when present.
std::shared_ptr<Evaluator> make_evaluator(const SurfaceSpec& spec);

// One-shot evaluation at a unit point. When the spec carries noise, a caller
// stream is required; without noise the result is deterministic.
double evaluate(const SurfaceSpec& spec, std::span<const double> u, RngStream* rng = nullptr);

// Element-wise evaluate over a batch of unit points; order preserved and
// ragged batches rejected.
std::vector<double> evaluate_batch(const SurfaceSpec& spec,
                                   const std::vector<std::vector<double>>& batch,
                                   RngStream* rng = nullptr);

// Wraps any base surface into a piece-wise constant one: output values are
// quantized to n_levels uniform bins between the base's min and max sampled
// over a fixed probe grid (64^min(d,2) points; quasi-random for d > 2), and
// each value maps to its bin center.
std::shared_ptr<Surface> discretize(std::shared_ptr<Surface> base, int n_levels);

}  // namespace noisybench::surfaces
