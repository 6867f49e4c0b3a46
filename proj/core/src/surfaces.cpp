#include "noisybench/surfaces.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include <json.hpp>

#include "json_util.hpp"
#include "noisybench/errors.hpp"
#include "sobol_engine.hpp"

namespace noisybench::surfaces {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kE = 2.71828182845904523536;

struct KindInfo {
  Kind kind;
  const char* name;
};

constexpr KindInfo kKinds[] = {
    {Kind::AckleyPath, "ackley_path"},
    {Kind::Branin, "branin"},
    {Kind::Dejong, "dejong"},
    {Kind::HyperEllipsoid, "hyper_ellipsoid"},
    {Kind::Levy, "levy"},
    {Kind::Michalewicz, "michalewicz"},
    {Kind::Rastrigin, "rastrigin"},
    {Kind::Rosenbrock, "rosenbrock"},
    {Kind::Schwefel, "schwefel"},
    {Kind::StyblinskiTang, "styblinski_tang"},
    {Kind::Zakharov, "zakharov"},
    {Kind::LinearFunnel, "linear_funnel"},
    {Kind::NarrowFunnel, "narrow_funnel"},
    {Kind::DiscreteAckley, "discrete_ackley"},
    {Kind::DiscreteDoubleWell, "discrete_double_well"},
    {Kind::DiscreteMichalewicz, "discrete_michalewicz"},
    {Kind::GaussianMixture, "gaussian_mixture"},
};

bool is_quantized(Kind kind) {
  return kind == Kind::LinearFunnel || kind == Kind::NarrowFunnel ||
         kind == Kind::DiscreteAckley || kind == Kind::DiscreteDoubleWell ||
         kind == Kind::DiscreteMichalewicz;
}

int default_levels(Kind kind) {
  return (kind == Kind::LinearFunnel || kind == Kind::NarrowFunnel) ? 8 : 16;
}

double get_extra(const SurfaceSpec& spec, const std::string& key, double fallback) {
  const auto it = spec.extra.find(key);
  return it == spec.extra.end() ? fallback : it->second;
}

bool is_integral(double v) { return std::isfinite(v) && v == std::floor(v); }

void validate_spec(const SurfaceSpec& spec) {
  if (spec.param_dim < 1) throw ConfigError("surface dimension must be >= 1");
  if (spec.kind == Kind::Branin && spec.param_dim != 2) {
    throw ConfigError("branin is restricted to 2 dimensions");
  }
  std::vector<std::string> allowed;
  switch (spec.kind) {
    case Kind::Michalewicz: allowed = {"m"}; break;
    case Kind::DiscreteMichalewicz: allowed = {"m", "levels"}; break;
    case Kind::LinearFunnel:
    case Kind::NarrowFunnel:
    case Kind::DiscreteAckley:
    case Kind::DiscreteDoubleWell: allowed = {"levels"}; break;
    case Kind::GaussianMixture:
      allowed = spec.preset.empty()
                    ? std::vector<std::string>{"seed", "components", "diagonal"}
                    : std::vector<std::string>{};
      break;
    default: break;
  }
  for (const auto& [key, value] : spec.extra) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError("surface option '" + key + "' does not apply to " +
                        (spec.preset.empty() ? to_string(spec.kind) : spec.preset));
    }
    if (key == "m" && !(std::isfinite(value) && value > 0.0)) {
      throw ConfigError("michalewicz m must be finite and > 0");
    }
    if (key == "levels" && !(is_integral(value) && value >= 2.0)) {
      throw ConfigError("levels must be an integer >= 2");
    }
    if (key == "seed" && !(is_integral(value) && value >= 0.0 && value <= 0x1.0p53)) {
      throw ConfigError("seed must be a non-negative integer");
    }
    if (key == "components" && !(is_integral(value) && value >= 1.0)) {
      throw ConfigError("components must be an integer >= 1");
    }
    if (key == "diagonal" && value != 0.0 && value != 1.0) {
      throw ConfigError("diagonal must be 0 or 1");
    }
  }
  if (!spec.preset.empty() && spec.kind != Kind::GaussianMixture) {
    throw ConfigError("preset names only apply to the gaussian mixture");
  }
}

// Formatting for ids: integral values render without a decimal point.
std::string compact_number(double v) {
  if (is_integral(v) && std::abs(v) < 0x1.0p53) {
    return std::to_string(static_cast<long long>(v));
  }
  return detail::format_double(v);
}

}  // namespace

std::string to_string(Kind kind) {
  for (const KindInfo& info : kKinds) {
    if (info.kind == kind) return info.name;
  }
  throw ContractError("unreachable surface kind");
}

Kind kind_from_string(const std::string& name) {
  for (const KindInfo& info : kKinds) {
    if (name == info.name) return info.kind;
  }
  throw NotFoundError("unknown surface kind: " + name);
}

const std::vector<std::string>& kind_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const KindInfo& info : kKinds) out.push_back(info.name);
    return out;
  }();
  return names;
}

const std::map<std::string, std::uint64_t>& mixture_presets() {
  static const std::map<std::string, std::uint64_t> presets = {
      {"everest", 8848},    {"denali", 6190},     {"k2", 8611},
      {"kilimanjaro", 5895}, {"matterhorn", 4478}, {"mont_blanc", 4808},
  };
  return presets;
}

std::string SurfaceSpec::id() const {
  std::string out = preset.empty() ? to_string(kind) : preset;
  out += "_d" + std::to_string(param_dim);
  if (kind == Kind::Michalewicz || kind == Kind::DiscreteMichalewicz) {
    const double m = get_extra(*this, "m", 10.0);
    if (m != 10.0) out += "_m" + compact_number(m);
  }
  if (is_quantized(kind)) {
    const double levels = get_extra(*this, "levels", default_levels(kind));
    if (levels != default_levels(kind)) out += "_l" + compact_number(levels);
  }
  if (kind == Kind::GaussianMixture && preset.empty()) {
    out += "_s" + compact_number(get_extra(*this, "seed", 42.0));
    const double components = get_extra(*this, "components", 5.0);
    if (components != 5.0) out += "_k" + compact_number(components);
    if (get_extra(*this, "diagonal", 0.0) != 0.0) out += "_diag";
  }
  return out;
}

SurfaceSpec SurfaceSpec::parse(const std::string& text) {
  SurfaceSpec spec;
  std::string head = text;
  std::string options;
  if (const std::size_t colon = text.find(':'); colon != std::string::npos) {
    head = text.substr(0, colon);
    options = text.substr(colon + 1);
  }
  if (const auto preset = mixture_presets().find(head); preset != mixture_presets().end()) {
    spec.kind = Kind::GaussianMixture;
    spec.preset = head;
  } else {
    spec.kind = kind_from_string(head);
  }

  std::size_t pos = 0;
  while (pos < options.size()) {
    std::size_t end = options.find(',', pos);
    if (end == std::string::npos) end = options.size();
    const std::string item = options.substr(pos, end - pos);
    pos = end + 1;
    if (item.empty()) continue;
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("surface option must look like key=value, got: " + item);
    }
    const std::string key = item.substr(0, eq);
    double value = 0.0;
    try {
      std::size_t used = 0;
      value = std::stod(item.substr(eq + 1), &used);
      if (used != item.size() - eq - 1) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("bad numeric value in surface option: " + item);
    }
    if (key == "d") {
      if (!(is_integral(value) && value >= 1.0)) {
        throw ConfigError("surface dimension must be an integer >= 1");
      }
      spec.param_dim = static_cast<std::size_t>(value);
    } else {
      spec.extra[key] = value;
    }
  }
  validate_spec(spec);
  return spec;
}

std::string SurfaceSpec::to_json() const {
  validate_spec(*this);
  std::string out = "{\"kind\":" + detail::json_quote(preset.empty() ? to_string(kind) : preset);
  out += ",\"param_dim\":" + std::to_string(param_dim);
  out += ",\"extra\":{";
  bool first = true;
  for (const auto& [key, value] : extra) {
    if (!first) out += ',';
    first = false;
    out += detail::json_quote(key) + ":" + detail::format_double(value);
  }
  out += "}";
  if (noise) out += ",\"noise\":" + noise->to_json();
  out += "}";
  return out;
}

SurfaceSpec SurfaceSpec::from_json(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad surface spec: ") + e.what());
  }
  try {
    SurfaceSpec spec;
    const std::string name = j.at("kind").get<std::string>();
    if (const auto preset = mixture_presets().find(name); preset != mixture_presets().end()) {
      spec.kind = Kind::GaussianMixture;
      spec.preset = name;
    } else {
      spec.kind = kind_from_string(name);
    }
    spec.param_dim = j.at("param_dim").get<std::size_t>();
    if (j.contains("extra")) {
      for (const auto& [key, value] : j.at("extra").items()) {
        spec.extra[key] = value.get<double>();
      }
    }
    if (j.contains("noise")) {
      spec.noise = noise::NoiseSpec::from_json(j.at("noise").dump());
    }
    validate_spec(spec);
    return spec;
  } catch (const ValidationError&) {
    throw;
  } catch (const std::exception& e) {
    throw ParseError(std::string("bad surface spec: ") + e.what());
  }
}

Surface::Surface(SurfaceSpec spec, std::shared_ptr<const ParamSpace> domain)
    : spec_(std::move(spec)),
      unit_space_(ParamSpace::unit(spec_.param_dim)),
      domain_(std::move(domain)) {
  if (domain_->dim() != spec_.param_dim) {
    throw ContractError("surface domain dimension mismatch");
  }
}

double Surface::evaluate(const ParamVector& u, RngStream&) {
  if (u.space() != *unit_space_) {
    throw ContractError("surface evaluation expects unit-hypercube points");
  }
  return value(u.values());
}

double Surface::value(std::span<const double> u) const {
  if (u.size() != spec_.param_dim) {
    throw ContractError("surface expects " + std::to_string(spec_.param_dim) +
                        " components, got " + std::to_string(u.size()));
  }
  for (const double c : u) {
    if (!(c >= 0.0 && c <= 1.0)) {
      throw ContractError("surface point outside the unit hypercube");
    }
  }
  return value_at(to_domain(u));
}

std::vector<double> Surface::to_domain(std::span<const double> u) const {
  std::vector<double> x(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const ParamDef& p = domain_->param(i);
    x[i] = p.low + u[i] * (p.high - p.low);
  }
  return x;
}

namespace {

std::shared_ptr<const ParamSpace> box_domain(std::size_t dim, double low, double high) {
  std::vector<ParamDef> defs;
  defs.reserve(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    defs.push_back({"x" + std::to_string(i), low, high});
  }
  return std::make_shared<const ParamSpace>(std::move(defs));
}

// The closed-form surfaces. DoubleWell is internal: it only appears as the
// base of the quantized discrete_double_well kind.
enum class Formula {
  Ackley,
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
  DoubleWell,
};

class FormulaSurface final : public Surface {
 public:
  FormulaSurface(SurfaceSpec spec, Formula formula, std::shared_ptr<const ParamSpace> domain,
                 double m)
      : Surface(std::move(spec), std::move(domain)), formula_(formula), m_(m) {
    const std::size_t d = dim();
    switch (formula_) {
      case Formula::Ackley:
        // Minimum of the unnormalized cosine-sum form, reached at the origin.
        set_declared_minimum(kE - std::exp(static_cast<double>(d)));
        break;
      case Formula::Branin: set_declared_minimum(0.39788735772973816); break;
      case Formula::Dejong:
      case Formula::HyperEllipsoid:
      case Formula::Levy:
      case Formula::Rastrigin:
      case Formula::Rosenbrock:
      case Formula::Zakharov:
      case Formula::DoubleWell: set_declared_minimum(0.0); break;
      case Formula::Michalewicz:
        if (d == 2 && m_ == 10.0) set_declared_minimum(-1.8013034101);
        break;
      case Formula::Schwefel: set_declared_minimum(-418.98289 * static_cast<double>(d)); break;
      case Formula::StyblinskiTang:
        set_declared_minimum(-39.166165703768466 * static_cast<double>(d));
        break;
    }
  }

 protected:
  double value_at(std::span<const double> x) const override {
    const std::size_t d = x.size();
    switch (formula_) {
      case Formula::Ackley: {
        double sq = 0.0;
        double cs = 0.0;
        for (const double xi : x) {
          sq += xi * xi;
          cs += std::cos(2.0 * kPi * xi);
        }
        return -20.0 * std::exp(-0.2 * std::sqrt(sq / static_cast<double>(d))) -
               std::exp(cs) + 20.0 + kE;
      }
      case Formula::Branin: {
        const double b = 5.1 / (4.0 * kPi * kPi);
        const double c = 5.0 / kPi;
        const double t = 1.0 / (8.0 * kPi);
        const double x1 = x[0];
        const double x2 = x[1];
        const double core = x2 - b * x1 * x1 + c * x1 - 6.0;
        return core * core + 10.0 * (1.0 - t) * std::cos(x1) + 10.0;
      }
      case Formula::Dejong: {
        double sum = 0.0;
        for (const double xi : x) sum += std::sqrt(std::abs(xi));
        return sum;
      }
      case Formula::HyperEllipsoid: {
        double sum = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
          sum += static_cast<double>(i + 1) * x[i] * x[i];
        }
        return sum;
      }
      case Formula::Levy: {
        auto w = [&](std::size_t i) { return 1.0 + (x[i] - 1.0) / 4.0; };
        const double s1 = std::sin(kPi * w(0));
        double sum = s1 * s1;
        for (std::size_t i = 0; i + 1 < d; ++i) {
          const double wi = w(i);
          const double s = std::sin(kPi * wi + 1.0);
          sum += (wi - 1.0) * (wi - 1.0) * (1.0 + 10.0 * s * s);
        }
        const double wd = w(d - 1);
        const double sd = std::sin(2.0 * kPi * wd);
        return sum + (wd - 1.0) * (wd - 1.0) * (1.0 + sd * sd);
      }
      case Formula::Michalewicz: {
        double sum = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
          const double s = std::sin(static_cast<double>(i + 1) * x[i] * x[i] / kPi);
          sum += std::sin(x[i]) * std::pow(s * s, m_);
        }
        return -sum;
      }
      case Formula::Rastrigin: {
        double sum = 10.0 * static_cast<double>(d);
        for (const double xi : x) {
          sum += xi * xi - 10.0 * std::cos(2.0 * kPi * xi);
        }
        return sum;
      }
      case Formula::Rosenbrock: {
        double sum = 0.0;
        for (std::size_t i = 0; i + 1 < d; ++i) {
          const double a = x[i + 1] - x[i] * x[i];
          const double b = x[i] - 1.0;
          sum += 100.0 * a * a + b * b;
        }
        return sum;
      }
      case Formula::Schwefel: {
        double sum = 0.0;
        for (const double xi : x) sum += xi * std::sin(std::sqrt(std::abs(xi)));
        return -sum;
      }
      case Formula::StyblinskiTang: {
        double sum = 0.0;
        for (const double xi : x) {
          const double x2 = xi * xi;
          sum += x2 * x2 - 16.0 * x2 + 5.0 * xi;
        }
        return 0.5 * sum;
      }
      case Formula::Zakharov: {
        double sq = 0.0;
        double lin = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
          sq += x[i] * x[i];
          lin += 0.5 * static_cast<double>(i + 1) * x[i];
        }
        const double lin2 = lin * lin;
        return sq + lin2 + lin2 * lin2;
      }
      case Formula::DoubleWell: {
        double sum = 0.0;
        for (const double xi : x) {
          const double a = xi * xi - 1.0;
          sum += a * a;
        }
        return sum;
      }
    }
    throw ContractError("unreachable formula");
  }

 private:
  Formula formula_;
  double m_;
};

class MixtureSurface final : public Surface {
 public:
  MixtureSurface(SurfaceSpec spec, MixtureModel model)
      : Surface(std::move(spec), box_domain(model.dim, 0.0, 1.0)),
        model_(std::move(model)) {
    double bound = 0.0;
    for (std::size_t k = 0; k < model_.n_components; ++k) {
      bound += model_.weights[k] * model_.norm_const[k];
    }
    set_declared_minimum(-bound);
  }

  const MixtureModel& model() const { return model_; }

 protected:
  double value_at(std::span<const double> x) const override {
    return -model_.density(x);
  }

 private:
  MixtureModel model_;
};

class QuantizedSurface final : public Surface {
 public:
  QuantizedSurface(SurfaceSpec spec, std::shared_ptr<Surface> base, int levels,
                   std::string id_override)
      : Surface(std::move(spec), base->domain()),
        base_(std::move(base)),
        levels_(levels),
        id_override_(std::move(id_override)) {
    probe_range();
    set_declared_minimum(width_ > 0.0 ? min_ + 0.5 * width_ : min_);
  }

  std::string id() const override {
    return id_override_.empty() ? Surface::id() : id_override_;
  }

 protected:
  double value_at(std::span<const double> x) const override {
    // Undo the lift: the base surface expects unit coordinates.
    std::vector<double> u(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      const ParamDef& p = domain()->param(i);
      u[i] = std::clamp((x[i] - p.low) / (p.high - p.low), 0.0, 1.0);
    }
    return quantize(base_->value(u));
  }

 private:
  double quantize(double v) const {
    if (width_ <= 0.0) return min_;
    const double raw = std::floor((v - min_) / width_);
    const double idx = std::clamp(raw, 0.0, static_cast<double>(levels_ - 1));
    return min_ + (idx + 0.5) * width_;
  }

  // Samples the base over a fixed probe grid to anchor the value bins:
  // 64 points in 1-D, a 64x64 lattice in 2-D, 4096 quasi-random points above.
  void probe_range() {
    const std::size_t d = base_->dim();
    min_ = std::numeric_limits<double>::infinity();
    max_ = -min_;
    auto take = [&](std::span<const double> u) {
      const double v = base_->value(u);
      min_ = std::min(min_, v);
      max_ = std::max(max_, v);
    };
    if (d == 1) {
      for (int i = 0; i < 64; ++i) {
        const double u = static_cast<double>(i) / 63.0;
        take(std::span<const double>(&u, 1));
      }
    } else if (d == 2) {
      for (int i = 0; i < 64; ++i) {
        for (int j = 0; j < 64; ++j) {
          const double u[2] = {static_cast<double>(i) / 63.0,
                               static_cast<double>(j) / 63.0};
          take(u);
        }
      }
    } else if (d <= detail::SobolEngine::max_dim()) {
      const detail::SobolEngine sobol(d);
      for (std::uint64_t i = 1; i <= 4096; ++i) take(sobol.point(i));
    } else {
      RngStream rng(derive_seed(0x9b0be, d));
      std::vector<double> u(d);
      for (int i = 0; i < 4096; ++i) {
        for (double& c : u) c = rng.uniform();
        take(u);
      }
    }
    width_ = (max_ - min_) / static_cast<double>(levels_);
  }

  std::shared_ptr<Surface> base_;
  int levels_;
  std::string id_override_;
  double min_ = 0.0;
  double max_ = 0.0;
  double width_ = 0.0;
};

std::shared_ptr<Surface> make_formula(const SurfaceSpec& spec, Formula formula,
                                      std::shared_ptr<const ParamSpace> domain) {
  const double m = get_extra(spec, "m", 10.0);
  return std::make_shared<FormulaSurface>(spec, formula, std::move(domain), m);
}

std::shared_ptr<Surface> make_smooth(const SurfaceSpec& spec) {
  const std::size_t d = spec.param_dim;
  switch (spec.kind) {
    case Kind::AckleyPath: return make_formula(spec, Formula::Ackley, box_domain(d, -32, 32));
    case Kind::Branin: {
      auto domain = std::make_shared<const ParamSpace>(
          std::vector<ParamDef>{{"x0", -5.0, 10.0}, {"x1", 0.0, 15.0}});
      return make_formula(spec, Formula::Branin, std::move(domain));
    }
    case Kind::Dejong: return make_formula(spec, Formula::Dejong, box_domain(d, -5, 5));
    case Kind::HyperEllipsoid:
      return make_formula(spec, Formula::HyperEllipsoid, box_domain(d, -5, 5));
    case Kind::Levy: return make_formula(spec, Formula::Levy, box_domain(d, -10, 10));
    case Kind::Michalewicz:
      return make_formula(spec, Formula::Michalewicz, box_domain(d, 0.0, kPi));
    case Kind::Rastrigin: return make_formula(spec, Formula::Rastrigin, box_domain(d, -5, 5));
    case Kind::Rosenbrock: return make_formula(spec, Formula::Rosenbrock, box_domain(d, -2, 2));
    case Kind::Schwefel: return make_formula(spec, Formula::Schwefel, box_domain(d, -500, 500));
    case Kind::StyblinskiTang:
      return make_formula(spec, Formula::StyblinskiTang, box_domain(d, -5, 5));
    case Kind::Zakharov: return make_formula(spec, Formula::Zakharov, box_domain(d, -5, 10));
    default: throw ContractError("make_smooth: not a smooth kind");
  }
}

}  // namespace

std::shared_ptr<Surface> make_surface(const SurfaceSpec& spec) {
  validate_spec(spec);
  const std::size_t d = spec.param_dim;
  switch (spec.kind) {
    case Kind::AckleyPath:
    case Kind::Branin:
    case Kind::Dejong:
    case Kind::HyperEllipsoid:
    case Kind::Levy:
    case Kind::Michalewicz:
    case Kind::Rastrigin:
    case Kind::Rosenbrock:
    case Kind::Schwefel:
    case Kind::StyblinskiTang:
    case Kind::Zakharov:
      return make_smooth(spec);
    case Kind::LinearFunnel:
    case Kind::NarrowFunnel:
    case Kind::DiscreteAckley:
    case Kind::DiscreteDoubleWell:
    case Kind::DiscreteMichalewicz: {
      const int levels =
          static_cast<int>(get_extra(spec, "levels", default_levels(spec.kind)));
      SurfaceSpec base_spec;
      base_spec.param_dim = d;
      std::shared_ptr<Surface> base;
      switch (spec.kind) {
        case Kind::LinearFunnel:
          base_spec.kind = Kind::HyperEllipsoid;
          base = make_formula(base_spec, Formula::HyperEllipsoid, box_domain(d, -5, 5));
          break;
        case Kind::NarrowFunnel:
          // Same bowl on a domain shrunk 4x around the center.
          base_spec.kind = Kind::HyperEllipsoid;
          base = make_formula(base_spec, Formula::HyperEllipsoid,
                              box_domain(d, -1.25, 1.25));
          break;
        case Kind::DiscreteAckley:
          base_spec.kind = Kind::AckleyPath;
          base = make_formula(base_spec, Formula::Ackley, box_domain(d, -32, 32));
          break;
        case Kind::DiscreteDoubleWell:
          base_spec.kind = Kind::Dejong;  // placeholder spec; formula drives the math
          base = make_formula(base_spec, Formula::DoubleWell, box_domain(d, -2, 2));
          break;
        case Kind::DiscreteMichalewicz:
          base_spec.kind = Kind::Michalewicz;
          base_spec.extra = spec.extra;
          base_spec.extra.erase("levels");
          base = make_formula(base_spec, Formula::Michalewicz, box_domain(d, 0.0, kPi));
          break;
        default: throw ContractError("unreachable");
      }
      return std::make_shared<QuantizedSurface>(spec, std::move(base), levels, "");
    }
    case Kind::GaussianMixture: {
      const std::uint64_t seed = spec.preset.empty()
                                     ? static_cast<std::uint64_t>(get_extra(spec, "seed", 42.0))
                                     : mixture_presets().at(spec.preset);
      const auto components =
          static_cast<std::size_t>(get_extra(spec, "components", 5.0));
      const bool diagonal = get_extra(spec, "diagonal", 0.0) != 0.0;
      return std::make_shared<MixtureSurface>(spec,
                                              build_mixture(seed, d, components, diagonal));
    }
  }
  throw ContractError("unreachable surface kind");
}

std::shared_ptr<Evaluator> make_evaluator(const SurfaceSpec& spec) {
  std::shared_ptr<Evaluator> surface = make_surface(spec);
  if (spec.noise) return noise::attach(std::move(surface), *spec.noise);
  return surface;
}

double evaluate(const SurfaceSpec& spec, std::span<const double> u, RngStream* rng) {
  const auto surface = make_surface(spec);
  double v = surface->value(u);
  if (spec.noise) {
    if (rng == nullptr) {
      throw ContractError("noisy surface evaluation needs a caller RNG stream");
    }
    v += noise::sample(*spec.noise, *rng);
  }
  return v;
}

std::vector<double> evaluate_batch(const SurfaceSpec& spec,
                                   const std::vector<std::vector<double>>& batch,
                                   RngStream* rng) {
  if (spec.noise && rng == nullptr) {
    throw ContractError("noisy surface evaluation needs a caller RNG stream");
  }
  const auto surface = make_surface(spec);
  std::vector<double> out;
  out.reserve(batch.size());
  for (const auto& u : batch) {
    if (u.size() != spec.param_dim) {
      throw ContractError("ragged batch: row " + std::to_string(out.size()) + " has " +
                          std::to_string(u.size()) + " components");
    }
    double v = surface->value(u);
    if (spec.noise) v += noise::sample(*spec.noise, *rng);
    out.push_back(v);
  }
  return out;
}

std::shared_ptr<Surface> discretize(std::shared_ptr<Surface> base, int n_levels) {
  if (!base) throw ContractError("discretize: null base surface");
  if (n_levels < 2) throw ConfigError("discretize needs n_levels >= 2");
  const std::string id = base->id() + "_q" + std::to_string(n_levels);
  SurfaceSpec spec = base->spec();
  return std::make_shared<QuantizedSurface>(std::move(spec), std::move(base), n_levels, id);
}

}  // namespace noisybench::surfaces
