#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <span>

#include "noisybench/errors.hpp"
#include "noisybench/rng.hpp"
#include "noisybench/surfaces.hpp"

using namespace noisybench;
using surfaces::Kind;
using surfaces::SurfaceSpec;

namespace {

constexpr double kPi = std::numbers::pi;

// Second, independent transcription of every closed form, written directly
// against the native-domain definitions. Any slip in the library formulas has
// to disagree with these somewhere.
namespace oracle {

double ackley(std::span<const double> x) {
  double sq = 0.0, cs = 0.0;
  for (double v : x) {
    sq += v * v;
    cs += std::cos(2.0 * kPi * v);
  }
  const double d = static_cast<double>(x.size());
  return -20.0 * std::exp(-0.2 * std::sqrt(sq / d)) - std::exp(cs) + 20.0 +
         std::exp(1.0);
}

double branin(std::span<const double> x) {
  const double b = 5.1 / (4.0 * kPi * kPi);
  const double c = 5.0 / kPi;
  const double t = 1.0 / (8.0 * kPi);
  const double r = x[1] - b * x[0] * x[0] + c * x[0] - 6.0;
  return r * r + 10.0 * (1.0 - t) * std::cos(x[0]) + 10.0;
}

double dejong(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += std::pow(std::fabs(v), 0.5);
  return s;
}

double hyper_ellipsoid(std::span<const double> x) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (i + 1.0) * x[i] * x[i];
  return s;
}

double levy(std::span<const double> x) {
  const std::size_t d = x.size();
  std::vector<double> w(d);
  for (std::size_t i = 0; i < d; ++i) w[i] = 1.0 + (x[i] - 1.0) / 4.0;
  double s = std::pow(std::sin(kPi * w[0]), 2.0);
  for (std::size_t i = 0; i + 1 < d; ++i) {
    s += (w[i] - 1.0) * (w[i] - 1.0) *
         (1.0 + 10.0 * std::pow(std::sin(kPi * w[i] + 1.0), 2.0));
  }
  s += (w[d - 1] - 1.0) * (w[d - 1] - 1.0) *
       (1.0 + std::pow(std::sin(2.0 * kPi * w[d - 1]), 2.0));
  return s;
}

double michalewicz(std::span<const double> x, double m) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    s += std::sin(x[i]) *
         std::pow(std::sin((i + 1.0) * x[i] * x[i] / kPi), 2.0 * m);
  }
  return -s;
}

double rastrigin(std::span<const double> x) {
  double s = 10.0 * static_cast<double>(x.size());
  for (double v : x) s += v * v - 10.0 * std::cos(2.0 * kPi * v);
  return s;
}

double rosenbrock(std::span<const double> x) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    s += 100.0 * std::pow(x[i + 1] - x[i] * x[i], 2.0) + std::pow(x[i] - 1.0, 2.0);
  }
  return s;
}

double schwefel(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * std::sin(std::sqrt(std::fabs(v)));
  return -s;
}

double styblinski_tang(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += std::pow(v, 4.0) - 16.0 * v * v + 5.0 * v;
  return 0.5 * s;
}

double zakharov(std::span<const double> x) {
  double sq = 0.0, lin = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sq += x[i] * x[i];
    lin += 0.5 * (i + 1.0) * x[i];
  }
  return sq + std::pow(lin, 2.0) + std::pow(lin, 4.0);
}

}  // namespace oracle

using Oracle = double (*)(std::span<const double>);

void check_against_oracle(const SurfaceSpec& spec, Oracle fn, int points = 1000) {
  auto surf = surfaces::make_surface(spec);
  RngStream rng(hash_tag(spec.id()));
  for (int i = 0; i < points; ++i) {
    std::vector<double> u(spec.param_dim);
    for (double& c : u) c = rng.uniform();
    const double got = surf->value(u);
    const double want = fn(surf->to_domain(u));
    const double tol = 1e-9 * std::max({1.0, std::fabs(got), std::fabs(want)});
    REQUIRE(std::fabs(got - want) <= tol);
  }
}

double value_at_unit(const SurfaceSpec& spec, std::vector<double> u) {
  return surfaces::make_surface(spec)->value(u);
}

SurfaceSpec spec_of(Kind kind, std::size_t d) {
  SurfaceSpec s;
  s.kind = kind;
  s.param_dim = d;
  return s;
}

}  // namespace

TEST_CASE("closed forms match an independent transcription at random points") {
  for (std::size_t d : {2u, 3u, 6u}) {
    check_against_oracle(spec_of(Kind::AckleyPath, d), oracle::ackley);
    check_against_oracle(spec_of(Kind::Dejong, d), oracle::dejong);
    check_against_oracle(spec_of(Kind::HyperEllipsoid, d), oracle::hyper_ellipsoid);
    check_against_oracle(spec_of(Kind::Levy, d), oracle::levy);
    check_against_oracle(spec_of(Kind::Rastrigin, d), oracle::rastrigin);
    check_against_oracle(spec_of(Kind::Rosenbrock, d), oracle::rosenbrock);
    check_against_oracle(spec_of(Kind::Schwefel, d), oracle::schwefel);
    check_against_oracle(spec_of(Kind::StyblinskiTang, d), oracle::styblinski_tang);
    check_against_oracle(spec_of(Kind::Zakharov, d), oracle::zakharov);
  }
  check_against_oracle(spec_of(Kind::Branin, 2), oracle::branin);
  check_against_oracle(spec_of(Kind::Michalewicz, 2),
                       [](std::span<const double> x) { return oracle::michalewicz(x, 10.0); });
  SurfaceSpec m12 = spec_of(Kind::Michalewicz, 3);
  m12.extra["m"] = 12.0;
  check_against_oracle(m12, [](std::span<const double> x) {
    return oracle::michalewicz(x, 12.0);
  });
}

TEST_CASE("known anchors evaluate to zero") {
  // unit coordinates of the native-domain anchor points
  CHECK(value_at_unit(spec_of(Kind::Rastrigin, 2), {0.5, 0.5}) == 0.0);
  CHECK(value_at_unit(spec_of(Kind::Rosenbrock, 2), {0.75, 0.75}) == 0.0);
  CHECK(value_at_unit(spec_of(Kind::Schwefel, 3), {0.5, 0.5, 0.5}) == 0.0);
  CHECK(value_at_unit(spec_of(Kind::Levy, 2), {0.55, 0.55}) ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::fabs(value_at_unit(spec_of(Kind::Zakharov, 2), {1.0 / 3.0, 1.0 / 3.0})) <
        1e-12);
  CHECK(value_at_unit(spec_of(Kind::Dejong, 2), {0.5, 0.5}) == 0.0);
  CHECK(value_at_unit(spec_of(Kind::HyperEllipsoid, 2), {0.5, 0.5}) == 0.0);
}

TEST_CASE("no point falls below the declared minimum") {
  std::vector<SurfaceSpec> specs;
  for (Kind k : {Kind::AckleyPath, Kind::Dejong, Kind::HyperEllipsoid, Kind::Levy,
                 Kind::Rastrigin, Kind::Rosenbrock, Kind::Schwefel,
                 Kind::StyblinskiTang, Kind::Zakharov, Kind::LinearFunnel,
                 Kind::NarrowFunnel, Kind::DiscreteAckley, Kind::DiscreteDoubleWell,
                 Kind::DiscreteMichalewicz, Kind::GaussianMixture}) {
    specs.push_back(spec_of(k, 3));
  }
  specs.push_back(spec_of(Kind::Branin, 2));
  specs.push_back(spec_of(Kind::Michalewicz, 2));

  RngStream rng(99);
  for (const SurfaceSpec& spec : specs) {
    auto surf = surfaces::make_surface(spec);
    REQUIRE(surf->declared_minimum().has_value());
    const double floor = *surf->declared_minimum();
    for (int i = 0; i < 4000; ++i) {
      std::vector<double> u(spec.param_dim);
      for (double& c : u) c = rng.uniform();
      const double v = surf->value(u);
      REQUIRE(v >= floor - 1e-9 * std::max(1.0, std::fabs(floor)));
    }
  }
}

TEST_CASE("declared minima carry the documented values") {
  CHECK(*surfaces::make_surface(spec_of(Kind::Branin, 2))->declared_minimum() ==
        doctest::Approx(0.397887).epsilon(1e-4));
  CHECK(*surfaces::make_surface(spec_of(Kind::StyblinskiTang, 2))->declared_minimum() ==
        doctest::Approx(-78.332).epsilon(1e-4));
  CHECK(*surfaces::make_surface(spec_of(Kind::Schwefel, 2))->declared_minimum() ==
        doctest::Approx(-2.0 * 418.98289).epsilon(1e-9));
  CHECK(*surfaces::make_surface(spec_of(Kind::Rastrigin, 5))->declared_minimum() == 0.0);
}

TEST_CASE("piece-wise constant kinds quantize into their level budget") {
  for (Kind k : {Kind::LinearFunnel, Kind::NarrowFunnel, Kind::DiscreteAckley,
                 Kind::DiscreteDoubleWell, Kind::DiscreteMichalewicz}) {
    SurfaceSpec spec = spec_of(k, 2);
    auto surf = surfaces::make_surface(spec);
    const int expected_levels =
        (k == Kind::LinearFunnel || k == Kind::NarrowFunnel) ? 8 : 16;
    std::set<double> distinct;
    RngStream rng(7);
    for (int i = 0; i < 20000; ++i) {
      distinct.insert(surf->value(std::vector<double>{rng.uniform(), rng.uniform()}));
    }
    CHECK(distinct.size() <= static_cast<std::size_t>(expected_levels));
    CHECK(distinct.size() >= 2);
  }

  SurfaceSpec coarse = spec_of(Kind::LinearFunnel, 2);
  coarse.extra["levels"] = 3.0;
  auto surf = surfaces::make_surface(coarse);
  std::set<double> distinct;
  RngStream rng(8);
  for (int i = 0; i < 5000; ++i) {
    distinct.insert(surf->value(std::vector<double>{rng.uniform(), rng.uniform()}));
  }
  CHECK(distinct.size() <= 3);
}

TEST_CASE("funnels keep the convex base's argmin") {
  for (Kind k : {Kind::LinearFunnel, Kind::NarrowFunnel}) {
    auto surf = surfaces::make_surface(spec_of(k, 2));
    const double center = surf->value(std::vector<double>{0.5, 0.5});
    RngStream rng(3);
    for (int i = 0; i < 2000; ++i) {
      CHECK(surf->value(std::vector<double>{rng.uniform(), rng.uniform()}) >= center);
    }
  }
}

TEST_CASE("mixture construction is a pure function of its inputs") {
  const auto a = surfaces::build_mixture(8848, 2, 8, false);
  const auto b = surfaces::build_mixture(8848, 2, 8, false);
  CHECK(a.means == b.means);
  CHECK(a.covariances == b.covariances);
  CHECK(a.weights == b.weights);

  const auto c = surfaces::build_mixture(8849, 2, 8, false);
  CHECK(a.means != c.means);

  double total = 0.0;
  for (double w : a.weights) {
    CHECK(w > 0.0);
    total += w;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

  const auto diag = surfaces::build_mixture(11, 3, 4, true);
  for (const auto& cov : diag.covariances) {
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) {
        if (i != j) CHECK(cov[i * 3 + j] == 0.0);
      }
    }
  }
}

TEST_CASE("mixture presets pin their seeds") {
  const auto& presets = surfaces::mixture_presets();
  CHECK(presets.at("everest") == 8848);
  CHECK(presets.at("k2") == 8611);
  CHECK(presets.at("kilimanjaro") == 5895);
  CHECK(presets.at("denali") == 6190);
  CHECK(presets.at("matterhorn") == 4478);
  CHECK(presets.at("mont_blanc") == 4808);

  const SurfaceSpec spec = SurfaceSpec::parse("everest");
  CHECK(spec.kind == Kind::GaussianMixture);
  CHECK(spec.id() == "everest_d2");
  auto surf = surfaces::make_surface(spec);
  auto again = surfaces::make_surface(SurfaceSpec::parse("everest"));
  RngStream rng(1);
  for (int i = 0; i < 50; ++i) {
    std::vector<double> u{rng.uniform(), rng.uniform()};
    CHECK(surf->value(u) == again->value(u));
    CHECK(surf->value(u) <= 0.0);  // negated density
  }
}

TEST_CASE("spec text and json forms round-trip") {
  SurfaceSpec spec = SurfaceSpec::parse("michalewicz:d=3,m=12");
  CHECK(spec.kind == Kind::Michalewicz);
  CHECK(spec.param_dim == 3);
  CHECK(spec.extra.at("m") == 12.0);
  CHECK(spec.id() == "michalewicz_d3_m12");

  const SurfaceSpec back = SurfaceSpec::from_json(spec.to_json());
  CHECK(back.kind == spec.kind);
  CHECK(back.param_dim == spec.param_dim);
  CHECK(back.extra == spec.extra);

  const SurfaceSpec mix = SurfaceSpec::parse("gaussian_mixture:d=3,seed=7,components=4");
  CHECK(mix.extra.at("seed") == 7.0);
  const SurfaceSpec mix2 = SurfaceSpec::from_json(mix.to_json());
  CHECK(mix2.extra == mix.extra);

  CHECK_THROWS_AS(SurfaceSpec::parse("bogus:d=2"), ValidationError);
  CHECK_THROWS_AS(SurfaceSpec::parse("dejong:d=0"), ValidationError);
  CHECK_THROWS_AS(SurfaceSpec::parse("dejong:m=4"), ValidationError);  // wrong knob
  CHECK_THROWS_AS(SurfaceSpec::parse("branin:d=3"), ValidationError);
}

TEST_CASE("noisy specs build noisy evaluators with suffixed ids") {
  SurfaceSpec spec = SurfaceSpec::parse("dejong:d=2");
  spec.noise = noise::NoiseSpec::parse("gaussian:0.5");
  auto eval = surfaces::make_evaluator(spec);
  CHECK(eval->id() == "dejong_d2+gaussian:0.5");

  RngStream rng(4);
  ParamVector center(eval->space(), {0.5, 0.5});
  double spread = 0.0;
  for (int i = 0; i < 100; ++i) spread += std::fabs(eval->evaluate(center, rng));
  CHECK(spread > 0.0);  // noise actually applied at the clean minimum

  const SurfaceSpec round = SurfaceSpec::from_json(spec.to_json());
  REQUIRE(round.noise.has_value());
  CHECK(surfaces::make_evaluator(round)->id() == eval->id());
}

TEST_CASE("surface value guards its inputs") {
  auto surf = surfaces::make_surface(spec_of(Kind::Dejong, 2));
  CHECK_THROWS_AS((void)surf->value(std::vector<double>{0.5}), ContractError);
  CHECK_THROWS_AS((void)surf->value(std::vector<double>{0.5, 1.5}), ContractError);
  CHECK_THROWS_AS((void)surf->value(std::vector<double>{-0.1, 0.5}), ContractError);
}

TEST_CASE("batch evaluation preserves order and rejects ragged input") {
  const SurfaceSpec spec = spec_of(Kind::HyperEllipsoid, 2);
  const std::vector<std::vector<double>> batch{{0.1, 0.2}, {0.9, 0.9}, {0.5, 0.5}};
  const auto values = surfaces::evaluate_batch(spec, batch);
  REQUIRE(values.size() == 3);
  CHECK(values[0] == value_at_unit(spec, {0.1, 0.2}));
  CHECK(values[2] == 0.0);
  CHECK_THROWS_AS((void)surfaces::evaluate_batch(spec, {{0.1, 0.2}, {0.3}}),
                  ValidationError);
}
