#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "noisybench/errors.hpp"
#include "noisybench/planners.hpp"
#include "planners_impl.hpp"

namespace noisybench::planners::detail {

namespace {

// Shared population bookkeeping: the first `size` rounds fill the population
// with uniform draws, later rounds address members round-robin by round % size.
struct Population {
  std::vector<std::vector<double>> x;
  std::vector<double> f;

  bool full(std::size_t size) const { return x.size() >= size; }

  void add(std::span<const double> u, double value) {
    x.emplace_back(u.begin(), u.end());
    f.push_back(value);
  }

  std::size_t worst() const {
    return static_cast<std::size_t>(
        std::max_element(f.begin(), f.end()) - f.begin());
  }

  std::size_t best() const {
    return static_cast<std::size_t>(
        std::min_element(f.begin(), f.end()) - f.begin());
  }
};

// rand/1/bin differential evolution. Trial vectors are proposed per member in
// round-robin order and replace that member when they do not lose.
class DifferentialEvolution final : public Planner {
 public:
  DifferentialEvolution(PlannerConfig config, std::shared_ptr<const ParamSpace> space)
      : Planner(std::move(config), std::move(space)) {
    check_hyperparams(this->config(), {"popsize", "f", "cr"});
    np_ = static_cast<std::size_t>(
        hyper_int(this->config(), "popsize", static_cast<int>(default_popsize(dim())), 4));
    f_ = hyper(this->config(), "f", 0.8);
    cr_ = hyper(this->config(), "cr", 0.9);
    if (!std::isfinite(f_) || f_ <= 0.0 || !std::isfinite(cr_) || cr_ < 0.0 || cr_ > 1.0) {
      throw ConfigError("differential_evolution needs f > 0 and cr in [0, 1]");
    }
  }

 protected:
  std::vector<double> propose(std::size_t round) override {
    if (!pop_.full(np_)) return uniform_point(round);
    RngStream rng = stream("de", round);
    const std::size_t m = round % np_;
    std::size_t r1 = m, r2 = m, r3 = m;
    while (r1 == m) r1 = rng.pick(np_);
    while (r2 == m || r2 == r1) r2 = rng.pick(np_);
    while (r3 == m || r3 == r1 || r3 == r2) r3 = rng.pick(np_);
    const std::size_t jrand = rng.pick(dim());
    std::vector<double> trial = pop_.x[m];
    for (std::size_t j = 0; j < dim(); ++j) {
      const double mutant = pop_.x[r1][j] + f_ * (pop_.x[r2][j] - pop_.x[r3][j]);
      if (rng.uniform() < cr_ || j == jrand) trial[j] = mutant;
    }
    return trial;
  }

  void absorb(std::span<const double> u, double f, std::size_t round) override {
    if (!pop_.full(np_)) {
      pop_.add(u, f);
      return;
    }
    const std::size_t m = round % np_;
    if (f <= pop_.f[m]) {
      pop_.x[m].assign(u.begin(), u.end());
      pop_.f[m] = f;
    }
  }

 private:
  std::size_t np_;
  double f_;
  double cr_;
  Population pop_;
};

// Global-best particle swarm. propose() and absorb() rebuild the same
// velocity from the same stream, so the proposal stays a pure function of
// state while the velocity update lands exactly once, at tell time.
class ParticleSwarm final : public Planner {
 public:
  ParticleSwarm(PlannerConfig config, std::shared_ptr<const ParamSpace> space)
      : Planner(std::move(config), std::move(space)) {
    check_hyperparams(this->config(), {"popsize", "inertia", "cognitive", "social"});
    swarm_ = static_cast<std::size_t>(
        hyper_int(this->config(), "popsize", static_cast<int>(default_popsize(dim())), 2));
    w_ = hyper(this->config(), "inertia", 0.7);
    c1_ = hyper(this->config(), "cognitive", 1.4);
    c2_ = hyper(this->config(), "social", 1.4);
    if (!std::isfinite(w_) || !std::isfinite(c1_) || !std::isfinite(c2_)) {
      throw ConfigError("particle_swarm coefficients must be finite");
    }
  }

 protected:
  std::vector<double> propose(std::size_t round) override {
    if (!pop_.full(swarm_)) return uniform_point(round);
    const std::size_t m = round % swarm_;
    const std::vector<double> v = next_velocity(m, round);
    std::vector<double> u = pop_.x[m];
    for (std::size_t i = 0; i < dim(); ++i) u[i] += v[i];
    return u;
  }

  void absorb(std::span<const double> u, double f, std::size_t round) override {
    if (!pop_.full(swarm_)) {
      pop_.add(u, f);
      vel_.emplace_back(dim(), 0.0);
      best_x_.emplace_back(u.begin(), u.end());
      best_f_.push_back(f);
      return;
    }
    const std::size_t m = round % swarm_;
    vel_[m] = next_velocity(m, round);
    pop_.x[m].assign(u.begin(), u.end());
    pop_.f[m] = f;
    if (f < best_f_[m]) {
      best_f_[m] = f;
      best_x_[m].assign(u.begin(), u.end());
    }
  }

 private:
  static constexpr double kVmax = 0.5;

  std::vector<double> next_velocity(std::size_t m, std::size_t round) {
    RngStream rng = stream("pso", round);
    const std::size_t g = static_cast<std::size_t>(
        std::min_element(best_f_.begin(), best_f_.end()) - best_f_.begin());
    std::vector<double> v(dim());
    for (std::size_t i = 0; i < dim(); ++i) {
      const double r1 = rng.uniform();
      const double r2 = rng.uniform();
      v[i] = w_ * vel_[m][i] + c1_ * r1 * (best_x_[m][i] - pop_.x[m][i]) +
             c2_ * r2 * (best_x_[g][i] - pop_.x[m][i]);
      v[i] = std::clamp(v[i], -kVmax, kVmax);
    }
    return v;
  }

  std::size_t swarm_;
  double w_;
  double c1_;
  double c2_;
  Population pop_;
  std::vector<std::vector<double>> vel_;
  std::vector<std::vector<double>> best_x_;
  std::vector<double> best_f_;
};

// Steady-state genetic algorithm: binary tournaments pick two parents, BLX
// blend crossover plus occasional gaussian mutation makes one child, and the
// child replaces the worst member only when it improves on it.
class Genetic final : public Planner {
 public:
  Genetic(PlannerConfig config, std::shared_ptr<const ParamSpace> space)
      : Planner(std::move(config), std::move(space)) {
    check_hyperparams(this->config(), {"popsize", "blend", "mutation_sigma"});
    np_ = static_cast<std::size_t>(
        hyper_int(this->config(), "popsize", static_cast<int>(default_popsize(dim())), 2));
    blend_ = hyper(this->config(), "blend", 0.5);
    sigma_ = hyper(this->config(), "mutation_sigma", 0.1);
    if (!std::isfinite(blend_) || blend_ < 0.0 || !std::isfinite(sigma_) || sigma_ <= 0.0) {
      throw ConfigError("genetic needs blend >= 0 and mutation_sigma > 0");
    }
  }

 protected:
  std::vector<double> propose(std::size_t round) override {
    if (!pop_.full(np_)) return uniform_point(round);
    RngStream rng = stream("ga", round);
    const auto& a = pop_.x[tournament(rng)];
    const auto& b = pop_.x[tournament(rng)];
    const double pm = 1.0 / static_cast<double>(dim());
    std::vector<double> child(dim());
    for (std::size_t i = 0; i < dim(); ++i) {
      const double lo = std::min(a[i], b[i]);
      const double hi = std::max(a[i], b[i]);
      const double pad = blend_ * (hi - lo);
      child[i] = rng.uniform(lo - pad, hi + pad);
      if (rng.uniform() < pm) child[i] += rng.normal(0.0, sigma_);
    }
    return child;
  }

  void absorb(std::span<const double> u, double f, std::size_t) override {
    if (!pop_.full(np_)) {
      pop_.add(u, f);
      return;
    }
    const std::size_t w = pop_.worst();
    if (f < pop_.f[w]) {
      pop_.x[w].assign(u.begin(), u.end());
      pop_.f[w] = f;
    }
  }

 private:
  std::size_t tournament(RngStream& rng) const {
    const std::size_t i = rng.pick(np_);
    const std::size_t j = rng.pick(np_);
    return pop_.f[i] <= pop_.f[j] ? i : j;
  }

  std::size_t np_;
  double blend_;
  double sigma_;
  Population pop_;
};

}  // namespace

std::unique_ptr<Planner> make_differential_evolution(PlannerConfig c,
                                                     std::shared_ptr<const ParamSpace> s) {
  return std::make_unique<DifferentialEvolution>(std::move(c), std::move(s));
}
std::unique_ptr<Planner> make_particle_swarm(PlannerConfig c,
                                             std::shared_ptr<const ParamSpace> s) {
  return std::make_unique<ParticleSwarm>(std::move(c), std::move(s));
}
std::unique_ptr<Planner> make_genetic(PlannerConfig c, std::shared_ptr<const ParamSpace> s) {
  return std::make_unique<Genetic>(std::move(c), std::move(s));
}

}  // namespace noisybench::planners::detail
