#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "noisybench/errors.hpp"
#include "noisybench/planners.hpp"
#include "planners_impl.hpp"

namespace noisybench::planners::detail {

namespace {

// Nelder-Mead downhill simplex, driven as an ask/tell state machine. The
// simplex holds the points as actually evaluated (after boundary clipping),
// so warm-start tells and clipped proposals stay consistent.
class Simplex final : public Planner {
 public:
  Simplex(PlannerConfig config, std::shared_ptr<const ParamSpace> space)
      : Planner(std::move(config), std::move(space)) {
    check_hyperparams(this->config(), {});
    x0_ = uniform_point(0);
  }

 protected:
  std::vector<double> propose(std::size_t) override {
    switch (phase_) {
      case Phase::Fill: {
        std::vector<double> u = x0_;
        const std::size_t i = simplex_.size();
        if (i > 0) {
          const std::size_t d = i - 1;
          u[d] += (u[d] + kStep <= 1.0) ? kStep : -kStep;
        }
        return u;
      }
      case Phase::Reflect:
        return toward(-kAlpha, worst());
      case Phase::Expand:
        return toward(kGamma, xr_);
      case Phase::ContractOut:
        return toward(kRho, xr_);
      case Phase::ContractIn:
        // Inside contraction pulls toward the worst vertex instead of away.
        return toward(kRho, worst());
      case Phase::Shrink:
        return shrink_targets_[shrink_index_];
    }
    return x0_;
  }

  void absorb(std::span<const double> u, double f, std::size_t) override {
    std::vector<double> x(u.begin(), u.end());
    switch (phase_) {
      case Phase::Fill:
        simplex_.emplace_back(std::move(x), f);
        if (simplex_.size() == dim() + 1) {
          sort_simplex();
          phase_ = Phase::Reflect;
        }
        break;
      case Phase::Reflect:
        xr_ = std::move(x);
        fr_ = f;
        if (f < simplex_.front().second) {
          phase_ = Phase::Expand;
        } else if (f < simplex_[simplex_.size() - 2].second) {
          replace_worst(xr_, fr_);
          phase_ = Phase::Reflect;
        } else if (f < simplex_.back().second) {
          phase_ = Phase::ContractOut;
        } else {
          phase_ = Phase::ContractIn;
        }
        break;
      case Phase::Expand:
        if (f < fr_) {
          replace_worst(std::move(x), f);
        } else {
          replace_worst(xr_, fr_);
        }
        phase_ = Phase::Reflect;
        break;
      case Phase::ContractOut:
        if (f <= fr_) {
          replace_worst(std::move(x), f);
          phase_ = Phase::Reflect;
        } else {
          start_shrink();
        }
        break;
      case Phase::ContractIn:
        if (f < simplex_.back().second) {
          replace_worst(std::move(x), f);
          phase_ = Phase::Reflect;
        } else {
          start_shrink();
        }
        break;
      case Phase::Shrink:
        simplex_[shrink_index_] = {std::move(x), f};
        ++shrink_index_;
        if (shrink_index_ == simplex_.size()) {
          sort_simplex();
          phase_ = Phase::Reflect;
        }
        break;
    }
  }

 private:
  enum class Phase { Fill, Reflect, Expand, ContractOut, ContractIn, Shrink };
  static constexpr double kStep = 0.1;
  static constexpr double kAlpha = 1.0;
  static constexpr double kGamma = 2.0;
  static constexpr double kRho = 0.5;
  static constexpr double kSigma = 0.5;

  const std::vector<double>& worst() const { return simplex_.back().first; }

  std::vector<double> centroid() const {
    std::vector<double> c(dim(), 0.0);
    for (std::size_t v = 0; v + 1 < simplex_.size(); ++v) {
      for (std::size_t i = 0; i < dim(); ++i) c[i] += simplex_[v].first[i];
    }
    const auto n = static_cast<double>(simplex_.size() - 1);
    for (double& ci : c) ci /= n;
    return c;
  }

  // c + t * (target - c): every simplex move is this line with a different t.
  std::vector<double> toward(double t, const std::vector<double>& target) const {
    std::vector<double> c = centroid();
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += t * (target[i] - c[i]);
    return c;
  }

  void sort_simplex() {
    std::stable_sort(simplex_.begin(), simplex_.end(),
                     [](const auto& a, const auto& b) { return a.second < b.second; });
  }

  void replace_worst(std::vector<double> x, double f) {
    simplex_.back() = {std::move(x), f};
    sort_simplex();
  }

  void start_shrink() {
    shrink_targets_.assign(simplex_.size(), {});
    const auto& best = simplex_.front().first;
    for (std::size_t v = 1; v < simplex_.size(); ++v) {
      std::vector<double> t = best;
      for (std::size_t i = 0; i < dim(); ++i) {
        t[i] += kSigma * (simplex_[v].first[i] - best[i]);
      }
      shrink_targets_[v] = std::move(t);
    }
    shrink_index_ = 1;
    phase_ = Phase::Shrink;
  }

  Phase phase_ = Phase::Fill;
  std::vector<double> x0_;
  std::vector<std::pair<std::vector<double>, double>> simplex_;
  std::vector<double> xr_;
  double fr_ = 0.0;
  std::vector<std::vector<double>> shrink_targets_;
  std::size_t shrink_index_ = 0;
};

// Gradient descent with central finite differences estimated from extra
// evaluations. Gradients use the coordinates as actually evaluated, so
// clipping at the boundary shrinks the stencil instead of corrupting it.
class SteepestDescent final : public Planner {
 public:
  SteepestDescent(PlannerConfig config, std::shared_ptr<const ParamSpace> space)
      : Planner(std::move(config), std::move(space)) {
    check_hyperparams(this->config(), {"step"});
    h_ = hyper(this->config(), "step", 1e-4);
    if (!std::isfinite(h_) || h_ <= 0.0) {
      throw ConfigError("steepest_descent step must be positive");
    }
  }

 protected:
  std::vector<double> propose(std::size_t round) override {
    switch (phase_) {
      case Phase::Init:
        return uniform_point(round);
      case Phase::Probe: {
        std::vector<double> u = x_;
        const std::size_t d = probe_index_ / 2;
        u[d] += (probe_index_ % 2 == 0) ? h_ : -h_;
        return u;
      }
      case Phase::Step: {
        std::vector<double> u = x_;
        for (std::size_t i = 0; i < dim(); ++i) u[i] -= eta_ * grad_[i];
        return u;
      }
    }
    return x_;
  }

  void absorb(std::span<const double> u, double f, std::size_t) override {
    switch (phase_) {
      case Phase::Init:
        x_.assign(u.begin(), u.end());
        f_ = f;
        enter_probe();
        break;
      case Phase::Probe:
        probe_x_[probe_index_].assign(u.begin(), u.end());
        probe_f_[probe_index_] = f;
        ++probe_index_;
        if (probe_index_ == 2 * dim()) finish_probe();
        break;
      case Phase::Step:
        if (f < f_) {
          x_.assign(u.begin(), u.end());
          f_ = f;
          enter_probe();
        } else {
          eta_ *= 0.5;
          if (eta_ < kEtaFloor) enter_probe();
        }
        break;
    }
  }

 private:
  enum class Phase { Init, Probe, Step };
  static constexpr double kEtaFloor = 1e-8;

  void enter_probe() {
    phase_ = Phase::Probe;
    probe_index_ = 0;
    probe_x_.assign(2 * dim(), {});
    probe_f_.assign(2 * dim(), 0.0);
  }

  void finish_probe() {
    grad_.assign(dim(), 0.0);
    double norm2 = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) {
      const double dx = probe_x_[2 * i][i] - probe_x_[2 * i + 1][i];
      grad_[i] = dx != 0.0 ? (probe_f_[2 * i] - probe_f_[2 * i + 1]) / dx : 0.0;
      norm2 += grad_[i] * grad_[i];
    }
    if (norm2 == 0.0) {
      phase_ = Phase::Init;
      return;
    }
    eta_ = 0.1;
    phase_ = Phase::Step;
  }

  Phase phase_ = Phase::Init;
  double h_;
  double eta_ = 0.1;
  std::vector<double> x_;
  double f_ = 0.0;
  std::size_t probe_index_ = 0;
  std::vector<std::vector<double>> probe_x_;
  std::vector<double> probe_f_;
  std::vector<double> grad_;
};

// Random restarts around the incumbent with Metropolis acceptance at unit
// temperature. Worse points are still taken with probability exp(-delta).
class BasinHopping final : public Planner {
 public:
  BasinHopping(PlannerConfig config, std::shared_ptr<const ParamSpace> space)
      : Planner(std::move(config), std::move(space)) {
    check_hyperparams(this->config(), {"step"});
    step_ = hyper(this->config(), "step", 0.1);
    if (!std::isfinite(step_) || step_ <= 0.0) {
      throw ConfigError("basin_hopping step must be positive");
    }
  }

 protected:
  std::vector<double> propose(std::size_t round) override {
    if (!have_incumbent_) return uniform_point(round);
    RngStream rng = stream("hop", round);
    std::vector<double> u = x_;
    for (double& ui : u) ui += rng.normal(0.0, step_);
    return u;
  }

  void absorb(std::span<const double> u, double f, std::size_t round) override {
    if (!have_incumbent_) {
      x_.assign(u.begin(), u.end());
      f_ = f;
      have_incumbent_ = true;
      return;
    }
    bool accept = f < f_;
    if (!accept) {
      accept = stream("accept", round).uniform() < std::exp(f_ - f);
    }
    if (accept) {
      x_.assign(u.begin(), u.end());
      f_ = f;
    }
  }

 private:
  double step_;
  bool have_incumbent_ = false;
  std::vector<double> x_;
  double f_ = 0.0;
};

}  // namespace

std::unique_ptr<Planner> make_simplex(PlannerConfig c, std::shared_ptr<const ParamSpace> s) {
  return std::make_unique<Simplex>(std::move(c), std::move(s));
}
std::unique_ptr<Planner> make_steepest_descent(PlannerConfig c, std::shared_ptr<const ParamSpace> s) {
  return std::make_unique<SteepestDescent>(std::move(c), std::move(s));
}
std::unique_ptr<Planner> make_basin_hopping(PlannerConfig c, std::shared_ptr<const ParamSpace> s) {
  return std::make_unique<BasinHopping>(std::move(c), std::move(s));
}

}  // namespace noisybench::planners::detail
