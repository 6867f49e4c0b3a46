#include <algorithm>
#include <cmath>

#include "noisybench/errors.hpp"
#include "noisybench/planners.hpp"
#include "planners_impl.hpp"
#include "sobol_engine.hpp"

namespace noisybench::planners::detail {

namespace {

class RandomSearch final : public Planner {
 public:
  RandomSearch(PlannerConfig config, std::shared_ptr<const ParamSpace> space)
      : Planner(std::move(config), std::move(space)) {
    check_hyperparams(this->config(), {});
  }

 protected:
  std::vector<double> propose(std::size_t round) override { return uniform_point(round); }
  void absorb(std::span<const double>, double, std::size_t) override {}
};

// Cell centers of a levels^d lattice, visited in row-major order (last
// dimension fastest). A finite plan: asking past the last cell raises
// PlanExhaustedError.
class GridSearch final : public Planner {
 public:
  GridSearch(PlannerConfig config, std::shared_ptr<const ParamSpace> space)
      : Planner(std::move(config), std::move(space)) {
    check_hyperparams(this->config(), {"levels"});
    levels_ = hyper_int(this->config(), "levels", 8, 1);
    total_ = 1.0;
    for (std::size_t i = 0; i < dim(); ++i) total_ *= static_cast<double>(levels_);
  }

 protected:
  std::vector<double> propose(std::size_t round) override {
    if (static_cast<double>(round) >= total_) {
      throw PlanExhaustedError("grid of " + std::to_string(levels_) + "^" +
                               std::to_string(dim()) + " cells is exhausted");
    }
    std::vector<double> u(dim());
    std::size_t rest = round;
    for (std::size_t i = dim(); i-- > 0;) {
      const std::size_t idx = rest % static_cast<std::size_t>(levels_);
      rest /= static_cast<std::size_t>(levels_);
      u[i] = (static_cast<double>(idx) + 0.5) / static_cast<double>(levels_);
    }
    return u;
  }

  void absorb(std::span<const double>, double, std::size_t) override {}

 private:
  int levels_;
  double total_;
};

// Stratified batches: within each batch of n asks, every dimension sees
// exactly one point per stratum [k/n, (k+1)/n). Each batch draws a fresh set
// of permutations and offsets; batches are pure functions of (seed, batch).
class LatinHypercube final : public Planner {
 public:
  LatinHypercube(PlannerConfig config, std::shared_ptr<const ParamSpace> space)
      : Planner(std::move(config), std::move(space)) {
    check_hyperparams(this->config(), {"samples"});
    samples_ = hyper_int(this->config(), "samples", 16, 1);
  }

 protected:
  std::vector<double> propose(std::size_t round) override {
    const std::size_t batch = round / static_cast<std::size_t>(samples_);
    const std::size_t pos = round % static_cast<std::size_t>(samples_);
    RngStream rng = stream("lhs", batch);
    const auto n = static_cast<std::size_t>(samples_);
    std::vector<double> u(dim());
    // Draw order is fixed per batch: permutation then offsets per dimension.
    std::vector<std::size_t> perm(n);
    for (std::size_t d = 0; d < dim(); ++d) {
      for (std::size_t i = 0; i < n; ++i) perm[i] = i;
      for (std::size_t i = n; i > 1; --i) {
        std::swap(perm[i - 1], perm[rng.pick(i)]);
      }
      for (std::size_t i = 0; i < n; ++i) {
        const double offset = rng.uniform();
        if (i == pos) {
          u[d] = (static_cast<double>(perm[i]) + offset) / static_cast<double>(n);
        }
      }
    }
    return u;
  }

  void absorb(std::span<const double>, double, std::size_t) override {}

 private:
  int samples_;
};

// Sobol low-discrepancy sequence, skipping the all-zeros point at index 0.
class Sobol final : public Planner {
 public:
  Sobol(PlannerConfig config, std::shared_ptr<const ParamSpace> space)
      : Planner(std::move(config), std::move(space)),
        engine_(this->space()->dim()) {
    check_hyperparams(this->config(), {});
  }

 protected:
  std::vector<double> propose(std::size_t round) override {
    return engine_.point(static_cast<std::uint64_t>(round) + 1);
  }

  void absorb(std::span<const double>, double, std::size_t) override {}

 private:
  noisybench::detail::SobolEngine engine_;
};

}  // namespace

std::unique_ptr<Planner> make_random_search(PlannerConfig c, std::shared_ptr<const ParamSpace> s) {
  return std::make_unique<RandomSearch>(std::move(c), std::move(s));
}
std::unique_ptr<Planner> make_grid_search(PlannerConfig c, std::shared_ptr<const ParamSpace> s) {
  return std::make_unique<GridSearch>(std::move(c), std::move(s));
}
std::unique_ptr<Planner> make_latin_hypercube(PlannerConfig c, std::shared_ptr<const ParamSpace> s) {
  return std::make_unique<LatinHypercube>(std::move(c), std::move(s));
}
std::unique_ptr<Planner> make_sobol(PlannerConfig c, std::shared_ptr<const ParamSpace> s) {
  return std::make_unique<Sobol>(std::move(c), std::move(s));
}

}  // namespace noisybench::planners::detail
