#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "noisybench/errors.hpp"
#include "noisybench/planners.hpp"
#include "planners_impl.hpp"

namespace noisybench::planners::detail {

namespace {

// Covariance matrix adaptation evolution strategy with rank-one and rank-mu
// updates and cumulative step-size control. Proposals are sampled per member
// from the generation's frozen distribution; the distribution itself only
// moves when a full generation has been told back.
class CmaEs final : public Planner {
 public:
  CmaEs(PlannerConfig config, std::shared_ptr<const ParamSpace> space)
      : Planner(std::move(config), std::move(space)) {
    check_hyperparams(this->config(), {"popsize", "sigma0"});
    const auto d = static_cast<double>(dim());
    const int default_lambda = 4 + static_cast<int>(std::floor(3.0 * std::log(d)));
    lambda_ = static_cast<std::size_t>(
        hyper_int(this->config(), "popsize", default_lambda, 2));
    sigma_ = hyper(this->config(), "sigma0", 0.3);
    if (!std::isfinite(sigma_) || sigma_ <= 0.0) {
      throw ConfigError("cma_es sigma0 must be positive");
    }

    mu_ = lambda_ / 2;
    weights_.resize(mu_);
    for (std::size_t i = 0; i < mu_; ++i) {
      weights_[i] = std::log(static_cast<double>(mu_) + 0.5) -
                    std::log(static_cast<double>(i) + 1.0);
    }
    const double wsum = std::accumulate(weights_.begin(), weights_.end(), 0.0);
    double w2 = 0.0;
    for (double& w : weights_) {
      w /= wsum;
      w2 += w * w;
    }
    mueff_ = 1.0 / w2;

    cc_ = (4.0 + mueff_ / d) / (d + 4.0 + 2.0 * mueff_ / d);
    cs_ = (mueff_ + 2.0) / (d + mueff_ + 5.0);
    c1_ = 2.0 / ((d + 1.3) * (d + 1.3) + mueff_);
    cmu_ = std::min(1.0 - c1_, 2.0 * (mueff_ - 2.0 + 1.0 / mueff_) /
                                   ((d + 2.0) * (d + 2.0) + mueff_));
    damps_ = 1.0 + 2.0 * std::max(0.0, std::sqrt((mueff_ - 1.0) / (d + 1.0)) - 1.0) + cs_;
    chi_n_ = std::sqrt(d) * (1.0 - 1.0 / (4.0 * d) + 1.0 / (21.0 * d * d));

    const auto n = static_cast<Eigen::Index>(dim());
    const std::vector<double> m0 = uniform_point(0);
    mean_ = Eigen::Map<const Eigen::VectorXd>(m0.data(), n);
    cov_ = Eigen::MatrixXd::Identity(n, n);
    basis_ = Eigen::MatrixXd::Identity(n, n);
    scales_ = Eigen::VectorXd::Ones(n);
    ps_ = Eigen::VectorXd::Zero(n);
    pc_ = Eigen::VectorXd::Zero(n);
  }

 protected:
  std::vector<double> propose(std::size_t round) override {
    const auto n = static_cast<Eigen::Index>(dim());
    if (round == 0) {
      // The very first proposal is the initial mean itself.
      return {mean_.data(), mean_.data() + n};
    }
    RngStream rng = stream("cma", round);
    Eigen::VectorXd z(n);
    for (Eigen::Index i = 0; i < n; ++i) z[i] = rng.normal();
    const Eigen::VectorXd x = mean_ + sigma_ * (basis_ * scales_.cwiseProduct(z).eval());
    return {x.data(), x.data() + n};
  }

  void absorb(std::span<const double> u, double f, std::size_t) override {
    gen_x_.emplace_back(u.begin(), u.end());
    gen_f_.push_back(f);
    if (gen_x_.size() < lambda_) return;
    update_distribution();
    gen_x_.clear();
    gen_f_.clear();
    ++generation_;
  }

 private:
  void update_distribution() {
    const auto n = static_cast<Eigen::Index>(dim());
    std::vector<std::size_t> order(lambda_);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return gen_f_[a] < gen_f_[b]; });

    const Eigen::VectorXd old_mean = mean_;
    Eigen::VectorXd new_mean = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i < mu_; ++i) {
      const auto& xi = gen_x_[order[i]];
      new_mean += weights_[i] * Eigen::Map<const Eigen::VectorXd>(xi.data(), n);
    }
    const Eigen::VectorXd yw = (new_mean - old_mean) / sigma_;

    // Step-size path in the whitened coordinate system.
    const Eigen::VectorXd whitened =
        basis_ * scales_.cwiseInverse().cwiseProduct(basis_.transpose() * yw).eval();
    ps_ = (1.0 - cs_) * ps_ + std::sqrt(cs_ * (2.0 - cs_) * mueff_) * whitened;

    const double expected_decay =
        std::sqrt(1.0 - std::pow(1.0 - cs_, 2.0 * static_cast<double>(generation_ + 1)));
    const double d = static_cast<double>(dim());
    const bool hsig = ps_.norm() / expected_decay < (1.4 + 2.0 / (d + 1.0)) * chi_n_;

    pc_ = (1.0 - cc_) * pc_;
    if (hsig) pc_ += std::sqrt(cc_ * (2.0 - cc_) * mueff_) * yw;

    Eigen::MatrixXd rank_mu = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < mu_; ++i) {
      const auto& xi = gen_x_[order[i]];
      const Eigen::VectorXd yi =
          (Eigen::Map<const Eigen::VectorXd>(xi.data(), n) - old_mean) / sigma_;
      rank_mu += weights_[i] * (yi * yi.transpose());
    }
    const double hsig_fix = hsig ? 0.0 : cc_ * (2.0 - cc_);
    cov_ = (1.0 - c1_ - cmu_) * cov_ +
           c1_ * (pc_ * pc_.transpose() + hsig_fix * cov_) + cmu_ * rank_mu;

    sigma_ *= std::exp((cs_ / damps_) * (ps_.norm() / chi_n_ - 1.0));
    sigma_ = std::clamp(sigma_, 1e-12, 1e12);
    mean_ = new_mean;

    cov_ = 0.5 * (cov_ + cov_.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov_);
    basis_ = eig.eigenvectors();
    scales_ = eig.eigenvalues().cwiseMax(1e-20).cwiseSqrt();
  }

  std::size_t lambda_;
  std::size_t mu_;
  std::vector<double> weights_;
  double mueff_;
  double cc_;
  double cs_;
  double c1_;
  double cmu_;
  double damps_;
  double chi_n_;
  double sigma_;
  std::size_t generation_ = 0;

  Eigen::VectorXd mean_;
  Eigen::MatrixXd cov_;
  Eigen::MatrixXd basis_;
  Eigen::VectorXd scales_;
  Eigen::VectorXd ps_;
  Eigen::VectorXd pc_;

  std::vector<std::vector<double>> gen_x_;
  std::vector<double> gen_f_;
};

}  // namespace

std::unique_ptr<Planner> make_cma_es(PlannerConfig c, std::shared_ptr<const ParamSpace> s) {
  return std::make_unique<CmaEs>(std::move(c), std::move(s));
}

}  // namespace noisybench::planners::detail
