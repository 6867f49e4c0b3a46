#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "noisybench/errors.hpp"
#include "noisybench/planners.hpp"
#include "planners_impl.hpp"

namespace noisybench::planners::detail {

namespace {

constexpr double kJitter = 1e-4;  // observation noise variance on the kernel diagonal

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }
double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::acos(-1.0));
}

// Gaussian-process surrogate with a squared-exponential kernel on unit
// coordinates and expected-improvement acquisition. The length scale is
// re-selected by log-marginal-likelihood grid search every few observations;
// in between, new points extend the Cholesky factor by one row. Past the
// observation cap the worst point is dropped, which keeps each ask bounded.
class GpBayesOpt final : public Planner {
 public:
  GpBayesOpt(PlannerConfig config, std::shared_ptr<const ParamSpace> space)
      : Planner(std::move(config), std::move(space)) {
    check_hyperparams(this->config(), {"candidates", "max_obs", "refit_every"});
    candidates_ = static_cast<std::size_t>(
        hyper_int(this->config(), "candidates", 1000, 1));
    max_obs_ = static_cast<std::size_t>(hyper_int(this->config(), "max_obs", 200, 4));
    refit_every_ = static_cast<std::size_t>(hyper_int(this->config(), "refit_every", 5, 1));
  }

 protected:
  std::vector<double> propose(std::size_t round) override {
    const auto n = static_cast<Eigen::Index>(x_.rows());
    if (n < 2) return uniform_point(round);

    RngStream rng = stream("gp", round);
    const auto d = static_cast<Eigen::Index>(dim());
    const auto m = static_cast<Eigen::Index>(candidates_);
    Eigen::MatrixXd cand(m, d);
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) cand(i, j) = rng.uniform();
    }

    // Pairwise squared distances via the usual norm expansion, then one
    // batched triangular solve for all predictive variances.
    const Eigen::VectorXd xn = x_.rowwise().squaredNorm();
    const Eigen::VectorXd cn = cand.rowwise().squaredNorm();
    Eigen::MatrixXd d2 = -2.0 * (x_ * cand.transpose());
    d2.colwise() += xn;
    d2.rowwise() += cn.transpose();
    const Eigen::MatrixXd ks =
        (-d2.cwiseMax(0.0) / (2.0 * ell_ * ell_)).array().exp().matrix();

    const Eigen::MatrixXd v = chol_.triangularView<Eigen::Lower>().solve(ks);
    const Eigen::VectorXd mean = ks.transpose() * alpha_;
    const Eigen::VectorXd var =
        (Eigen::VectorXd::Constant(m, 1.0) - v.colwise().squaredNorm().transpose())
            .cwiseMax(1e-12);

    const double best = ys_.minCoeff();
    Eigen::Index pick = 0;
    double best_ei = -1.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      const double sd = std::sqrt(var[i]);
      const double z = (best - mean[i]) / sd;
      const double ei = (best - mean[i]) * normal_cdf(z) + sd * normal_pdf(z);
      if (ei > best_ei) {
        best_ei = ei;
        pick = i;
      }
    }
    const Eigen::VectorXd u = cand.row(pick).transpose();
    return {u.data(), u.data() + d};
  }

  void absorb(std::span<const double> u, double f, std::size_t) override {
    obs_x_.emplace_back(u.begin(), u.end());
    obs_y_.push_back(f);
    ++tells_;

    bool evicted = false;
    if (obs_x_.size() > max_obs_) {
      const std::size_t w = static_cast<std::size_t>(
          std::max_element(obs_y_.begin(), obs_y_.end()) - obs_y_.begin());
      obs_x_.erase(obs_x_.begin() + static_cast<std::ptrdiff_t>(w));
      obs_y_.erase(obs_y_.begin() + static_cast<std::ptrdiff_t>(w));
      evicted = true;
    }
    if (obs_x_.size() < 2) return;

    const bool select_scale = tells_ % refit_every_ == 0 || chol_.rows() == 0;
    if (select_scale || evicted) {
      rebuild(select_scale);
    } else {
      append_last();
    }
  }

 private:
  void standardize() {
    const auto n = static_cast<Eigen::Index>(obs_y_.size());
    Eigen::Map<const Eigen::VectorXd> y(obs_y_.data(), n);
    const double mu = y.mean();
    const double sd = std::max(std::sqrt((y.array() - mu).square().mean()), 1e-12);
    ys_ = ((y.array() - mu) / sd).matrix();
  }

  static double log_marginal(const Eigen::LLT<Eigen::MatrixXd>& llt,
                             const Eigen::VectorXd& ys, const Eigen::VectorXd& alpha) {
    const auto n = static_cast<double>(ys.size());
    const double logdet =
        llt.matrixLLT().diagonal().array().log().sum();
    return -0.5 * ys.dot(alpha) - logdet - 0.5 * n * std::log(2.0 * std::acos(-1.0));
  }

  void rebuild(bool select_scale) {
    const auto n = static_cast<Eigen::Index>(obs_x_.size());
    const auto d = static_cast<Eigen::Index>(dim());
    x_.resize(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) x_(i, j) = obs_x_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    standardize();

    const Eigen::VectorXd sq = x_.rowwise().squaredNorm();
    Eigen::MatrixXd d2 = -2.0 * (x_ * x_.transpose());
    d2.colwise() += sq;
    d2.rowwise() += sq.transpose();
    d2 = d2.cwiseMax(0.0);

    const auto factor = [&](double ell) {
      Eigen::MatrixXd k = (-d2 / (2.0 * ell * ell)).array().exp().matrix();
      k.diagonal().array() += kJitter;
      return Eigen::LLT<Eigen::MatrixXd>(k);
    };

    if (select_scale) {
      double best_lml = -std::numeric_limits<double>::infinity();
      for (int i = 0; i < 10; ++i) {
        const double ell = 0.05 * std::pow(2.0 / 0.05, i / 9.0);
        Eigen::LLT<Eigen::MatrixXd> llt = factor(ell);
        if (llt.info() != Eigen::Success) continue;
        const Eigen::VectorXd alpha = llt.solve(ys_);
        const double lml = log_marginal(llt, ys_, alpha);
        if (lml > best_lml) {
          best_lml = lml;
          ell_ = ell;
          chol_ = llt.matrixL();
          alpha_ = alpha;
        }
      }
      if (std::isfinite(best_lml)) return;
    }
    Eigen::LLT<Eigen::MatrixXd> llt = factor(ell_);
    chol_ = llt.matrixL();
    alpha_ = llt.solve(ys_);
  }

  // Grow the factor by one row for the observation just appended; only the
  // target standardization and alpha need a full (quadratic) recompute.
  void append_last() {
    const auto n = static_cast<Eigen::Index>(obs_x_.size());
    const auto d = static_cast<Eigen::Index>(dim());
    Eigen::VectorXd xnew(d);
    for (Eigen::Index j = 0; j < d; ++j) {
      xnew[j] = obs_x_.back()[static_cast<std::size_t>(j)];
    }

    Eigen::VectorXd k(n - 1);
    for (Eigen::Index i = 0; i < n - 1; ++i) {
      const double dist2 = (x_.row(i).transpose() - xnew).squaredNorm();
      k[i] = std::exp(-dist2 / (2.0 * ell_ * ell_));
    }
    const Eigen::VectorXd c = chol_.triangularView<Eigen::Lower>().solve(k);
    const double diag2 = 1.0 + kJitter - c.squaredNorm();
    const double diag = std::sqrt(std::max(diag2, 0.5 * kJitter));

    x_.conservativeResize(n, d);
    x_.row(n - 1) = xnew.transpose();
    chol_.conservativeResize(n, n);
    chol_.row(n - 1).head(n - 1) = c.transpose();
    chol_.col(n - 1).setZero();
    chol_(n - 1, n - 1) = diag;

    standardize();
    alpha_ = chol_.triangularView<Eigen::Lower>().solve(ys_);
    chol_.transpose().triangularView<Eigen::Upper>().solveInPlace(alpha_);
  }

  std::size_t candidates_;
  std::size_t max_obs_;
  std::size_t refit_every_;
  std::size_t tells_ = 0;

  std::vector<std::vector<double>> obs_x_;
  std::vector<double> obs_y_;

  double ell_ = 0.5;
  Eigen::MatrixXd x_;
  Eigen::VectorXd ys_;
  Eigen::MatrixXd chol_;
  Eigen::VectorXd alpha_;
};

}  // namespace

std::unique_ptr<Planner> make_gp_bayes_opt(PlannerConfig c, std::shared_ptr<const ParamSpace> s) {
  return std::make_unique<GpBayesOpt>(std::move(c), std::move(s));
}

}  // namespace noisybench::planners::detail
