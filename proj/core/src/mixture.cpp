#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "noisybench/errors.hpp"
#include "noisybench/rng.hpp"
#include "noisybench/surfaces.hpp"

namespace noisybench::surfaces {

namespace {
constexpr double kTwoPi = 6.28318530717958647692;
}

double MixtureModel::density(std::span<const double> u) const {
  if (u.size() != dim) throw ContractError("mixture expects dim-" + std::to_string(dim) + " points");
  std::vector<double> z(dim);
  double total = 0.0;
  for (std::size_t k = 0; k < n_components; ++k) {
    const std::vector<double>& mu = means[k];
    const std::vector<double>& l = chol[k];
    // Forward substitution: z = L^{-1} (u - mu), exponent = -||z||^2 / 2.
    double quad = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      double s = u[i] - mu[i];
      for (std::size_t j = 0; j < i; ++j) s -= l[i * dim + j] * z[j];
      z[i] = s / l[i * dim + i];
      quad += z[i] * z[i];
    }
    total += weights[k] * norm_const[k] * std::exp(-0.5 * quad);
  }
  return total;
}

MixtureModel build_mixture(std::uint64_t seed, std::size_t d, std::size_t n_components,
                           bool diagonal) {
  if (d < 1) throw ConfigError("mixture dimension must be >= 1");
  if (n_components < 1) throw ConfigError("mixture needs at least one component");

  MixtureModel model;
  model.dim = d;
  model.n_components = n_components;
  model.seed = seed;
  model.diagonal = diagonal;

  RngStream rng(derive_seed(seed, hash_tag("mixture")));
  const auto n = static_cast<Eigen::Index>(d);

  for (std::size_t k = 0; k < n_components; ++k) {
    std::vector<double> mean(d);
    for (double& m : mean) m = rng.uniform();
    model.means.push_back(std::move(mean));

    Eigen::VectorXd sigma(n);
    for (Eigen::Index i = 0; i < n; ++i) sigma[i] = rng.uniform(0.05, 0.25);

    Eigen::MatrixXd cov;
    if (diagonal) {
      cov = sigma.array().square().matrix().asDiagonal();
    } else {
      // Random orthonormal frame from the QR of a Gaussian matrix; column
      // signs pinned to the R diagonal so the frame is unique.
      Eigen::MatrixXd gauss(n, n);
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) gauss(i, j) = rng.normal();
      }
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(gauss);
      Eigen::MatrixXd q = qr.householderQ();
      const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
      for (Eigen::Index j = 0; j < n; ++j) {
        if (r(j, j) < 0.0) q.col(j) = -q.col(j);
      }
      cov = q * sigma.array().square().matrix().asDiagonal() * q.transpose();
      cov = ((cov + cov.transpose()) * 0.5).eval();
    }

    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
      throw Error("mixture covariance is not positive definite");
    }
    const Eigen::MatrixXd l = llt.matrixL();

    std::vector<double> cov_flat(d * d);
    std::vector<double> chol_flat(d * d, 0.0);
    double log_det_sqrt = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        cov_flat[i * d + j] = cov(i, j);
        if (j <= i) chol_flat[i * d + j] = l(i, j);
      }
      log_det_sqrt += std::log(l(i, i));
    }
    model.covariances.push_back(std::move(cov_flat));
    model.chol.push_back(std::move(chol_flat));
    model.norm_const.push_back(
        std::exp(-0.5 * static_cast<double>(d) * std::log(kTwoPi) - log_det_sqrt));
  }

  double total = 0.0;
  model.weights.resize(n_components);
  for (double& w : model.weights) {
    w = rng.uniform(0.5, 1.0);
    total += w;
  }
  for (double& w : model.weights) w /= total;

  return model;
}

}  // namespace noisybench::surfaces
