#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "noisybench/rng.hpp"

namespace noisybench::detail {

enum class Activation { Softplus, Tanh, Relu };

Activation activation_from_string(const std::string& name);
std::string to_string(Activation act);

struct TrainOptions {
  int epochs = 2000;
  double learning_rate = 1e-3;
  double momentum = 0.9;
  int batch_size = 32;
  int patience = 50;
};

// Plain fully connected regression net: `depth` hidden layers of `width`
// units with one linear output. Works on standardized inputs/targets; all
// normalization lives in the caller.
class Mlp {
 public:
  Mlp(std::size_t in_dim, int depth, int width, Activation act);

  // Gaussian init scaled by fan-in; biases start at zero.
  void init(RngStream& rng);

  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const;  // rows = samples
  double predict_one(const double* x) const;

  // Minibatch SGD with momentum, early-stopped when the validation loss has
  // not improved for `patience` epochs (training loss stands in when `xval`
  // is empty). Returns epochs run; EvaluationError on non-finite loss.
  int fit(const Eigen::MatrixXd& xtr, const Eigen::VectorXd& ytr,
          const Eigen::MatrixXd& xval, const Eigen::VectorXd& yval,
          const TrainOptions& opt, RngStream& rng);

  std::size_t weight_count() const;
  std::vector<double> flatten() const;
  void unflatten(const std::vector<double>& blob);

 private:
  struct Layer {
    Eigen::MatrixXd w;  // out x in
    Eigen::VectorXd b;
  };

  Eigen::ArrayXXd activate(const Eigen::ArrayXXd& z) const;
  Eigen::ArrayXXd activate_grad(const Eigen::ArrayXXd& z) const;

  std::size_t in_dim_;
  Activation act_;
  std::vector<Layer> layers_;  // depth hidden layers, then the output layer
};

}  // namespace noisybench::detail
