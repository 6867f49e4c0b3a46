#include "mlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "noisybench/errors.hpp"

namespace noisybench::detail {

namespace {

double softplus(double z) {
  if (z > 30.0) return z;
  if (z < -30.0) return std::exp(z);
  return std::log1p(std::exp(z));
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

Activation activation_from_string(const std::string& name) {
  if (name == "softplus") return Activation::Softplus;
  if (name == "tanh") return Activation::Tanh;
  if (name == "relu") return Activation::Relu;
  throw ConfigError("unknown activation '" + name + "' (softplus, tanh, relu)");
}

std::string to_string(Activation act) {
  switch (act) {
    case Activation::Softplus: return "softplus";
    case Activation::Tanh: return "tanh";
    case Activation::Relu: return "relu";
  }
  return "softplus";
}

Mlp::Mlp(std::size_t in_dim, int depth, int width, Activation act)
    : in_dim_(in_dim), act_(act) {
  if (depth < 1) throw ConfigError("hidden_depth must be at least 1");
  if (width < 1) throw ConfigError("hidden_width must be at least 1");
  Eigen::Index prev = static_cast<Eigen::Index>(in_dim);
  for (int l = 0; l < depth; ++l) {
    layers_.push_back({Eigen::MatrixXd::Zero(width, prev), Eigen::VectorXd::Zero(width)});
    prev = width;
  }
  layers_.push_back({Eigen::MatrixXd::Zero(1, prev), Eigen::VectorXd::Zero(1)});
}

void Mlp::init(RngStream& rng) {
  for (Layer& layer : layers_) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(layer.w.cols()));
    for (Eigen::Index r = 0; r < layer.w.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.w.cols(); ++c) {
        layer.w(r, c) = rng.normal(0.0, scale);
      }
    }
    layer.b.setZero();
  }
}

Eigen::ArrayXXd Mlp::activate(const Eigen::ArrayXXd& z) const {
  switch (act_) {
    case Activation::Softplus: return z.unaryExpr([](double v) { return softplus(v); });
    case Activation::Tanh: return z.tanh();
    case Activation::Relu: return z.cwiseMax(0.0);
  }
  return z;
}

Eigen::ArrayXXd Mlp::activate_grad(const Eigen::ArrayXXd& z) const {
  switch (act_) {
    case Activation::Softplus: return z.unaryExpr([](double v) { return sigmoid(v); });
    case Activation::Tanh: return 1.0 - z.tanh().square();
    case Activation::Relu:
      return z.unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; });
  }
  return Eigen::ArrayXXd::Ones(z.rows(), z.cols());
}

Eigen::VectorXd Mlp::predict(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd a = x;
  for (std::size_t l = 0; l + 1 < layers_.size(); ++l) {
    Eigen::MatrixXd z = a * layers_[l].w.transpose();
    z.rowwise() += layers_[l].b.transpose();
    a = activate(z.array()).matrix();
  }
  Eigen::MatrixXd out = a * layers_.back().w.transpose();
  out.rowwise() += layers_.back().b.transpose();
  return out.col(0);
}

double Mlp::predict_one(const double* x) const {
  Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(x, static_cast<Eigen::Index>(in_dim_));
  for (std::size_t l = 0; l + 1 < layers_.size(); ++l) {
    Eigen::VectorXd z = layers_[l].w * a + layers_[l].b;
    a = activate(z.array()).matrix();
  }
  return (layers_.back().w * a + layers_.back().b)(0);
}

int Mlp::fit(const Eigen::MatrixXd& xtr, const Eigen::VectorXd& ytr,
             const Eigen::MatrixXd& xval, const Eigen::VectorXd& yval,
             const TrainOptions& opt, RngStream& rng) {
  const Eigen::Index n = xtr.rows();
  const bool has_val = xval.rows() > 0;
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});

  std::vector<Layer> velocity;
  for (const Layer& l : layers_) {
    velocity.push_back({Eigen::MatrixXd::Zero(l.w.rows(), l.w.cols()),
                        Eigen::VectorXd::Zero(l.b.size())});
  }

  const auto batch = static_cast<Eigen::Index>(std::max(1, opt.batch_size));
  double best = std::numeric_limits<double>::infinity();
  int stale = 0;

  for (int epoch = 0; epoch < opt.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[rng.pick(i)]);
    }

    for (Eigen::Index start = 0; start < n; start += batch) {
      const Eigen::Index b = std::min(batch, n - start);
      Eigen::MatrixXd xb(b, xtr.cols());
      Eigen::VectorXd yb(b);
      for (Eigen::Index i = 0; i < b; ++i) {
        xb.row(i) = xtr.row(order[static_cast<std::size_t>(start + i)]);
        yb[i] = ytr[order[static_cast<std::size_t>(start + i)]];
      }

      // Forward pass keeping pre-activations for the backward sweep.
      std::vector<Eigen::MatrixXd> acts;   // inputs of each layer
      std::vector<Eigen::MatrixXd> pre;    // pre-activations of hidden layers
      acts.push_back(xb);
      for (std::size_t l = 0; l + 1 < layers_.size(); ++l) {
        Eigen::MatrixXd z = acts.back() * layers_[l].w.transpose();
        z.rowwise() += layers_[l].b.transpose();
        pre.push_back(z);
        acts.push_back(activate(z.array()).matrix());
      }
      Eigen::MatrixXd out = acts.back() * layers_.back().w.transpose();
      out.rowwise() += layers_.back().b.transpose();

      // Mean squared error; gradient flows back one layer at a time.
      Eigen::MatrixXd g = 2.0 * (out.col(0) - yb) / static_cast<double>(b);
      for (std::size_t l = layers_.size(); l-- > 0;) {
        const Eigen::MatrixXd dw = g.transpose() * acts[l];
        const Eigen::VectorXd db = g.colwise().sum().transpose();
        if (l > 0) {
          Eigen::MatrixXd back = g * layers_[l].w;
          g = (back.array() * activate_grad(pre[l - 1].array())).matrix();
        }
        velocity[l].w = opt.momentum * velocity[l].w - opt.learning_rate * dw;
        velocity[l].b = opt.momentum * velocity[l].b - opt.learning_rate * db;
        layers_[l].w += velocity[l].w;
        layers_[l].b += velocity[l].b;
      }
    }

    const Eigen::VectorXd pred = has_val ? predict(xval) : predict(xtr);
    const Eigen::VectorXd& truth = has_val ? yval : ytr;
    const double loss = (pred - truth).squaredNorm() / static_cast<double>(truth.size());
    if (!std::isfinite(loss)) {
      throw EvaluationError("training diverged: non-finite loss at epoch " +
                            std::to_string(epoch + 1));
    }
    if (loss < best - 1e-12) {
      best = loss;
      stale = 0;
    } else if (++stale >= opt.patience) {
      return epoch + 1;
    }
  }
  return opt.epochs;
}

std::size_t Mlp::weight_count() const {
  std::size_t count = 0;
  for (const Layer& l : layers_) {
    count += static_cast<std::size_t>(l.w.size() + l.b.size());
  }
  return count;
}

std::vector<double> Mlp::flatten() const {
  std::vector<double> blob;
  blob.reserve(weight_count());
  for (const Layer& l : layers_) {
    for (Eigen::Index r = 0; r < l.w.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.w.cols(); ++c) blob.push_back(l.w(r, c));
    }
    for (Eigen::Index i = 0; i < l.b.size(); ++i) blob.push_back(l.b[i]);
  }
  return blob;
}

void Mlp::unflatten(const std::vector<double>& blob) {
  if (blob.size() != weight_count()) {
    throw ParseError("weight blob has " + std::to_string(blob.size()) +
                     " values, expected " + std::to_string(weight_count()));
  }
  std::size_t k = 0;
  for (Layer& l : layers_) {
    for (Eigen::Index r = 0; r < l.w.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.w.cols(); ++c) l.w(r, c) = blob[k++];
    }
    for (Eigen::Index i = 0; i < l.b.size(); ++i) l.b[i] = blob[k++];
  }
}

}  // namespace noisybench::detail
