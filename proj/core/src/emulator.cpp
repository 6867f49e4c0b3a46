#include "noisybench/emulator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <numeric>
#include <sstream>
#include <utility>

#include <Eigen/Dense>
#include <json.hpp>

#include "noisybench/errors.hpp"
#include "json_util.hpp"
#include "mlp.hpp"

namespace noisybench::emulator {

using nlohmann::json;

namespace {

constexpr int kFileVersion = 1;
constexpr double kAcceptThreshold = 0.90;

void validate_config(const ModelConfig& c) {
  if (c.hidden_depth < 1) throw ConfigError("hidden_depth must be at least 1");
  if (c.hidden_width < 1) throw ConfigError("hidden_width must be at least 1");
  if (c.members < 1) throw ConfigError("members must be at least 1");
  if (c.epochs < 1) throw ConfigError("epochs must be at least 1");
  if (!(c.learning_rate > 0.0) || !std::isfinite(c.learning_rate)) {
    throw ConfigError("learning_rate must be positive");
  }
  if (c.batch_size < 1) throw ConfigError("batch_size must be at least 1");
  if (!(c.momentum >= 0.0 && c.momentum < 1.0)) {
    throw ConfigError("momentum must be in [0, 1)");
  }
  if (!(c.split_ratio > 0.0 && c.split_ratio < 1.0)) {
    throw ConfigError("split_ratio must be in (0, 1)");
  }
  detail::activation_from_string(c.activation);
  if (c.out_transform == OutTransform::Bounded) {
    if (!std::isfinite(c.bound_low) || !std::isfinite(c.bound_high) ||
        c.bound_low >= c.bound_high) {
      throw ConfigError("bounded transform needs finite bound_low < bound_high");
    }
  }
}

double population_std(std::span<const double> v) {
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / static_cast<double>(v.size()));
}

std::vector<double> average_ranks(std::span<const double> v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;  // 1-based average rank
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

Metrics compute_metrics(std::span<const double> pred, std::span<const double> truth) {
  if (pred.size() != truth.size()) {
    throw ValidationError("metrics need equal-length inputs");
  }
  const std::size_t n = pred.size();
  if (n < 2) throw ValidationError("metrics need at least 2 points");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(pred[i]) || !std::isfinite(truth[i])) {
      throw ValidationError("metrics need finite values");
    }
  }

  double mse = 0.0;
  double truth_mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mse += (pred[i] - truth[i]) * (pred[i] - truth[i]);
    truth_mean += truth[i];
  }
  mse /= static_cast<double>(n);
  truth_mean /= static_cast<double>(n);

  double ss_tot = 0.0;
  for (double t : truth) ss_tot += (t - truth_mean) * (t - truth_mean);
  if (ss_tot == 0.0) {
    throw ValidationError("R^2 undefined: truth has zero variance");
  }
  const double ss_res = mse * static_cast<double>(n);

  const std::vector<double> rp = average_ranks(pred);
  const std::vector<double> rt = average_ranks(truth);
  const double mp = std::accumulate(rp.begin(), rp.end(), 0.0) / static_cast<double>(n);
  const double mt = std::accumulate(rt.begin(), rt.end(), 0.0) / static_cast<double>(n);
  double cov = 0.0;
  double vp = 0.0;
  double vt = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    cov += (rp[i] - mp) * (rt[i] - mt);
    vp += (rp[i] - mp) * (rp[i] - mp);
    vt += (rt[i] - mt) * (rt[i] - mt);
  }
  if (vp == 0.0 || vt == 0.0) {
    throw ValidationError("Spearman rho undefined: constant ranking");
  }

  Metrics m;
  m.rmse = std::sqrt(mse);
  m.r2 = 1.0 - ss_res / ss_tot;
  m.spearman_rho = cov / std::sqrt(vp * vt);
  return m;
}

std::string to_string(OutTransform t) {
  switch (t) {
    case OutTransform::Identity: return "identity";
    case OutTransform::Positive: return "positive";
    case OutTransform::Bounded: return "bounded";
  }
  return "identity";
}

OutTransform transform_from_string(const std::string& name) {
  if (name == "identity") return OutTransform::Identity;
  if (name == "positive") return OutTransform::Positive;
  if (name == "bounded") return OutTransform::Bounded;
  throw ConfigError("unknown output transform '" + name +
                    "' (identity, positive, bounded)");
}

struct EmulatorModel::Impl {
  std::shared_ptr<const ParamSpace> space;
  std::string target_name;
  Goal goal = Goal::Minimize;

  int hidden_depth = 3;
  int hidden_width = 48;
  std::string activation = "softplus";
  OutTransform out_transform = OutTransform::Identity;
  double bound_low = 0.0;
  double bound_high = 1.0;

  std::vector<detail::Mlp> nets;
  std::vector<double> x_mean;
  std::vector<double> x_std;
  double t_mean = 0.0;
  double t_std = 1.0;

  double residual_sigma = 0.0;
  Metrics train_metrics;
  Metrics test_metrics;
  std::uint32_t split_seed = 0;
  double split_ratio = 0.8;
  bool accepted = false;

  // Maps a transformed-space target back to the reported value.
  double invert(double t) const {
    switch (out_transform) {
      case OutTransform::Identity: return t;
      case OutTransform::Positive: return std::exp(t);
      case OutTransform::Bounded:
        return bound_low + (bound_high - bound_low) / (1.0 + std::exp(-t));
    }
    return t;
  }

  double member_value(std::size_t m, const double* xs) const {
    return invert(t_mean + t_std * nets[m].predict_one(xs));
  }
};

EmulatorModel::EmulatorModel(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

const std::shared_ptr<const ParamSpace>& EmulatorModel::space() const { return impl_->space; }
const std::string& EmulatorModel::target_name() const { return impl_->target_name; }
Goal EmulatorModel::goal() const { return impl_->goal; }
int EmulatorModel::hidden_depth() const { return impl_->hidden_depth; }
int EmulatorModel::hidden_width() const { return impl_->hidden_width; }
const std::string& EmulatorModel::activation() const { return impl_->activation; }
OutTransform EmulatorModel::out_transform() const { return impl_->out_transform; }
double EmulatorModel::bound_low() const { return impl_->bound_low; }
double EmulatorModel::bound_high() const { return impl_->bound_high; }
int EmulatorModel::members() const { return static_cast<int>(impl_->nets.size()); }
double EmulatorModel::residual_sigma() const { return impl_->residual_sigma; }
const Metrics& EmulatorModel::train_metrics() const { return impl_->train_metrics; }
const Metrics& EmulatorModel::test_metrics() const { return impl_->test_metrics; }
std::uint32_t EmulatorModel::split_seed() const { return impl_->split_seed; }
double EmulatorModel::split_ratio() const { return impl_->split_ratio; }
bool EmulatorModel::accepted() const { return impl_->accepted; }

namespace {

// Forward transform of raw targets; errors name the constraint violated.
double transform_target(double y, const ModelConfig& c) {
  switch (c.out_transform) {
    case OutTransform::Identity:
      return y;
    case OutTransform::Positive:
      if (!(y > 0.0)) {
        throw ValidationError("positive transform needs positive targets (got " +
                              detail::format_double(y) + ")");
      }
      return std::log(y);
    case OutTransform::Bounded: {
      if (y < c.bound_low || y > c.bound_high) {
        throw ValidationError("bounded transform needs targets within [" +
                              detail::format_double(c.bound_low) + ", " +
                              detail::format_double(c.bound_high) + "]");
      }
      const double span = c.bound_high - c.bound_low;
      const double p = std::clamp((y - c.bound_low) / span, 1e-6, 1.0 - 1e-6);
      return std::log(p / (1.0 - p));
    }
  }
  return y;
}

struct Fitted {
  std::vector<detail::Mlp> nets;
  std::vector<double> x_mean;
  std::vector<double> x_std;
  double t_mean = 0.0;
  double t_std = 1.0;
};

// Trains the ensemble on the given rows. Member m draws everything
// (initialization, bootstrap resample, batch shuffling) from stream
// (seed, purpose, member_base + m), so members are independent and the whole
// fit is reproducible, including when members run on different threads.
Fitted fit_ensemble(const ParamSpace& space, const std::vector<std::vector<double>>& rows,
                    const ModelConfig& cfg, std::string_view purpose,
                    std::uint64_t member_base) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto d = static_cast<Eigen::Index>(space.dim());

  Eigen::MatrixXd x(n, d);
  Eigen::VectorXd t(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = row[static_cast<std::size_t>(j)];
    t[i] = transform_target(row[static_cast<std::size_t>(d)], cfg);
  }

  Fitted out;
  out.x_mean.resize(static_cast<std::size_t>(d));
  out.x_std.resize(static_cast<std::size_t>(d));
  for (Eigen::Index j = 0; j < d; ++j) {
    const double mean = x.col(j).mean();
    const double sd = std::sqrt((x.col(j).array() - mean).square().mean());
    out.x_mean[static_cast<std::size_t>(j)] = mean;
    out.x_std[static_cast<std::size_t>(j)] = std::max(sd, 1e-12);
    x.col(j) = (x.col(j).array() - mean) / out.x_std[static_cast<std::size_t>(j)];
  }
  out.t_mean = t.mean();
  out.t_std = std::max(std::sqrt((t.array() - out.t_mean).square().mean()), 1e-12);
  t = ((t.array() - out.t_mean) / out.t_std).matrix();

  const detail::Activation act = detail::activation_from_string(cfg.activation);
  detail::TrainOptions opts;
  opts.epochs = cfg.epochs;
  opts.learning_rate = cfg.learning_rate;
  opts.momentum = cfg.momentum;
  opts.batch_size = cfg.batch_size;

  const auto train_member = [&](int m) {
    RngStream rng(derive_seed(cfg.seed, hash_tag(purpose),
                              member_base + static_cast<std::uint64_t>(m)));
    detail::Mlp net(static_cast<std::size_t>(d), cfg.hidden_depth, cfg.hidden_width, act);
    net.init(rng);

    if (!cfg.bootstrap) {
      net.fit(x, t, Eigen::MatrixXd(), Eigen::VectorXd(), opts, rng);
      return net;
    }
    std::vector<bool> sampled(static_cast<std::size_t>(n), false);
    std::vector<Eigen::Index> take(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto pick = static_cast<Eigen::Index>(rng.pick(static_cast<std::size_t>(n)));
      take[static_cast<std::size_t>(i)] = pick;
      sampled[static_cast<std::size_t>(pick)] = true;
    }
    Eigen::MatrixXd xb(n, d);
    Eigen::VectorXd tb(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      xb.row(i) = x.row(take[static_cast<std::size_t>(i)]);
      tb[i] = t[take[static_cast<std::size_t>(i)]];
    }
    std::vector<Eigen::Index> oob;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!sampled[static_cast<std::size_t>(i)]) oob.push_back(i);
    }
    Eigen::MatrixXd xv(static_cast<Eigen::Index>(oob.size()), d);
    Eigen::VectorXd tv(static_cast<Eigen::Index>(oob.size()));
    for (std::size_t i = 0; i < oob.size(); ++i) {
      xv.row(static_cast<Eigen::Index>(i)) = x.row(oob[i]);
      tv[static_cast<Eigen::Index>(i)] = t[oob[i]];
    }
    net.fit(xb, tb, xv, tv, opts, rng);
    return net;
  };

  if (cfg.members == 1) {
    out.nets.push_back(train_member(0));
    return out;
  }
  std::vector<std::future<detail::Mlp>> futures;
  futures.reserve(static_cast<std::size_t>(cfg.members));
  for (int m = 0; m < cfg.members; ++m) {
    futures.push_back(std::async(std::launch::async, train_member, m));
  }
  for (auto& f : futures) out.nets.push_back(f.get());
  return out;
}

// Ensemble-mean predictions (reported scale) for raw feature rows.
std::vector<double> ensemble_mean(const Fitted& fit, const ModelConfig& cfg,
                                  const std::vector<std::vector<double>>& rows,
                                  std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto d = static_cast<Eigen::Index>(dim);
  Eigen::MatrixXd x(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      x(i, j) = (rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] -
                 fit.x_mean[static_cast<std::size_t>(j)]) /
                fit.x_std[static_cast<std::size_t>(j)];
    }
  }
  const auto invert = [&](double t) {
    switch (cfg.out_transform) {
      case OutTransform::Identity: return t;
      case OutTransform::Positive: return std::exp(t);
      case OutTransform::Bounded:
        return cfg.bound_low + (cfg.bound_high - cfg.bound_low) / (1.0 + std::exp(-t));
    }
    return t;
  };
  std::vector<double> mean(static_cast<std::size_t>(n), 0.0);
  for (const detail::Mlp& net : fit.nets) {
    const Eigen::VectorXd z = net.predict(x);
    for (Eigen::Index i = 0; i < n; ++i) {
      mean[static_cast<std::size_t>(i)] += invert(fit.t_mean + fit.t_std * z[i]);
    }
  }
  for (double& v : mean) v /= static_cast<double>(fit.nets.size());
  return mean;
}

std::vector<double> targets_of(const std::vector<std::vector<double>>& rows) {
  std::vector<double> y;
  y.reserve(rows.size());
  for (const auto& row : rows) y.push_back(row.back());
  return y;
}

}  // namespace

EmulatorModel train(const data::DatasetTable& table, const ModelConfig& config) {
  data::validate_dataset(table);
  validate_config(config);
  auto [tr, te] = data::split(table, config.split_ratio, config.seed);

  Fitted fit = fit_ensemble(*table.space, tr.rows, config, "member", 0);

  const std::vector<double> pred_tr = ensemble_mean(fit, config, tr.rows, table.space->dim());
  const std::vector<double> pred_te = ensemble_mean(fit, config, te.rows, table.space->dim());
  const std::vector<double> y_tr = targets_of(tr.rows);
  const std::vector<double> y_te = targets_of(te.rows);

  auto impl = std::make_shared<EmulatorModel::Impl>();
  impl->space = table.space;
  impl->target_name = table.target_name;
  impl->goal = table.goal;
  impl->hidden_depth = config.hidden_depth;
  impl->hidden_width = config.hidden_width;
  impl->activation = config.activation;
  impl->out_transform = config.out_transform;
  impl->bound_low = config.bound_low;
  impl->bound_high = config.bound_high;
  impl->nets = std::move(fit.nets);
  impl->x_mean = std::move(fit.x_mean);
  impl->x_std = std::move(fit.x_std);
  impl->t_mean = fit.t_mean;
  impl->t_std = fit.t_std;
  impl->train_metrics = compute_metrics(pred_tr, y_tr);
  impl->test_metrics = compute_metrics(pred_te, y_te);
  impl->split_seed = config.seed;
  impl->split_ratio = config.split_ratio;

  std::vector<double> residuals(y_te.size());
  for (std::size_t i = 0; i < y_te.size(); ++i) residuals[i] = y_te[i] - pred_te[i];
  impl->residual_sigma = population_std(residuals);
  impl->accepted = impl->train_metrics.spearman_rho >= kAcceptThreshold &&
                   impl->test_metrics.spearman_rho >= kAcceptThreshold;
  return EmulatorModel(std::move(impl));
}

CvReport cross_validate(const data::DatasetTable& table, const ModelConfig& config, int k) {
  data::validate_dataset(table);
  validate_config(config);
  if (k < 2) throw ConfigError("cross-validation needs k >= 2");
  auto [tr, te] = data::split(table, config.split_ratio, config.seed);
  (void)te;
  const std::size_t n = tr.rows.size();
  if (static_cast<std::size_t>(k) > n) {
    throw ConfigError("k exceeds the training-set size");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  RngStream rng(derive_seed(config.seed, hash_tag("cv")));
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.pick(i)]);

  CvReport report;
  report.k = k;
  for (int f = 0; f < k; ++f) {
    const std::size_t begin = static_cast<std::size_t>(f) * n / static_cast<std::size_t>(k);
    const std::size_t end =
        (static_cast<std::size_t>(f) + 1) * n / static_cast<std::size_t>(k);
    std::vector<std::vector<double>> fit_rows;
    std::vector<std::vector<double>> val_rows;
    for (std::size_t i = 0; i < n; ++i) {
      ((i >= begin && i < end) ? val_rows : fit_rows).push_back(tr.rows[order[i]]);
    }
    FoldResult result;
    result.fold = f;
    try {
      const Fitted fit =
          fit_ensemble(*table.space, fit_rows, config, "cv-member",
                       static_cast<std::uint64_t>(f) * static_cast<std::uint64_t>(config.members));
      result.metrics = compute_metrics(
          ensemble_mean(fit, config, val_rows, table.space->dim()), targets_of(val_rows));
      result.converged = true;
    } catch (const Error& e) {
      result.converged = false;
      result.note = e.what();
    }
    report.folds.push_back(std::move(result));
  }

  std::vector<double> r2s;
  std::vector<double> rhos;
  std::vector<double> rmses;
  for (const FoldResult& f : report.folds) {
    if (!f.converged) continue;
    r2s.push_back(f.metrics.r2);
    rhos.push_back(f.metrics.spearman_rho);
    rmses.push_back(f.metrics.rmse);
  }
  if (r2s.empty()) throw EvaluationError("all cross-validation folds failed");
  const auto mean_of = [](const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  };
  report.mean = {mean_of(r2s), mean_of(rhos), mean_of(rmses)};
  report.stddev = {population_std(r2s), population_std(rhos), population_std(rmses)};
  return report;
}

double emulate(const EmulatorModel& model, const ParamVector& x, bool stochastic,
               RngStream* rng) {
  const EmulatorModel::Impl& impl = *model.impl_;
  if (!(x.space() == *impl.space)) {
    throw ContractError("point does not belong to the emulator's space");
  }
  const std::size_t d = impl.space->dim();
  std::vector<double> xs(d);
  for (std::size_t j = 0; j < d; ++j) {
    xs[j] = (x.values()[j] - impl.x_mean[j]) / impl.x_std[j];
  }
  if (stochastic) {
    if (rng == nullptr) {
      throw ContractError("stochastic emulation requires an rng stream");
    }
    const std::size_t m = rng->pick(impl.nets.size());
    return impl.member_value(m, xs.data()) + rng->normal(0.0, impl.residual_sigma);
  }
  double mean = 0.0;
  for (std::size_t m = 0; m < impl.nets.size(); ++m) {
    mean += impl.member_value(m, xs.data());
  }
  return mean / static_cast<double>(impl.nets.size());
}

void save(const EmulatorModel& model, const std::filesystem::path& path) {
  const EmulatorModel::Impl& impl = *model.impl_;
  json j;
  j["format"] = "noisybench-emulator";
  j["version"] = kFileVersion;
  j["target"] = impl.target_name;
  j["goal"] = to_string(impl.goal);
  j["params"] = json::array();
  for (std::size_t i = 0; i < impl.space->dim(); ++i) {
    const ParamDef& p = impl.space->param(i);
    j["params"].push_back({{"name", p.name}, {"low", p.low}, {"high", p.high}});
  }
  j["net"] = {{"depth", impl.hidden_depth},
              {"width", impl.hidden_width},
              {"activation", impl.activation}};
  j["transform"] = {{"kind", to_string(impl.out_transform)},
                    {"low", impl.bound_low},
                    {"high", impl.bound_high}};
  j["normalization"] = {{"x_mean", impl.x_mean},
                        {"x_std", impl.x_std},
                        {"t_mean", impl.t_mean},
                        {"t_std", impl.t_std}};
  j["residual_sigma"] = impl.residual_sigma;
  j["metrics"] = {{"train",
                   {{"r2", impl.train_metrics.r2},
                    {"spearman", impl.train_metrics.spearman_rho},
                    {"rmse", impl.train_metrics.rmse}}},
                  {"test",
                   {{"r2", impl.test_metrics.r2},
                    {"spearman", impl.test_metrics.spearman_rho},
                    {"rmse", impl.test_metrics.rmse}}}};
  j["split"] = {{"seed", impl.split_seed}, {"ratio", impl.split_ratio}};
  j["accepted"] = impl.accepted;
  j["members"] = json::array();
  for (const detail::Mlp& net : impl.nets) {
    j["members"].push_back(detail::doubles_to_base64(net.flatten()));
  }

  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

EmulatorModel load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("emulator file not found: " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const std::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }

  try {
    if (j.at("format").get<std::string>() != "noisybench-emulator") {
      throw ParseError(path.string() + ": not an emulator file");
    }
    const int version = j.at("version").get<int>();
    if (version > kFileVersion) {
      throw VersionError(path.string() + ": file version " + std::to_string(version) +
                         " is newer than supported version " +
                         std::to_string(kFileVersion));
    }
    if (version < 1) throw ParseError(path.string() + ": invalid version");

    auto impl = std::make_shared<EmulatorModel::Impl>();
    std::vector<ParamDef> defs;
    for (const auto& p : j.at("params")) {
      defs.push_back({p.at("name").get<std::string>(), p.at("low").get<double>(),
                      p.at("high").get<double>()});
    }
    impl->space = std::make_shared<const ParamSpace>(std::move(defs));
    impl->target_name = j.at("target").get<std::string>();
    impl->goal = goal_from_string(j.at("goal").get<std::string>());
    impl->hidden_depth = j.at("net").at("depth").get<int>();
    impl->hidden_width = j.at("net").at("width").get<int>();
    impl->activation = j.at("net").at("activation").get<std::string>();
    impl->out_transform = transform_from_string(j.at("transform").at("kind").get<std::string>());
    impl->bound_low = j.at("transform").at("low").get<double>();
    impl->bound_high = j.at("transform").at("high").get<double>();
    impl->x_mean = j.at("normalization").at("x_mean").get<std::vector<double>>();
    impl->x_std = j.at("normalization").at("x_std").get<std::vector<double>>();
    impl->t_mean = j.at("normalization").at("t_mean").get<double>();
    impl->t_std = j.at("normalization").at("t_std").get<double>();
    impl->residual_sigma = j.at("residual_sigma").get<double>();
    impl->train_metrics = {j.at("metrics").at("train").at("r2").get<double>(),
                           j.at("metrics").at("train").at("spearman").get<double>(),
                           j.at("metrics").at("train").at("rmse").get<double>()};
    impl->test_metrics = {j.at("metrics").at("test").at("r2").get<double>(),
                          j.at("metrics").at("test").at("spearman").get<double>(),
                          j.at("metrics").at("test").at("rmse").get<double>()};
    impl->split_seed = j.at("split").at("seed").get<std::uint32_t>();
    impl->split_ratio = j.at("split").at("ratio").get<double>();

    if (impl->x_mean.size() != impl->space->dim() ||
        impl->x_std.size() != impl->space->dim()) {
      throw ParseError(path.string() + ": normalization size mismatch");
    }

    const detail::Activation act = detail::activation_from_string(impl->activation);
    for (const auto& blob : j.at("members")) {
      detail::Mlp net(impl->space->dim(), impl->hidden_depth, impl->hidden_width, act);
      net.unflatten(detail::base64_to_doubles(blob.get<std::string>()));
      impl->nets.push_back(std::move(net));
    }
    if (impl->nets.empty()) throw ParseError(path.string() + ": no ensemble members");

    const bool recomputed = impl->train_metrics.spearman_rho >= kAcceptThreshold &&
                            impl->test_metrics.spearman_rho >= kAcceptThreshold;
    const bool stored = j.at("accepted").get<bool>();
    if (recomputed != stored) {
      throw ValidationError(path.string() +
                            ": stored accepted flag disagrees with stored metrics");
    }
    impl->accepted = recomputed;
    return EmulatorModel(std::move(impl));
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

EmulatorEvaluator::EmulatorEvaluator(EmulatorModel model, std::string id, bool stochastic)
    : model_(std::move(model)), id_(std::move(id)), stochastic_(stochastic) {
  if (id_.empty()) throw ConfigError("emulator evaluator needs a non-empty id");
}

const std::shared_ptr<const ParamSpace>& EmulatorEvaluator::space() const {
  return model_.space();
}

double EmulatorEvaluator::evaluate(const ParamVector& params, RngStream& rng) {
  return emulate(model_, params, stochastic_, &rng);
}

std::string EmulatorEvaluator::id() const { return id_; }

}  // namespace noisybench::emulator
