#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "noisybench/campaign.hpp"
#include "noisybench/dataset.hpp"
#include "noisybench/evaluator.hpp"
#include "noisybench/param_space.hpp"
#include "noisybench/rng.hpp"

namespace noisybench::emulator {

struct Metrics {
  double r2 = 0.0;
  double spearman_rho = 0.0;
  double rmse = 0.0;
};

// Standard definitions; Spearman uses average ranks for ties. Requires at
// least two finite pairs; zero-variance truth (R^2) or constant predictions
// (rho) raise ValidationError rather than returning a placeholder.
Metrics compute_metrics(std::span<const double> pred, std::span<const double> truth);

// Output-side constraint on predictions: unconstrained, strictly positive,
// or confined to [low, high].
enum class OutTransform { Identity, Positive, Bounded };
std::string to_string(OutTransform t);
OutTransform transform_from_string(const std::string& name);

struct ModelConfig {
  int hidden_depth = 3;
  int hidden_width = 48;
  std::string activation = "softplus";  // softplus, tanh, relu
  int members = 5;
  OutTransform out_transform = OutTransform::Identity;
  double bound_low = 0.0;   // Bounded only
  double bound_high = 1.0;  // Bounded only
  int epochs = 2000;
  double learning_rate = 1e-3;
  int batch_size = 32;
  double momentum = 0.9;
  bool bootstrap = true;    // resample each member's training set
  double split_ratio = 0.8;
  std::uint32_t seed = 0;   // drives split, member init, and shuffling
};

// A trained ensemble surrogate. Immutable and cheap to copy; deterministic
// evaluation is safe from multiple threads.
class EmulatorModel {
 public:
  const std::shared_ptr<const ParamSpace>& space() const;
  const std::string& target_name() const;
  Goal goal() const;

  int hidden_depth() const;
  int hidden_width() const;
  const std::string& activation() const;
  OutTransform out_transform() const;
  double bound_low() const;
  double bound_high() const;
  int members() const;

  double residual_sigma() const;
  const Metrics& train_metrics() const;
  const Metrics& test_metrics() const;
  std::uint32_t split_seed() const;
  double split_ratio() const;

  // Usability gate: train and test Spearman rho both at least 0.90.
  bool accepted() const;

  struct Impl;
  explicit EmulatorModel(std::shared_ptr<const Impl> impl);

 private:
  std::shared_ptr<const Impl> impl_;

  friend double emulate(const EmulatorModel&, const ParamVector&, bool, RngStream*);
  friend void save(const EmulatorModel&, const std::filesystem::path&);
};

// Trains `members` networks on an internal train/test split of the table
// (independent initializations, bootstrap resamples when enabled), then
// scores the ensemble mean on both splits. residual_sigma is the standard
// deviation of the ensemble mean's residuals on the held-out split.
// EvaluationError if training diverges.
EmulatorModel train(const data::DatasetTable& table, const ModelConfig& config);

struct FoldResult {
  int fold = 0;
  bool converged = false;
  Metrics metrics;
  std::string note;  // failure reason when not converged
};

struct CvReport {
  int k = 0;
  std::vector<FoldResult> folds;
  Metrics mean;    // over converged folds
  Metrics stddev;  // population std over converged folds
};

// k-fold cross-validation confined to the training portion of the split.
// Failed folds are flagged and excluded from the aggregates.
CvReport cross_validate(const data::DatasetTable& table, const ModelConfig& config,
                        int k = 5);

// Deterministic mode returns the ensemble mean, a pure function of (model, x).
// Stochastic mode draws a uniformly random member and adds Gaussian
// observation noise of width residual_sigma; it requires an rng.
// x must belong to the model's space.
double emulate(const EmulatorModel& model, const ParamVector& x, bool stochastic,
               RngStream* rng = nullptr);

// Versioned single-file persistence; loading recomputes the accepted flag
// from the stored metrics and rejects files where the two disagree.
void save(const EmulatorModel& model, const std::filesystem::path& path);
EmulatorModel load(const std::filesystem::path& path);

// Adapter so a trained model can stand wherever a surface can: campaigns,
// benchmarks, baselines.
class EmulatorEvaluator final : public Evaluator {
 public:
  EmulatorEvaluator(EmulatorModel model, std::string id, bool stochastic = true);

  const std::shared_ptr<const ParamSpace>& space() const override;
  double evaluate(const ParamVector& params, RngStream& rng) override;
  std::string id() const override;
  const EmulatorModel& model() const { return model_; }

 private:
  EmulatorModel model_;
  std::string id_;
  bool stochastic_;
};

}  // namespace noisybench::emulator
