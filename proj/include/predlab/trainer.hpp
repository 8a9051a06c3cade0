#pragma once

#include <Eigen/Dense>
#include <functional>
#include <nlohmann/json_fwd.hpp>
#include <stdexcept>
#include <string>
#include <vector>

#include "predlab/mixmodel.hpp"
#include "predlab/rng.hpp"

namespace predlab {

struct TrainConfig {
  int epochs = 1500;
  int patience = 300;
  int batch_size = 128;
  double learning_rate = 1e-3;
  int kernel_count = 600;
  int hidden_dim = 32;
  int layer_count = 4;
  double dropout_rate = 0.1;
  bool perturb = true;
  double val_fraction = 0.2;
  int repetitions = 10;
  std::uint64_t seed = 0;

  void validate() const;
  nlohmann::json to_json() const;
  static TrainConfig from_json(const nlohmann::json& j);
  // Overlays only the keys present in j onto *this.
  void merge_json(const nlohmann::json& j);
};

// Per-feature z-score transform with a floored standard deviation, so a
// constant column maps to zeros instead of failing.
struct Normalizer {
  Eigen::VectorXd means;
  Eigen::VectorXd stds;  // floored at 1e-12

  nlohmann::json to_json() const;
  static Normalizer from_json(const nlohmann::json& j);
};

Normalizer zscore_fit(const Eigen::MatrixXd& X);
Eigen::MatrixXd zscore_apply(const Normalizer& norm, const Eigen::MatrixXd& X);
Eigen::MatrixXd zscore_invert(const Normalizer& norm, const Eigen::MatrixXd& Z);

struct TrainTrace {
  std::vector<double> train_loss;
  std::vector<double> val_loss;
  int best_epoch = -1;
  double best_val_loss = 0.0;
};

// Additive smoothing noise: y + sigma_y * b^(-1/5) * xi, z + b^(-1/5) * xi,
// xi standard normal.
void perturb_batch(Eigen::VectorXd& y_batch, Eigen::MatrixXd& z_batch,
                   double sigma_y, int batch_size,
                   const std::function<double()>& normal_draw);

struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  long step = 0;

  explicit AdamState(int n)
      : m(Eigen::VectorXd::Zero(n)), v(Eigen::VectorXd::Zero(n)) {}
};

void adam_step(Eigen::VectorXd& params, const Eigen::VectorXd& grads,
               AdamState& state, double learning_rate);

// Raised when a repetition hits a non-finite loss; the caller decides
// whether to continue with other repetitions.
struct TrainingDiverged : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MarginalFit {
  MarginalMixtureModel model;
  TrainTrace trace;
};
struct ConditionalFit {
  ConditionalMixtureModel model;
  TrainTrace trace;
};

// Internal-split variants: draw the validation fraction themselves.
MarginalFit fit_marginal(const Eigen::VectorXd& y, const TrainConfig& cfg,
                         Rng& rng);
ConditionalFit fit_conditional(const Eigen::MatrixXd& X,
                               const Eigen::VectorXd& y,
                               const TrainConfig& cfg, Rng& rng);

// Explicit-split variants used when several fits must share one split.
MarginalFit fit_marginal_split(const Eigen::VectorXd& y_train,
                               const Eigen::VectorXd& y_val,
                               const TrainConfig& cfg, Rng& rng);
ConditionalFit fit_conditional_split(const Eigen::MatrixXd& X_train,
                                     const Eigen::VectorXd& y_train,
                                     const Eigen::MatrixXd& X_val,
                                     const Eigen::VectorXd& y_val,
                                     const TrainConfig& cfg, Rng& rng);

// Uniformly random disjoint split; val gets round(frac * N), at least 1,
// at most N - 1.
std::pair<std::vector<int>, std::vector<int>> split_indices(int n,
                                                            double val_fraction,
                                                            Rng& rng);

}  // namespace predlab
