#pragma once

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>
#include <stdexcept>
#include <vector>

#include "predlab/rng.hpp"

namespace predlab {

inline constexpr double kLog2Pi = 1.8378770664093454835606594728112;
// Floor applied to every mixture scale, keeps log-densities finite.
inline constexpr double kScaleFloor = 1e-4;

// log(1 + e^x) without overflow, and its inverse.
double softplus(double x);
double softplus_inverse(double y);

// One Gaussian mixture over a scalar target: weights on the simplex,
// means and strictly positive scales, all of length K.
struct MixtureParams {
  Eigen::VectorXd weights;
  Eigen::VectorXd means;
  Eigen::VectorXd scales;

  int kernel_count() const { return static_cast<int>(weights.size()); }

  // Throws std::invalid_argument when any invariant is broken.
  void validate() const;
};

// log sum_k w_k N(y; mu_k, sigma_k) via log-sum-exp.
double mixture_log_density(const MixtureParams& params, double y);

struct DenseLayer {
  Eigen::MatrixXd weight;  // fan_in x fan_out
  Eigen::VectorXd bias;    // fan_out
};

// Raw per-sample mixture head outputs before the simplex / positivity maps.
// Rows are samples, columns kernels.
struct HeadOutputs {
  Eigen::MatrixXd logits;
  Eigen::MatrixXd means;
  Eigen::MatrixXd raw_scales;
};

// Directly trainable marginal mixture q(y). Weights live as logits and
// scales as softplus pre-images so every emitted MixtureParams is valid.
class MarginalMixtureModel {
 public:
  MarginalMixtureModel() = default;
  explicit MarginalMixtureModel(int kernel_count);

  // Means drawn from training targets, scale = std(y) * K^(-1/5).
  void init_from_targets(const Eigen::VectorXd& y, Rng& rng);

  int kernel_count() const { return static_cast<int>(logits_.size()); }
  MixtureParams mixture() const;

  double nll(const Eigen::VectorXd& y_batch) const;
  // Mean negative log-likelihood and its gradient in parameters() layout.
  double nll_gradient(const Eigen::VectorXd& y_batch,
                      Eigen::VectorXd& grad) const;

  Eigen::VectorXd parameters() const;
  void set_parameters(const Eigen::VectorXd& flat);
  int parameter_count() const { return 3 * kernel_count(); }

  nlohmann::json to_json() const;
  static MarginalMixtureModel from_json(const nlohmann::json& j);

 private:
  Eigen::VectorXd logits_;
  Eigen::VectorXd means_;
  Eigen::VectorXd raw_scales_;
};

// Feed-forward network emitting MixtureParams for q(y|x). Hidden layers use
// tanh; the head maps to weight logits, means and raw scales. Dropout is
// applied after every hidden activation while training.
class ConditionalMixtureModel {
 public:
  ConditionalMixtureModel() = default;
  ConditionalMixtureModel(int input_dim, int hidden_dim, int layer_count,
                          int kernel_count, double dropout_rate);

  void init_random(Rng& rng);
  // Seeds the head biases so initial kernels cover the target range.
  void init_head_from_targets(const Eigen::VectorXd& y, Rng& rng);

  int input_dim() const { return input_dim_; }
  int kernel_count() const { return kernel_count_; }
  int layer_count() const { return static_cast<int>(hidden_.size()); }
  double dropout_rate() const { return dropout_rate_; }

  // Single-sample forward. With dropout_active the masks come from rng;
  // otherwise the result is a pure function of (model, x).
  MixtureParams forward(const Eigen::VectorXd& x, bool dropout_active,
                        Rng& rng) const;

  // Inverted-dropout masks for a batch, one per hidden layer.
  std::vector<Eigen::MatrixXd> make_dropout_masks(int batch, Rng& rng) const;

  // Evaluation-mode mean negative log-likelihood (no dropout).
  double nll(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) const;
  std::vector<double> log_densities(const Eigen::MatrixXd& X,
                                    const Eigen::VectorXd& y) const;

  // Mean NLL and analytic gradient in parameters() layout. A null mask set
  // means dropout off; a fixed mask set keeps the loss differentiable.
  double nll_gradient(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                      const std::vector<Eigen::MatrixXd>* dropout_masks,
                      Eigen::VectorXd& grad) const;

  Eigen::VectorXd parameters() const;
  void set_parameters(const Eigen::VectorXd& flat);
  int parameter_count() const;

  nlohmann::json to_json() const;
  static ConditionalMixtureModel from_json(const nlohmann::json& j);

 private:
  HeadOutputs forward_batch(const Eigen::MatrixXd& X,
                            const std::vector<Eigen::MatrixXd>* dropout_masks,
                            std::vector<Eigen::MatrixXd>* activations) const;

  int input_dim_ = 0;
  int hidden_dim_ = 0;
  int kernel_count_ = 0;
  double dropout_rate_ = 0.0;
  std::vector<DenseLayer> hidden_;
  DenseLayer head_;  // hidden_dim x 3K: [logits | means | raw scales]
};

// Cross-entropy training losses: -(1/b) sum log q(.).
double nll_loss(const MixtureParams& params, const Eigen::VectorXd& y_batch);
double nll_loss(const MarginalMixtureModel& model,
                const Eigen::VectorXd& y_batch);
double nll_loss(const ConditionalMixtureModel& model, const Eigen::MatrixXd& X,
                const Eigen::VectorXd& y_batch);

}  // namespace predlab
