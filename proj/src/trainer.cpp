#include "predlab/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>
#include <numeric>

namespace predlab {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double population_std(const VectorXd& v) {
  const double mean = v.mean();
  return std::sqrt((v.array() - mean).square().sum() /
                   static_cast<double>(v.size()));
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs < 1 || patience < 1 || batch_size < 1 || kernel_count < 1 ||
      hidden_dim < 1 || layer_count < 1 || repetitions < 1) {
    throw std::invalid_argument("config counts must be >= 1");
  }
  if (learning_rate <= 0.0) {
    throw std::invalid_argument("learning_rate must be positive");
  }
  if (dropout_rate < 0.0 || dropout_rate >= 1.0) {
    throw std::invalid_argument("dropout_rate must be in [0, 1)");
  }
  if (val_fraction <= 0.0 || val_fraction >= 1.0) {
    throw std::invalid_argument("val_fraction must be in (0, 1)");
  }
}

nlohmann::json TrainConfig::to_json() const {
  return {{"epochs", epochs},
          {"patience", patience},
          {"batch_size", batch_size},
          {"learning_rate", learning_rate},
          {"kernel_count", kernel_count},
          {"hidden_dim", hidden_dim},
          {"layer_count", layer_count},
          {"dropout_rate", dropout_rate},
          {"perturb", perturb},
          {"val_fraction", val_fraction},
          {"repetitions", repetitions},
          {"seed", seed}};
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j) {
  TrainConfig cfg;
  cfg.merge_json(j);
  return cfg;
}

void TrainConfig::merge_json(const nlohmann::json& j) {
  if (j.contains("epochs")) epochs = j.at("epochs").get<int>();
  if (j.contains("patience")) patience = j.at("patience").get<int>();
  if (j.contains("batch_size")) batch_size = j.at("batch_size").get<int>();
  if (j.contains("learning_rate"))
    learning_rate = j.at("learning_rate").get<double>();
  if (j.contains("kernel_count"))
    kernel_count = j.at("kernel_count").get<int>();
  if (j.contains("hidden_dim")) hidden_dim = j.at("hidden_dim").get<int>();
  if (j.contains("layer_count")) layer_count = j.at("layer_count").get<int>();
  if (j.contains("dropout_rate"))
    dropout_rate = j.at("dropout_rate").get<double>();
  if (j.contains("perturb")) perturb = j.at("perturb").get<bool>();
  if (j.contains("val_fraction"))
    val_fraction = j.at("val_fraction").get<double>();
  if (j.contains("repetitions")) repetitions = j.at("repetitions").get<int>();
  if (j.contains("seed")) seed = j.at("seed").get<std::uint64_t>();
  validate();
}

nlohmann::json Normalizer::to_json() const {
  return {{"means", std::vector<double>(means.begin(), means.end())},
          {"stds", std::vector<double>(stds.begin(), stds.end())}};
}

Normalizer Normalizer::from_json(const nlohmann::json& j) {
  Normalizer n;
  const auto& jm = j.at("means");
  const auto& js = j.at("stds");
  n.means.resize(static_cast<Eigen::Index>(jm.size()));
  n.stds.resize(static_cast<Eigen::Index>(js.size()));
  for (std::size_t i = 0; i < jm.size(); ++i)
    n.means(static_cast<Eigen::Index>(i)) = jm.at(i);
  for (std::size_t i = 0; i < js.size(); ++i)
    n.stds(static_cast<Eigen::Index>(i)) = js.at(i);
  return n;
}

Normalizer zscore_fit(const MatrixXd& X) {
  if (X.rows() < 2) throw std::invalid_argument("need at least 2 rows");
  Normalizer norm;
  norm.means = X.colwise().mean();
  norm.stds.resize(X.cols());
  for (Eigen::Index c = 0; c < X.cols(); ++c) {
    const double var = (X.col(c).array() - norm.means(c)).square().sum() /
                       static_cast<double>(X.rows());
    norm.stds(c) = std::max(std::sqrt(var), 1e-12);
  }
  return norm;
}

MatrixXd zscore_apply(const Normalizer& norm, const MatrixXd& X) {
  if (X.cols() != norm.means.size()) {
    throw std::invalid_argument("feature dimension mismatch");
  }
  return ((X.rowwise() - norm.means.transpose()).array().rowwise() /
          norm.stds.transpose().array())
      .matrix();
}

MatrixXd zscore_invert(const Normalizer& norm, const MatrixXd& Z) {
  if (Z.cols() != norm.means.size()) {
    throw std::invalid_argument("feature dimension mismatch");
  }
  return ((Z.array().rowwise() * norm.stds.transpose().array()).matrix()
              .rowwise() +
          norm.means.transpose());
}

void perturb_batch(VectorXd& y_batch, MatrixXd& z_batch, double sigma_y,
                   int batch_size, const std::function<double()>& normal_draw) {
  if (y_batch.size() != z_batch.rows()) {
    throw std::invalid_argument("batch size mismatch");
  }
  const double bw = std::pow(static_cast<double>(batch_size), -0.2);
  for (Eigen::Index i = 0; i < y_batch.size(); ++i) {
    y_batch(i) += sigma_y * bw * normal_draw();
  }
  for (Eigen::Index i = 0; i < z_batch.rows(); ++i) {
    for (Eigen::Index j = 0; j < z_batch.cols(); ++j) {
      z_batch(i, j) += bw * normal_draw();
    }
  }
}

void adam_step(VectorXd& params, const VectorXd& grads, AdamState& state,
               double learning_rate) {
  if (params.size() != grads.size() || params.size() != state.m.size()) {
    throw std::invalid_argument("adam shape mismatch");
  }
  constexpr double beta1 = 0.9;
  constexpr double beta2 = 0.999;
  constexpr double eps = 1e-8;
  state.step += 1;
  state.m = beta1 * state.m + (1.0 - beta1) * grads;
  state.v = (beta2 * state.v.array() + (1.0 - beta2) * grads.array().square())
                .matrix();
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.step));
  params.array() -= learning_rate * (state.m.array() / bc1) /
                    ((state.v.array() / bc2).sqrt() + eps);
}

std::pair<std::vector<int>, std::vector<int>> split_indices(int n,
                                                            double val_fraction,
                                                            Rng& rng) {
  if (n < 2) throw std::invalid_argument("need at least 2 rows to split");
  if (val_fraction <= 0.0 || val_fraction >= 1.0) {
    throw std::invalid_argument("val_fraction must be in (0, 1)");
  }
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  rng.shuffle(idx);
  int n_val = static_cast<int>(std::lround(val_fraction * n));
  n_val = std::clamp(n_val, 1, n - 1);
  std::vector<int> val(idx.begin(), idx.begin() + n_val);
  std::vector<int> train(idx.begin() + n_val, idx.end());
  return {train, val};
}

namespace {

struct BatchPlan {
  std::vector<int> order;

  explicit BatchPlan(int n) : order(static_cast<std::size_t>(n)) {
    std::iota(order.begin(), order.end(), 0);
  }
};

// Shared epoch loop. `update` consumes one shuffled batch index range and
// returns the batch training loss; `validation` evaluates the current
// parameters without dropout or perturbation; `snapshot`/`restore` manage
// the best-so-far parameters.
template <typename Update, typename Validate, typename Snapshot,
          typename Restore>
TrainTrace run_epochs(int n_train, const TrainConfig& cfg, Rng& rng,
                      Update&& update, Validate&& validation,
                      Snapshot&& snapshot, Restore&& restore) {
  TrainTrace trace;
  trace.best_val_loss = std::numeric_limits<double>::infinity();
  BatchPlan plan(n_train);
  int stale = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(plan.order);
    double epoch_loss = 0.0;
    int seen = 0;
    for (int start = 0; start < n_train; start += cfg.batch_size) {
      const int len = std::min(cfg.batch_size, n_train - start);
      const double loss = update(plan.order.data() + start, len);
      if (!std::isfinite(loss)) {
        throw TrainingDiverged("non-finite training loss at epoch " +
                               std::to_string(epoch));
      }
      epoch_loss += loss * len;
      seen += len;
    }
    trace.train_loss.push_back(epoch_loss / seen);
    const double val_loss = validation();
    if (!std::isfinite(val_loss)) {
      throw TrainingDiverged("non-finite validation loss at epoch " +
                             std::to_string(epoch));
    }
    trace.val_loss.push_back(val_loss);
    if (val_loss < trace.best_val_loss) {
      trace.best_val_loss = val_loss;
      trace.best_epoch = epoch;
      stale = 0;
      snapshot();
    } else if (++stale >= cfg.patience) {
      break;
    }
  }
  restore();
  return trace;
}

}  // namespace

MarginalFit fit_marginal_split(const VectorXd& y_train, const VectorXd& y_val,
                               const TrainConfig& cfg, Rng& rng) {
  cfg.validate();
  if (y_train.size() + y_val.size() < 10) {
    throw std::invalid_argument("need at least 10 samples");
  }
  const int n_train = static_cast<int>(y_train.size());
  const double sigma_y = population_std(y_train);

  MarginalFit fit;
  fit.model = MarginalMixtureModel(cfg.kernel_count);
  fit.model.init_from_targets(y_train, rng);

  VectorXd params = fit.model.parameters();
  VectorXd best = params;
  AdamState adam(static_cast<int>(params.size()));
  VectorXd grad;
  auto normal_draw = [&rng] { return rng.normal(); };

  fit.trace = run_epochs(
      n_train, cfg, rng,
      [&](const int* idx, int len) {
        VectorXd yb(len);
        for (int i = 0; i < len; ++i) yb(i) = y_train(idx[i]);
        if (cfg.perturb) {
          MatrixXd empty(len, 0);
          perturb_batch(yb, empty, sigma_y, len, normal_draw);
        }
        fit.model.set_parameters(params);
        const double loss = fit.model.nll_gradient(yb, grad);
        adam_step(params, grad, adam, cfg.learning_rate);
        return loss;
      },
      [&] {
        fit.model.set_parameters(params);
        return fit.model.nll(y_val);
      },
      [&] { best = params; }, [&] { fit.model.set_parameters(best); });
  return fit;
}

ConditionalFit fit_conditional_split(const MatrixXd& X_train,
                                     const VectorXd& y_train,
                                     const MatrixXd& X_val,
                                     const VectorXd& y_val,
                                     const TrainConfig& cfg, Rng& rng) {
  cfg.validate();
  if (y_train.size() + y_val.size() < 10) {
    throw std::invalid_argument("need at least 10 samples");
  }
  if (X_train.rows() != y_train.size() || X_val.rows() != y_val.size()) {
    throw std::invalid_argument("row count mismatch");
  }
  const int n_train = static_cast<int>(y_train.size());
  const double sigma_y = population_std(y_train);

  ConditionalFit fit;
  fit.model = ConditionalMixtureModel(static_cast<int>(X_train.cols()),
                                      cfg.hidden_dim, cfg.layer_count,
                                      cfg.kernel_count, cfg.dropout_rate);
  fit.model.init_random(rng);
  fit.model.init_head_from_targets(y_train, rng);

  VectorXd params = fit.model.parameters();
  VectorXd best = params;
  AdamState adam(static_cast<int>(params.size()));
  VectorXd grad;
  auto normal_draw = [&rng] { return rng.normal(); };

  fit.trace = run_epochs(
      n_train, cfg, rng,
      [&](const int* idx, int len) {
        MatrixXd xb(len, X_train.cols());
        VectorXd yb(len);
        for (int i = 0; i < len; ++i) {
          xb.row(i) = X_train.row(idx[i]);
          yb(i) = y_train(idx[i]);
        }
        if (cfg.perturb) perturb_batch(yb, xb, sigma_y, len, normal_draw);
        fit.model.set_parameters(params);
        auto masks = fit.model.make_dropout_masks(len, rng);
        const double loss = fit.model.nll_gradient(
            xb, yb, masks.empty() ? nullptr : &masks, grad);
        adam_step(params, grad, adam, cfg.learning_rate);
        return loss;
      },
      [&] {
        fit.model.set_parameters(params);
        return fit.model.nll(X_val, y_val);
      },
      [&] { best = params; }, [&] { fit.model.set_parameters(best); });
  return fit;
}

MarginalFit fit_marginal(const VectorXd& y, const TrainConfig& cfg, Rng& rng) {
  if (y.size() < 10) throw std::invalid_argument("need at least 10 samples");
  auto [train_idx, val_idx] =
      split_indices(static_cast<int>(y.size()), cfg.val_fraction, rng);
  VectorXd y_train(train_idx.size()), y_val(val_idx.size());
  for (std::size_t i = 0; i < train_idx.size(); ++i)
    y_train(static_cast<Eigen::Index>(i)) = y(train_idx[i]);
  for (std::size_t i = 0; i < val_idx.size(); ++i)
    y_val(static_cast<Eigen::Index>(i)) = y(val_idx[i]);
  return fit_marginal_split(y_train, y_val, cfg, rng);
}

ConditionalFit fit_conditional(const MatrixXd& X, const VectorXd& y,
                               const TrainConfig& cfg, Rng& rng) {
  if (y.size() < 10) throw std::invalid_argument("need at least 10 samples");
  if (X.rows() != y.size()) throw std::invalid_argument("row count mismatch");
  auto [train_idx, val_idx] =
      split_indices(static_cast<int>(y.size()), cfg.val_fraction, rng);
  MatrixXd X_train(train_idx.size(), X.cols()), X_val(val_idx.size(), X.cols());
  VectorXd y_train(train_idx.size()), y_val(val_idx.size());
  for (std::size_t i = 0; i < train_idx.size(); ++i) {
    X_train.row(static_cast<Eigen::Index>(i)) = X.row(train_idx[i]);
    y_train(static_cast<Eigen::Index>(i)) = y(train_idx[i]);
  }
  for (std::size_t i = 0; i < val_idx.size(); ++i) {
    X_val.row(static_cast<Eigen::Index>(i)) = X.row(val_idx[i]);
    y_val(static_cast<Eigen::Index>(i)) = y(val_idx[i]);
  }
  return fit_conditional_split(X_train, y_train, X_val, y_val, cfg, rng);
}

}  // namespace predlab
