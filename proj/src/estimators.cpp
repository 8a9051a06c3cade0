#include "predlab/estimators.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <nlohmann/json.hpp>
#include <numeric>
#include <thread>

namespace predlab {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::vector<int> random_permutation(int n, Rng& rng) {
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(perm);
  return perm;
}

MatrixXd permute_rows(const MatrixXd& X, const std::vector<int>& perm) {
  MatrixXd out(X.rows(), X.cols());
  for (std::size_t i = 0; i < perm.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = X.row(perm[i]);
  }
  return out;
}

double sample_variance(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) /
                      static_cast<double>(v.size());
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return acc / static_cast<double>(v.size() - 1);
}

}  // namespace

double lower_median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("empty value set");
  std::sort(values.begin(), values.end());
  return values[(values.size() - 1) / 2];
}

int max_threads() {
  if (const char* env = std::getenv("PREDLAB_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

double knife_cond_entropy(const ConditionalMixtureModel& model,
                          const MatrixXd& X_val, const VectorXd& y_val) {
  if (y_val.size() < 1) throw std::invalid_argument("empty validation set");
  if (X_val.rows() != y_val.size()) {
    throw std::invalid_argument("validation size mismatch");
  }
  return model.nll(X_val, y_val);
}

double knife_marg_entropy(const MarginalMixtureModel& model,
                          const VectorXd& y_val) {
  if (y_val.size() < 1) throw std::invalid_argument("empty validation set");
  return model.nll(y_val);
}

double lmc_entropy_with_perm(const ConditionalMixtureModel& cond,
                             const MarginalMixtureModel& marg,
                             const MatrixXd& X_val, const VectorXd& y_val,
                             const std::vector<int>& perm) {
  if (X_val.rows() != y_val.size() ||
      perm.size() != static_cast<std::size_t>(y_val.size())) {
    throw std::invalid_argument("validation size mismatch");
  }
  const double h_dp = knife_marg_entropy(marg, y_val);
  const double h_cp = knife_cond_entropy(cond, X_val, y_val);
  const double cross = -cond.nll(permute_rows(X_val, perm), y_val);
  return h_dp + h_cp + cross;
}

double lmc_entropy(const ConditionalMixtureModel& cond,
                   const MarginalMixtureModel& marg, const MatrixXd& X_val,
                   const VectorXd& y_val, Rng& rng) {
  return lmc_entropy_with_perm(
      cond, marg, X_val, y_val,
      random_permutation(static_cast<int>(y_val.size()), rng));
}

double club_lower_entropy_with_perm(const ConditionalMixtureModel& cond,
                                    const MatrixXd& X_val,
                                    const VectorXd& y_val,
                                    const std::vector<int>& perm) {
  const auto n = y_val.size();
  if (n < 1) throw std::invalid_argument("empty validation set");
  if (X_val.rows() != n || perm.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("validation size mismatch");
  }
  // log q(y_i | x_j) for all pairs, O(N^2)
  Rng unused(0);
  MatrixXd log_q(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const MixtureParams params =
        cond.forward(X_val.row(j).transpose(), false, unused);
    for (Eigen::Index i = 0; i < n; ++i) {
      log_q(i, j) = mixture_log_density(params, y_val(i));
    }
  }
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double m = log_q.row(i).maxCoeff();
    const double log_mean =
        m + std::log((log_q.row(i).array() - m).exp().mean());
    acc += log_mean + log_q(i, i) - log_q(i, perm[static_cast<std::size_t>(i)]);
  }
  return -acc / static_cast<double>(n);
}

double club_lower_entropy(const ConditionalMixtureModel& cond,
                          const MatrixXd& X_val, const VectorXd& y_val,
                          Rng& rng) {
  return club_lower_entropy_with_perm(
      cond, X_val, y_val,
      random_permutation(static_cast<int>(y_val.size()), rng));
}

std::pair<double, double> gauss_doe_entropy(const MatrixXd& X,
                                            const VectorXd& y,
                                            const TrainConfig& cfg, Rng& rng) {
  TrainConfig gauss_cfg = cfg;
  gauss_cfg.kernel_count = 1;
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
  auto marg = fit_marginal_split(y_train, y_val, gauss_cfg, rng);
  auto cond = fit_conditional_split(X_train, y_train, X_val, y_val, gauss_cfg, rng);
  return {knife_cond_entropy(cond.model, X_val, y_val),
          knife_marg_entropy(marg.model, y_val)};
}

LmcOracleResult lmc_oracle(
    const std::function<double(double, const VectorXd&)>& logp_cond,
    const std::function<double(double)>& logp_marg, const MatrixXd& X,
    const VectorXd& y, Rng& rng) {
  const auto n = y.size();
  if (n < 1) throw std::invalid_argument("empty sample set");
  if (X.rows() != n) throw std::invalid_argument("sample size mismatch");
  const auto perm = random_permutation(static_cast<int>(n), rng);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double term = -logp_marg(y(i)) - logp_cond(y(i), X.row(i).transpose()) +
                        logp_cond(y(i), X.row(perm[static_cast<std::size_t>(i)]).transpose());
    sum += term;
    sum_sq += term * term;
  }
  LmcOracleResult out;
  const double dn = static_cast<double>(n);
  out.value = sum / dn;
  const double var = std::max(sum_sq / dn - out.value * out.value, 0.0);
  out.std_error = std::sqrt(var / dn);
  return out;
}

nlohmann::json EstimateReport::to_json() const {
  nlohmann::json reps = nlohmann::json::array();
  for (const auto& r : per_repetition) {
    nlohmann::json jr = {{"seed", r.seed}};
    if (r.ok()) {
      jr["h_knifecp"] = r.h_knifecp;
      jr["h_knifedp"] = r.h_knifedp;
      jr["h_lmcp"] = r.h_lmcp;
      jr["best_epoch_cond"] = r.best_epoch_cond;
      jr["best_epoch_marg"] = r.best_epoch_marg;
      jr["epochs_run_cond"] = r.epochs_run_cond;
      jr["epochs_run_marg"] = r.epochs_run_marg;
      jr["best_val_cond"] = r.best_val_cond;
      jr["best_val_marg"] = r.best_val_marg;
    } else {
      jr["error"] = r.error;
    }
    reps.push_back(jr);
  }
  return {{"h_knifecp", h_knifecp},
          {"h_knifedp", h_knifedp},
          {"h_lmcp", h_lmcp},
          {"reps", reps},
          {"variances",
           {{"h_knifecp", var_knifecp},
            {"h_knifedp", var_knifedp},
            {"h_lmcp", var_lmcp}}},
          {"config", config_echo.to_json()},
          {"normalizer", normalizer.to_json()}};
}

EstimateReport run_algorithm1(const MatrixXd& X_raw, const VectorXd& y,
                              const TrainConfig& cfg) {
  cfg.validate();
  if (y.size() < 10) throw std::invalid_argument("need at least 10 samples");
  if (X_raw.cols() < 1) throw std::invalid_argument("need at least 1 feature");
  if (X_raw.rows() != y.size()) throw std::invalid_argument("row count mismatch");

  EstimateReport report;
  report.config_echo = cfg;
  report.normalizer = zscore_fit(X_raw);
  const MatrixXd Z = zscore_apply(report.normalizer, X_raw);

  report.per_repetition.resize(static_cast<std::size_t>(cfg.repetitions));
  auto run_rep = [&](int rep) {
    RepetitionResult& out =
        report.per_repetition[static_cast<std::size_t>(rep)];
    out.seed = cfg.seed + static_cast<std::uint64_t>(rep);
    try {
      Rng rng(out.seed);
      auto [train_idx, val_idx] =
          split_indices(static_cast<int>(y.size()), cfg.val_fraction, rng);
      MatrixXd Z_train(train_idx.size(), Z.cols()),
          Z_val(val_idx.size(), Z.cols());
      VectorXd y_train(train_idx.size()), y_val(val_idx.size());
      for (std::size_t i = 0; i < train_idx.size(); ++i) {
        Z_train.row(static_cast<Eigen::Index>(i)) = Z.row(train_idx[i]);
        y_train(static_cast<Eigen::Index>(i)) = y(train_idx[i]);
      }
      for (std::size_t i = 0; i < val_idx.size(); ++i) {
        Z_val.row(static_cast<Eigen::Index>(i)) = Z.row(val_idx[i]);
        y_val(static_cast<Eigen::Index>(i)) = y(val_idx[i]);
      }
      auto marg = fit_marginal_split(y_train, y_val, cfg, rng);
      auto cond =
          fit_conditional_split(Z_train, y_train, Z_val, y_val, cfg, rng);
      out.h_knifecp = knife_cond_entropy(cond.model, Z_val, y_val);
      out.h_knifedp = knife_marg_entropy(marg.model, y_val);
      out.h_lmcp = lmc_entropy(cond.model, marg.model, Z_val, y_val, rng);
      out.best_epoch_cond = cond.trace.best_epoch;
      out.best_epoch_marg = marg.trace.best_epoch;
      out.epochs_run_cond = static_cast<int>(cond.trace.val_loss.size());
      out.epochs_run_marg = static_cast<int>(marg.trace.val_loss.size());
      out.best_val_cond = cond.trace.best_val_loss;
      out.best_val_marg = marg.trace.best_val_loss;
    } catch (const std::exception& e) {
      out.error = e.what();
    }
  };

  const int workers = std::min(max_threads(), cfg.repetitions);
  if (workers <= 1) {
    for (int rep = 0; rep < cfg.repetitions; ++rep) run_rep(rep);
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int rep = next.fetch_add(1); rep < cfg.repetitions;
             rep = next.fetch_add(1)) {
          run_rep(rep);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  std::vector<double> cps, dps, lmcs;
  std::string first_error;
  for (const auto& r : report.per_repetition) {
    if (r.ok()) {
      cps.push_back(r.h_knifecp);
      dps.push_back(r.h_knifedp);
      lmcs.push_back(r.h_lmcp);
    } else if (first_error.empty()) {
      first_error = r.error;
    }
  }
  if (cps.empty()) {
    throw std::runtime_error("all repetitions failed; first error: " +
                             first_error);
  }
  report.h_knifecp = lower_median(cps);
  report.h_knifedp = lower_median(dps);
  report.h_lmcp = lower_median(lmcs);
  report.var_knifecp = sample_variance(cps);
  report.var_knifedp = sample_variance(dps);
  report.var_lmcp = sample_variance(lmcs);
  return report;
}

}  // namespace predlab
