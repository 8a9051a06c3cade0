#pragma once

#include <Eigen/Dense>
#include <functional>
#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <string>
#include <vector>

#include "predlab/mixmodel.hpp"
#include "predlab/rng.hpp"
#include "predlab/trainer.hpp"

namespace predlab {

// One repetition's results; failed repetitions carry an error string.
struct RepetitionResult {
  std::uint64_t seed = 0;
  double h_knifecp = 0.0;
  double h_knifedp = 0.0;
  double h_lmcp = 0.0;
  int best_epoch_cond = -1;
  int best_epoch_marg = -1;
  int epochs_run_cond = 0;
  int epochs_run_marg = 0;
  double best_val_cond = 0.0;
  double best_val_marg = 0.0;
  std::string error;  // empty on success

  bool ok() const { return error.empty(); }
};

struct EstimateReport {
  double h_knifecp = 0.0;  // over-estimate of H(Y|X), median across reps
  double h_knifedp = 0.0;  // over-estimate of H(Y), median across reps
  double h_lmcp = 0.0;     // under-estimate of H(Y|X), median across reps
  double var_knifecp = 0.0;
  double var_knifedp = 0.0;
  double var_lmcp = 0.0;
  std::vector<RepetitionResult> per_repetition;
  TrainConfig config_echo;
  Normalizer normalizer;

  nlohmann::json to_json() const;
};

// -(1/N) sum log q(y_i | x_i), dropout inactive.
double knife_cond_entropy(const ConditionalMixtureModel& model,
                          const Eigen::MatrixXd& X_val,
                          const Eigen::VectorXd& y_val);

// -(1/N) sum log q(y_i).
double knife_marg_entropy(const MarginalMixtureModel& model,
                          const Eigen::VectorXd& y_val);

// h_knifedp + h_knifecp + (1/N) sum log q(y_i | x_perm(i)) with a uniform
// random permutation (self-matches allowed).
double lmc_entropy(const ConditionalMixtureModel& cond,
                   const MarginalMixtureModel& marg,
                   const Eigen::MatrixXd& X_val, const Eigen::VectorXd& y_val,
                   Rng& rng);
double lmc_entropy_with_perm(const ConditionalMixtureModel& cond,
                             const MarginalMixtureModel& marg,
                             const Eigen::MatrixXd& X_val,
                             const Eigen::VectorXd& y_val,
                             const std::vector<int>& perm);

// CLUB-induced lower bound, O(N^2); averaged so the unit stays nats.
double club_lower_entropy(const ConditionalMixtureModel& cond,
                          const Eigen::MatrixXd& X_val,
                          const Eigen::VectorXd& y_val, Rng& rng);
double club_lower_entropy_with_perm(const ConditionalMixtureModel& cond,
                                    const Eigen::MatrixXd& X_val,
                                    const Eigen::VectorXd& y_val,
                                    const std::vector<int>& perm);

// Difference-of-entropies baseline: the same pipeline with a single
// Gaussian kernel on both heads. Returns (h_cond, h_marg) on the
// validation split.
std::pair<double, double> gauss_doe_entropy(const Eigen::MatrixXd& X,
                                            const Eigen::VectorXd& y,
                                            const TrainConfig& cfg, Rng& rng);

// The LMC estimator evaluated with the true data densities substituted for
// the learned ones; expectation is H(Y|X) - I(X;Y).
struct LmcOracleResult {
  double value = 0.0;
  double std_error = 0.0;
};
LmcOracleResult lmc_oracle(
    const std::function<double(double, const Eigen::VectorXd&)>& logp_cond,
    const std::function<double(double)>& logp_marg, const Eigen::MatrixXd& X,
    const Eigen::VectorXd& y, Rng& rng);

// Normalize features, then per repetition: shared train/val split, fit both
// mixtures, evaluate the three entropies on the validation split. Headline
// values are lower medians across successful repetitions.
EstimateReport run_algorithm1(const Eigen::MatrixXd& X_raw,
                              const Eigen::VectorXd& y,
                              const TrainConfig& cfg);

// Lower median: sorted[(n-1)/2].
double lower_median(std::vector<double> values);

// Parallelism cap: PREDLAB_THREADS env var, else hardware concurrency.
int max_threads();

}  // namespace predlab
