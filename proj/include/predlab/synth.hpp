#pragma once

#include <Eigen/Dense>
#include <functional>
#include <nlohmann/json_fwd.hpp>
#include <string>

#include "predlab/bounds.hpp"
#include "predlab/data.hpp"
#include "predlab/rng.hpp"

namespace predlab {

// Task families with feature counts {1, 1, 2, 4}. The multivariate task
// carries one distractor feature.
enum class SynthTaskKind { kLinearity, kNonlinearity, kInteraction, kMultivariate };

std::string synth_task_name(SynthTaskKind task);
SynthTaskKind synth_task_from_name(const std::string& name);
int synth_task_dim(SynthTaskKind task);

struct SynthGroundTruth {
  SynthTaskKind task = SynthTaskKind::kLinearity;
  NoiseKind noise = NoiseKind::kGaussian;
  double noise_param = 0.0;
  double h_cond_true = 0.0;  // nats
  double mse_true = 0.0;
  double mae_true = 0.0;

  nlohmann::json to_json() const;
};

// Features are i.i.d. uniform on [-50, 50] (width 100, zero mean).
Eigen::MatrixXd gen_features(SynthTaskKind task, int n, Rng& rng);

double task_mean(SynthTaskKind task, const Eigen::VectorXd& x);

std::pair<LabeledDataset, SynthGroundTruth> gen_dataset(SynthTaskKind task,
                                                        NoiseKind noise_kind,
                                                        double target_mse,
                                                        int n,
                                                        std::uint64_t seed);

// x ~ U(-50,50), y = x + eps, eps ~ N(0, sigma). Closed-form conditional
// density, uniform-normal convolution marginal, entropies by quadrature.
struct LinearGaussianAnalytic {
  double sigma = 0.0;
  double h_cond = 0.0;
  double h_marg = 0.0;
  double mi = 0.0;
  std::function<double(double, const Eigen::VectorXd&)> log_cond;
  std::function<double(double)> log_marg;
};

LinearGaussianAnalytic linear_gaussian_analytic(double sigma);

// Adaptive Simpson quadrature, used by the analytic oracles.
double integrate(const std::function<double(double)>& f, double lo, double hi,
                 double tol);

}  // namespace predlab
