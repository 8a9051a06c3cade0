#include "predlab/synth.hpp"

#include <cmath>
#include <nlohmann/json.hpp>
#include <stdexcept>

namespace predlab {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kPi = 3.1415926535897932384626433832795;
constexpr double kFeatureHalfWidth = 50.0;

double draw_noise(NoiseKind kind, double param, Rng& rng) {
  switch (kind) {
    case NoiseKind::kUniform:
      // inverse CDF of U(-param/2, param/2)
      return param * (rng.uniform() - 0.5);
    case NoiseKind::kLaplacian:
      return rng.laplace(param);
    case NoiseKind::kGaussian:
      return param * rng.normal();
  }
  throw std::logic_error("unreachable");
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Adaptive Simpson with recursion on the classic error estimate.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double fa, double fm, double fb, double whole,
                        double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double lo, double hi,
                 double tol) {
  const double m = 0.5 * (lo + hi);
  const double fa = f(lo);
  const double fm = f(m);
  const double fb = f(hi);
  const double whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, lo, hi, fa, fm, fb, whole, tol, 48);
}

std::string synth_task_name(SynthTaskKind task) {
  switch (task) {
    case SynthTaskKind::kLinearity: return "linearity";
    case SynthTaskKind::kNonlinearity: return "nonlinearity";
    case SynthTaskKind::kInteraction: return "interaction";
    case SynthTaskKind::kMultivariate: return "multivariate";
  }
  throw std::logic_error("unreachable");
}

SynthTaskKind synth_task_from_name(const std::string& name) {
  if (name == "linearity") return SynthTaskKind::kLinearity;
  if (name == "nonlinearity") return SynthTaskKind::kNonlinearity;
  if (name == "interaction") return SynthTaskKind::kInteraction;
  if (name == "multivariate") return SynthTaskKind::kMultivariate;
  throw std::invalid_argument("unknown task: " + name);
}

int synth_task_dim(SynthTaskKind task) {
  switch (task) {
    case SynthTaskKind::kLinearity: return 1;
    case SynthTaskKind::kNonlinearity: return 1;
    case SynthTaskKind::kInteraction: return 2;
    case SynthTaskKind::kMultivariate: return 4;
  }
  throw std::logic_error("unreachable");
}

nlohmann::json SynthGroundTruth::to_json() const {
  return {{"task", synth_task_name(task)},
          {"noise", noise_kind_name(noise)},
          {"noise_param", noise_param},
          {"h_cond_true", h_cond_true},
          {"mse_true", mse_true},
          {"mae_true", mae_true}};
}

MatrixXd gen_features(SynthTaskKind task, int n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  const int d = synth_task_dim(task);
  MatrixXd X(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      X(i, j) = rng.uniform(-kFeatureHalfWidth, kFeatureHalfWidth);
    }
  }
  return X;
}

double task_mean(SynthTaskKind task, const VectorXd& x) {
  if (x.size() != synth_task_dim(task)) {
    throw std::invalid_argument("feature dimension mismatch");
  }
  switch (task) {
    case SynthTaskKind::kLinearity:
      return x(0);
    case SynthTaskKind::kNonlinearity:
      return 50.0 * std::sin(kPi * x(0) / 50.0);
    case SynthTaskKind::kInteraction:
      return x(0) * std::sin(kPi * x(1) / 50.0);
    case SynthTaskKind::kMultivariate:
      // x(3) is a distractor
      return x(0) * std::sin(kPi * x(1) / 50.0) + x(2);
  }
  throw std::logic_error("unreachable");
}

std::pair<LabeledDataset, SynthGroundTruth> gen_dataset(SynthTaskKind task,
                                                        NoiseKind noise_kind,
                                                        double target_mse,
                                                        int n,
                                                        std::uint64_t seed) {
  Rng rng(seed);
  const double param = noise_param_for_mse(noise_kind, target_mse);

  LabeledDataset ds;
  ds.X = gen_features(task, n, rng);
  ds.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    ds.y(i) = task_mean(task, ds.X.row(i).transpose()) +
              draw_noise(noise_kind, param, rng);
  }
  const int d = synth_task_dim(task);
  for (int j = 0; j < d; ++j) ds.feature_names.push_back("x" + std::to_string(j + 1));
  ds.target_name = "y";

  SynthGroundTruth gt;
  gt.task = task;
  gt.noise = noise_kind;
  gt.noise_param = param;
  gt.h_cond_true = noise_entropy(noise_kind, param);
  gt.mse_true = noise_variance(noise_kind, param);
  gt.mae_true = noise_mean_abs(noise_kind, param);
  return {std::move(ds), gt};
}

LinearGaussianAnalytic linear_gaussian_analytic(double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  LinearGaussianAnalytic out;
  out.sigma = sigma;
  out.h_cond = noise_entropy(NoiseKind::kGaussian, sigma);
  out.log_cond = [sigma](double y, const VectorXd& x) {
    const double z = (y - x(0)) / sigma;
    return -std::log(sigma) - 0.5 * z * z - 0.5 * std::log(2.0 * kPi);
  };
  const double w = kFeatureHalfWidth;
  out.log_marg = [sigma, w](double y) {
    const double hi = normal_cdf((y + w) / sigma);
    const double lo = normal_cdf((y - w) / sigma);
    double p = (hi - lo) / (2.0 * w);
    // deep in the tails the CDF difference underflows; fall back to the
    // dominant endpoint density
    if (p <= 0.0) p = 1e-320;
    return std::log(p);
  };
  const double span = w + 10.0 * sigma;
  out.h_marg = integrate(
      [&out](double y) {
        const double lp = out.log_marg(y);
        return -std::exp(lp) * lp;
      },
      -span, span, 1e-10);
  out.mi = out.h_marg - out.h_cond;
  return out;
}

}  // namespace predlab
