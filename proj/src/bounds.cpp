#include "predlab/bounds.hpp"

#include <cmath>
#include <nlohmann/json.hpp>
#include <stdexcept>

#include "predlab/estimators.hpp"

namespace predlab {

namespace {
constexpr double kPi = 3.1415926535897932384626433832795;
constexpr double kE = 2.7182818284590452353602874713527;
}  // namespace

std::string noise_kind_name(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::kUniform: return "uniform";
    case NoiseKind::kLaplacian: return "laplacian";
    case NoiseKind::kGaussian: return "gaussian";
  }
  throw std::logic_error("unreachable");
}

NoiseKind noise_kind_from_name(const std::string& name) {
  if (name == "uniform") return NoiseKind::kUniform;
  if (name == "laplacian") return NoiseKind::kLaplacian;
  if (name == "gaussian") return NoiseKind::kGaussian;
  throw std::invalid_argument("unknown noise kind: " + name);
}

double noise_entropy(NoiseKind kind, double param) {
  if (!(param > 0.0)) throw std::invalid_argument("noise parameter must be positive");
  switch (kind) {
    case NoiseKind::kUniform: return std::log(param);
    case NoiseKind::kLaplacian: return 1.0 + std::log(2.0 * param);
    case NoiseKind::kGaussian:
      return 0.5 * std::log(2.0 * kPi * kE * param * param);
  }
  throw std::logic_error("unreachable");
}

double noise_param_for_mse(NoiseKind kind, double target_mse) {
  if (!(target_mse > 0.0)) throw std::invalid_argument("target mse must be positive");
  switch (kind) {
    case NoiseKind::kUniform: return std::sqrt(12.0 * target_mse);
    case NoiseKind::kLaplacian: return std::sqrt(target_mse / 2.0);
    case NoiseKind::kGaussian: return std::sqrt(target_mse);
  }
  throw std::logic_error("unreachable");
}

double noise_variance(NoiseKind kind, double param) {
  if (!(param > 0.0)) throw std::invalid_argument("noise parameter must be positive");
  switch (kind) {
    case NoiseKind::kUniform: return param * param / 12.0;
    case NoiseKind::kLaplacian: return 2.0 * param * param;
    case NoiseKind::kGaussian: return param * param;
  }
  throw std::logic_error("unreachable");
}

double noise_mean_abs(NoiseKind kind, double param) {
  if (!(param > 0.0)) throw std::invalid_argument("noise parameter must be positive");
  switch (kind) {
    case NoiseKind::kUniform: return param / 4.0;
    case NoiseKind::kLaplacian: return param;
    case NoiseKind::kGaussian: return param * std::sqrt(2.0 / kPi);
  }
  throw std::logic_error("unreachable");
}

double mse_lower_bound(double h, NoiseKind kind) {
  const double e2h = std::exp(2.0 * h);
  switch (kind) {
    case NoiseKind::kUniform: return e2h / 12.0;
    case NoiseKind::kLaplacian: return e2h / (2.0 * kE * kE);
    case NoiseKind::kGaussian: return e2h / (2.0 * kPi * kE);
  }
  throw std::logic_error("unreachable");
}

double mae_lower_bound(double h, NoiseKind kind) {
  const double eh = std::exp(h);
  switch (kind) {
    case NoiseKind::kUniform: return eh / 4.0;
    case NoiseKind::kLaplacian: return eh / (2.0 * kE);
    case NoiseKind::kGaussian: return eh / (kPi * std::sqrt(kE));
  }
  throw std::logic_error("unreachable");
}

std::string r2_mode_name(R2Mode mode) {
  return mode == R2Mode::kPaper ? "paper" : "gaussian";
}

R2Mode r2_mode_from_name(const std::string& name) {
  if (name == "paper") return R2Mode::kPaper;
  if (name == "gaussian") return R2Mode::kGaussian;
  throw std::invalid_argument("unknown r2 mode: " + name);
}

double r2_indicator(double h, double var_y, R2Mode mode) {
  if (!(var_y > 0.0)) throw std::invalid_argument("var_y must be positive");
  const double coef = mode == R2Mode::kPaper ? 1.0 / 12.0 : 1.0 / (2.0 * kPi * kE);
  return 1.0 - coef * std::exp(2.0 * h) / var_y;
}

nlohmann::json IndicatorReport::to_json() const {
  return {{"r2_knifecp", r2_knifecp},
          {"r2_knifedp", r2_knifedp},
          {"r2_lmcp", r2_lmcp},
          {"mse_bound_gaussian", mse_bound_gaussian},
          {"mae_bound_laplacian", mae_bound_laplacian},
          {"ordering_ok", ordering_ok},
          {"r2_mode", r2_mode_name(mode)}};
}

IndicatorReport indicator_report(const EstimateReport& report, double var_y,
                                 R2Mode mode) {
  if (!(var_y > 0.0)) throw std::invalid_argument("var_y must be positive");
  IndicatorReport out;
  out.mode = mode;
  out.r2_knifecp = r2_indicator(report.h_knifecp, var_y, mode);
  out.r2_knifedp = r2_indicator(report.h_knifedp, var_y, mode);
  out.r2_lmcp = r2_indicator(report.h_lmcp, var_y, mode);
  out.mse_bound_gaussian = mse_lower_bound(report.h_knifecp, NoiseKind::kGaussian);
  out.mae_bound_laplacian = mae_lower_bound(report.h_knifecp, NoiseKind::kLaplacian);
  out.ordering_ok =
      out.r2_knifedp <= out.r2_knifecp && out.r2_knifecp <= out.r2_lmcp;
  return out;
}

}  // namespace predlab
