#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>

namespace predlab {

struct EstimateReport;  // estimators.hpp

enum class NoiseKind { kUniform, kLaplacian, kGaussian };

std::string noise_kind_name(NoiseKind kind);
NoiseKind noise_kind_from_name(const std::string& name);

// Differential entropy of the noise family at the given parameter
// (uniform: full width, laplacian: scale, gaussian: standard deviation).
double noise_entropy(NoiseKind kind, double param);

// Parameter whose distribution has the requested variance.
double noise_param_for_mse(NoiseKind kind, double target_mse);

double noise_variance(NoiseKind kind, double param);
double noise_mean_abs(NoiseKind kind, double param);

// Achievable-error floors implied by a conditional entropy value.
double mse_lower_bound(double h, NoiseKind kind);
double mae_lower_bound(double h, NoiseKind kind);

// Denominator coefficient for the R^2 indicator: 1/12 as published, or the
// tight Gaussian coefficient 1/(2*pi*e).
enum class R2Mode { kPaper, kGaussian };

std::string r2_mode_name(R2Mode mode);
R2Mode r2_mode_from_name(const std::string& name);

double r2_indicator(double h, double var_y, R2Mode mode);

struct IndicatorReport {
  double r2_knifecp = 0.0;
  double r2_knifedp = 0.0;
  double r2_lmcp = 0.0;
  double mse_bound_gaussian = 0.0;  // from h_knifecp
  double mae_bound_laplacian = 0.0;
  bool ordering_ok = false;
  R2Mode mode = R2Mode::kPaper;

  nlohmann::json to_json() const;
};

IndicatorReport indicator_report(const EstimateReport& report, double var_y,
                                 R2Mode mode);

}  // namespace predlab
