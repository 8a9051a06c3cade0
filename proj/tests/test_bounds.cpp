#include <cmath>
#include <nlohmann/json.hpp>

#include "doctest.h"
#include "predlab/bounds.hpp"
#include "predlab/estimators.hpp"
#include "predlab/rng.hpp"

using namespace predlab;

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;

double noise_log_pdf(NoiseKind kind, double param, double x) {
  switch (kind) {
    case NoiseKind::kUniform:
      return -std::log(param);  // inside the support by construction
    case NoiseKind::kLaplacian:
      return -std::log(2.0 * param) - std::abs(x) / param;
    case NoiseKind::kGaussian:
      return -0.5 * std::log(2.0 * kPi) - std::log(param) -
             0.5 * (x / param) * (x / param);
  }
  return 0.0;
}

double draw(NoiseKind kind, double param, Rng& rng) {
  switch (kind) {
    case NoiseKind::kUniform: return param * (rng.uniform() - 0.5);
    case NoiseKind::kLaplacian: return rng.laplace(param);
    case NoiseKind::kGaussian: return param * rng.normal();
  }
  return 0.0;
}

}  // namespace

TEST_CASE("noise_entropy closed forms") {
  CHECK(noise_entropy(NoiseKind::kGaussian, 1.0) ==
        doctest::Approx(1.418939).epsilon(1e-6));
  CHECK(noise_entropy(NoiseKind::kUniform, 1.0) == 0.0);
  CHECK(noise_entropy(NoiseKind::kLaplacian, 15.8114) ==
        doctest::Approx(4.45388).epsilon(1e-5));
  CHECK_THROWS_AS(noise_entropy(NoiseKind::kGaussian, 0.0),
                  std::invalid_argument);
}

TEST_CASE("noise_entropy matches Monte-Carlo -E[log p] within 3 SE") {
  const int n = 1000000;
  for (const NoiseKind kind :
       {NoiseKind::kUniform, NoiseKind::kLaplacian, NoiseKind::kGaussian}) {
    const double param = noise_param_for_mse(kind, 500.0);
    Rng rng(321);
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double lp = noise_log_pdf(kind, param, draw(kind, param, rng));
      sum += -lp;
      sum_sq += lp * lp;
    }
    const double mean = sum / n;
    const double var = std::max(sum_sq / n - mean * mean, 0.0);
    const double se = std::sqrt(var / n);
    CHECK(std::abs(mean - noise_entropy(kind, param)) <= 3.0 * se + 1e-9);
  }
}

TEST_CASE("noise_param_for_mse examples and variance round-trip") {
  CHECK(noise_param_for_mse(NoiseKind::kGaussian, 500.0) ==
        doctest::Approx(22.36068).epsilon(1e-6));
  CHECK(noise_param_for_mse(NoiseKind::kUniform, 500.0) ==
        doctest::Approx(77.45967).epsilon(1e-6));
  CHECK(noise_param_for_mse(NoiseKind::kLaplacian, 2.0) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(noise_param_for_mse(NoiseKind::kUniform, -1.0),
                  std::invalid_argument);

  for (const NoiseKind kind :
       {NoiseKind::kUniform, NoiseKind::kLaplacian, NoiseKind::kGaussian}) {
    for (const double m : {1.0, 10.0, 250.0, 500.0, 1000.0}) {
      const double param = noise_param_for_mse(kind, m);
      CHECK(noise_variance(kind, param) == doctest::Approx(m).epsilon(1e-9));
      // entropy-at-matched-variance inverts the mse bound exactly
      CHECK(mse_lower_bound(noise_entropy(kind, param), kind) ==
            doctest::Approx(m).epsilon(1e-9));
    }
  }
}

TEST_CASE("mse_lower_bound examples") {
  const double h500 = 0.5 * std::log(2.0 * kPi * std::exp(1.0) * 500.0);
  CHECK(h500 == doctest::Approx(4.52624).epsilon(1e-5));
  CHECK(mse_lower_bound(h500, NoiseKind::kGaussian) ==
        doctest::Approx(500.0).epsilon(1e-9));
  CHECK(mse_lower_bound(0.0, NoiseKind::kUniform) ==
        doctest::Approx(1.0 / 12.0).epsilon(1e-12));
  CHECK(mse_lower_bound(std::log(2.0 * std::exp(1.0)), NoiseKind::kLaplacian) ==
        doctest::Approx(2.0).epsilon(1e-12));
  // gaussian family gives the smallest bound for equal h
  CHECK(mse_lower_bound(1.0, NoiseKind::kGaussian) <
        mse_lower_bound(1.0, NoiseKind::kUniform));
}

TEST_CASE("mae_lower_bound reproduces mean absolute deviations") {
  const double sigma = 22.36068;
  const double h = noise_entropy(NoiseKind::kGaussian, sigma);
  CHECK(mae_lower_bound(h, NoiseKind::kGaussian) ==
        doctest::Approx(17.841).epsilon(1e-4));
  CHECK(mae_lower_bound(h, NoiseKind::kGaussian) ==
        doctest::Approx(noise_mean_abs(NoiseKind::kGaussian, sigma))
            .epsilon(1e-12));
  CHECK(mae_lower_bound(0.0, NoiseKind::kUniform) == 0.25);
  CHECK(mae_lower_bound(1.0 + std::log(2.0), NoiseKind::kLaplacian) ==
        doctest::Approx(1.0).epsilon(1e-12));
  // mae bound inverts the matched-family mean absolute deviation everywhere
  for (const NoiseKind kind :
       {NoiseKind::kUniform, NoiseKind::kLaplacian, NoiseKind::kGaussian}) {
    const double param = noise_param_for_mse(kind, 250.0);
    CHECK(mae_lower_bound(noise_entropy(kind, param), kind) ==
          doctest::Approx(noise_mean_abs(kind, param)).epsilon(1e-9));
  }
}

TEST_CASE("r2_indicator examples and monotonicity") {
  const double h500 = 0.5 * std::log(2.0 * kPi * std::exp(1.0) * 500.0);
  CHECK(r2_indicator(0.5 * std::log(12.0 * 7.0), 7.0, R2Mode::kPaper) ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r2_indicator(h500, 1000.0, R2Mode::kPaper) ==
        doctest::Approx(1.0 - 2.0 * kPi * std::exp(1.0) * 500.0 / 12000.0)
            .epsilon(1e-12));
  CHECK(r2_indicator(h500, 1000.0, R2Mode::kPaper) ==
        doctest::Approx(0.28831).epsilon(1e-4));
  CHECK(r2_indicator(h500, 1000.0, R2Mode::kGaussian) ==
        doctest::Approx(0.5).epsilon(1e-9));
  CHECK_THROWS_AS(r2_indicator(1.0, 0.0, R2Mode::kPaper),
                  std::invalid_argument);

  // strictly decreasing in h, increasing in var_y
  CHECK(r2_indicator(1.0, 10.0, R2Mode::kPaper) >
        r2_indicator(1.1, 10.0, R2Mode::kPaper));
  CHECK(r2_indicator(1.0, 11.0, R2Mode::kPaper) >
        r2_indicator(1.0, 10.0, R2Mode::kPaper));
}

TEST_CASE("name round-trips") {
  for (const NoiseKind kind :
       {NoiseKind::kUniform, NoiseKind::kLaplacian, NoiseKind::kGaussian}) {
    CHECK(noise_kind_from_name(noise_kind_name(kind)) == kind);
  }
  CHECK_THROWS_AS(noise_kind_from_name("cauchy"), std::invalid_argument);
  CHECK(r2_mode_from_name("paper") == R2Mode::kPaper);
  CHECK(r2_mode_from_name("gaussian") == R2Mode::kGaussian);
  CHECK_THROWS_AS(r2_mode_from_name("x"), std::invalid_argument);
}

TEST_CASE("indicator_report ordering logic") {
  EstimateReport rep;
  rep.h_knifecp = 2.0;
  rep.h_knifedp = 2.0;
  rep.h_lmcp = 2.0;
  IndicatorReport eq = indicator_report(rep, 100.0, R2Mode::kPaper);
  CHECK(eq.r2_knifecp == eq.r2_knifedp);
  CHECK(eq.r2_knifecp == eq.r2_lmcp);
  CHECK(eq.ordering_ok);

  rep.h_lmcp = 1.5;
  rep.h_knifecp = 2.0;
  rep.h_knifedp = 2.5;
  IndicatorReport ord = indicator_report(rep, 100.0, R2Mode::kPaper);
  CHECK(ord.r2_knifedp < ord.r2_knifecp);
  CHECK(ord.r2_knifecp < ord.r2_lmcp);
  CHECK(ord.ordering_ok);
  CHECK(ord.mse_bound_gaussian ==
        doctest::Approx(mse_lower_bound(2.0, NoiseKind::kGaussian)));
  CHECK(ord.mae_bound_laplacian ==
        doctest::Approx(mae_lower_bound(2.0, NoiseKind::kLaplacian)));

  rep.h_lmcp = 3.0;  // inverted pair breaks the ordering
  CHECK_FALSE(indicator_report(rep, 100.0, R2Mode::kPaper).ordering_ok);

  const nlohmann::json j = ord.to_json();
  CHECK(j.contains("r2_knifecp"));
  CHECK(j.at("r2_mode") == "paper");
}
