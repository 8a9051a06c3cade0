#include <cmath>
#include <nlohmann/json.hpp>

#include "doctest.h"
#include "predlab/mixmodel.hpp"
#include "predlab/synth.hpp"
#include "test_util.hpp"

using namespace predlab;
using testutil::brute_force_log_density;
using testutil::finite_difference_gradient;
using testutil::max_relative_error;

namespace {

constexpr double kLogStdNormalAt0 = -0.91893853320467274178;  // -0.5 ln 2pi

MixtureParams make_params(std::initializer_list<double> w,
                          std::initializer_list<double> mu,
                          std::initializer_list<double> sig) {
  MixtureParams p;
  p.weights = Eigen::Map<const Eigen::VectorXd>(w.begin(),
                                                static_cast<Eigen::Index>(w.size()));
  p.means = Eigen::Map<const Eigen::VectorXd>(mu.begin(),
                                              static_cast<Eigen::Index>(mu.size()));
  p.scales = Eigen::Map<const Eigen::VectorXd>(sig.begin(),
                                               static_cast<Eigen::Index>(sig.size()));
  return p;
}

MixtureParams random_params(int k, Rng& rng) {
  MixtureParams p;
  Eigen::VectorXd raw(k);
  for (int i = 0; i < k; ++i) raw(i) = rng.uniform(0.1, 1.0);
  p.weights = raw / raw.sum();
  p.means.resize(k);
  p.scales.resize(k);
  for (int i = 0; i < k; ++i) {
    p.means(i) = rng.uniform(-5.0, 5.0);
    p.scales(i) = rng.uniform(0.2, 3.0);
  }
  return p;
}

// Conditional model whose head output is a fixed bias: ignores x entirely.
ConditionalMixtureModel const_head_model(int d, int k,
                                         const Eigen::VectorXd& logits,
                                         const Eigen::VectorXd& means,
                                         const Eigen::VectorXd& scales) {
  ConditionalMixtureModel m(d, 4, 1, k, 0.0);
  Eigen::VectorXd flat = Eigen::VectorXd::Zero(m.parameter_count());
  const int n = m.parameter_count();
  for (int i = 0; i < k; ++i) {
    flat(n - 3 * k + i) = logits(i);
    flat(n - 2 * k + i) = means(i);
    flat(n - k + i) = softplus_inverse(scales(i) - kScaleFloor);
  }
  m.set_parameters(flat);
  return m;
}

}  // namespace

TEST_CASE("mixture_log_density matches closed forms") {
  const auto p1 = make_params({1.0}, {0.0}, {1.0});
  CHECK(mixture_log_density(p1, 0.0) == doctest::Approx(kLogStdNormalAt0).epsilon(1e-12));

  const auto p2 = make_params({0.5, 0.5}, {-1.0, 1.0}, {1.0, 1.0});
  const double phi1 = std::exp(-0.5) / std::sqrt(2.0 * 3.14159265358979323846);
  CHECK(mixture_log_density(p2, 0.0) ==
        doctest::Approx(std::log(phi1)).epsilon(1e-12));
  CHECK(mixture_log_density(p2, 0.0) == doctest::Approx(-1.418939).epsilon(1e-6));

  // A kernel 50 sigma away contributes < e^-1000: the result is the near
  // kernel alone, and log-sum-exp must not underflow it away.
  const auto p3 = make_params({0.3, 0.7}, {0.0, 50.0}, {1.0, 1.0});
  const double expected = std::log(0.3) + kLogStdNormalAt0;
  CHECK(mixture_log_density(p3, 0.0) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("mixture_log_density matches extended-precision brute force") {
  Rng rng(101);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 1 + static_cast<int>(rng.index(8));
    const auto p = random_params(k, rng);
    const double y = rng.uniform(-8.0, 8.0);
    const double got = mixture_log_density(p, y);
    const double want = static_cast<double>(brute_force_log_density(p, y));
    CHECK(std::abs(got - want) <=
          1e-12 * std::max({std::abs(got), std::abs(want), 1.0}));
  }
}

TEST_CASE("mixture density integrates to 1") {
  Rng rng(202);
  for (int trial = 0; trial < 5; ++trial) {
    const auto p = random_params(1 + static_cast<int>(rng.index(5)), rng);
    double lo = (p.means.array() - 12.0 * p.scales.array()).minCoeff();
    double hi = (p.means.array() + 12.0 * p.scales.array()).maxCoeff();
    const double mass = integrate(
        [&p](double y) { return std::exp(mixture_log_density(p, y)); }, lo, hi,
        1e-9);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("invalid mixture inputs are rejected") {
  auto p = make_params({0.5, 0.5}, {0.0, 1.0}, {1.0, 1.0});
  CHECK_THROWS_AS(mixture_log_density(p, std::nan("")), std::invalid_argument);

  auto bad_len = p;
  bad_len.means.resize(1);
  CHECK_THROWS_AS(bad_len.validate(), std::invalid_argument);

  auto bad_sum = make_params({0.5, 0.6}, {0.0, 1.0}, {1.0, 1.0});
  CHECK_THROWS_AS(bad_sum.validate(), std::invalid_argument);

  auto bad_scale = make_params({0.5, 0.5}, {0.0, 1.0}, {1.0, 0.0});
  CHECK_THROWS_AS(bad_scale.validate(), std::invalid_argument);

  auto neg_w = make_params({-0.5, 1.5}, {0.0, 1.0}, {1.0, 1.0});
  CHECK_THROWS_AS(neg_w.validate(), std::invalid_argument);
}

TEST_CASE("conditional forward: zero model emits a uniform mixture") {
  const int k = 5;
  ConditionalMixtureModel m(3, 8, 2, k, 0.0);
  Rng rng(7);
  Eigen::VectorXd x(3);
  x << 0.4, -1.2, 2.0;
  const MixtureParams p = m.forward(x, false, rng);
  p.validate();
  for (int i = 0; i < k; ++i) {
    CHECK(p.weights(i) == doctest::Approx(1.0 / k).epsilon(1e-14));
    CHECK(p.means(i) == 0.0);
    CHECK(p.scales(i) == doctest::Approx(p.scales(0)).epsilon(1e-15));
  }
}

TEST_CASE("conditional forward is pure without dropout and always valid") {
  Rng init(55);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 1 + static_cast<int>(init.index(4));
    const int k = 1 + static_cast<int>(init.index(5));
    ConditionalMixtureModel m(d, 6, 2, k, 0.1);
    m.init_random(init);
    Eigen::VectorXd x(d);
    for (int i = 0; i < d; ++i) x(i) = init.uniform(-3.0, 3.0);

    Rng r1(1), r2(999);
    const MixtureParams a = m.forward(x, false, r1);
    const MixtureParams b = m.forward(x, false, r2);
    a.validate();
    CHECK(std::abs(a.weights.sum() - 1.0) <= 1e-12);
    CHECK((a.weights - b.weights).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.means - b.means).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.scales - b.scales).cwiseAbs().maxCoeff() == 0.0);
  }
  ConditionalMixtureModel m(2, 4, 1, 3, 0.0);
  Rng rng(1);
  Eigen::VectorXd wrong(3);
  wrong.setZero();
  CHECK_THROWS_AS(m.forward(wrong, false, rng), std::invalid_argument);
}

TEST_CASE("nll_loss closed-form examples") {
  const auto std_normal = make_params({1.0}, {0.0}, {1.0});
  Eigen::VectorXd y2(2);
  y2 << 0.0, 0.0;
  CHECK(nll_loss(std_normal, y2) == doctest::Approx(0.918939).epsilon(1e-6));

  Eigen::VectorXd y01(2);
  y01 << 0.0, 1.0;
  CHECK(nll_loss(std_normal, y01) ==
        doctest::Approx((0.9189385332046727 + 1.4189385332046727) / 2.0)
            .epsilon(1e-12));

  Eigen::VectorXd empty(0);
  CHECK_THROWS_AS(nll_loss(std_normal, empty), std::invalid_argument);
}

TEST_CASE("x-independent conditional nll equals its head mixture nll") {
  Rng rng(17);
  const int k = 4;
  Eigen::VectorXd logits(k), means(k), scales(k);
  for (int i = 0; i < k; ++i) {
    logits(i) = rng.uniform(-1.0, 1.0);
    means(i) = rng.uniform(-3.0, 3.0);
    scales(i) = rng.uniform(0.3, 2.0);
  }
  const auto m = const_head_model(2, k, logits, means, scales);
  Eigen::MatrixXd X(5, 2);
  Eigen::VectorXd y(5);
  for (int i = 0; i < 5; ++i) {
    X(i, 0) = rng.uniform(-4.0, 4.0);
    X(i, 1) = rng.uniform(-4.0, 4.0);
    y(i) = rng.uniform(-4.0, 4.0);
  }
  Eigen::VectorXd any = X.row(0).transpose();
  const MixtureParams head = m.forward(any, false, rng);
  CHECK(nll_loss(m, X, y) == doctest::Approx(nll_loss(head, y)).epsilon(1e-13));
}

TEST_CASE("marginal gradient: closed-form Gaussian score") {
  MarginalMixtureModel m(1);
  Eigen::VectorXd flat(3);
  flat << 0.0, 1.0, softplus_inverse(1.0 - kScaleFloor);  // mu=1, sigma=1
  m.set_parameters(flat);
  Eigen::VectorXd y(1);
  y << 0.0;
  Eigen::VectorXd grad;
  m.nll_gradient(y, grad);
  CHECK(grad(1) == doctest::Approx(1.0).epsilon(1e-12));  // (mu - y)/sigma^2
  CHECK(std::abs(grad(0)) <= 1e-14);  // K=1: weight logit has no effect
}

TEST_CASE("marginal gradient vanishes at a stationary point") {
  // y = {-1, 1}, mu = 0, sigma = 1: both the mean score and the scale score
  // are zero (z^2 = 1 for each sample).
  MarginalMixtureModel m(1);
  Eigen::VectorXd flat(3);
  flat << 0.0, 0.0, softplus_inverse(1.0 - kScaleFloor);
  m.set_parameters(flat);
  Eigen::VectorXd y(2);
  y << -1.0, 1.0;
  Eigen::VectorXd grad;
  m.nll_gradient(y, grad);
  CHECK(grad.cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("marginal gradient matches central finite differences") {
  Rng rng(303);
  for (int trial = 0; trial < 10; ++trial) {
    const int k = 1 + static_cast<int>(rng.index(5));
    MarginalMixtureModel m(k);
    Eigen::VectorXd theta(3 * k);
    for (int i = 0; i < 3 * k; ++i) theta(i) = rng.uniform(-1.5, 1.5);
    m.set_parameters(theta);
    Eigen::VectorXd y(6);
    for (int i = 0; i < 6; ++i) y(i) = rng.uniform(-3.0, 3.0);

    Eigen::VectorXd analytic;
    m.nll_gradient(y, analytic);
    MarginalMixtureModel probe(k);
    const Eigen::VectorXd fd = finite_difference_gradient(
        [&](const Eigen::VectorXd& t) {
          probe.set_parameters(t);
          return probe.nll(y);
        },
        theta);
    CHECK(max_relative_error(analytic, fd) <= 1e-4);
  }
}

TEST_CASE("conditional gradient matches central finite differences") {
  Rng rng(404);
  for (int trial = 0; trial < 6; ++trial) {
    const int d = 1 + static_cast<int>(rng.index(4));
    const int k = 1 + static_cast<int>(rng.index(5));
    const bool with_dropout = trial % 2 == 1;
    ConditionalMixtureModel m(d, 5, 2, k, with_dropout ? 0.4 : 0.0);
    m.init_random(rng);
    const int batch = 7;
    Eigen::MatrixXd X(batch, d);
    Eigen::VectorXd y(batch);
    for (int i = 0; i < batch; ++i) {
      for (int j = 0; j < d; ++j) X(i, j) = rng.uniform(-2.0, 2.0);
      y(i) = rng.uniform(-2.0, 2.0);
    }
    auto masks = m.make_dropout_masks(batch, rng);
    const auto* mask_ptr = masks.empty() ? nullptr : &masks;

    Eigen::VectorXd analytic;
    m.nll_gradient(X, y, mask_ptr, analytic);

    const Eigen::VectorXd theta = m.parameters();
    ConditionalMixtureModel probe = m;
    Eigen::VectorXd scratch;
    const Eigen::VectorXd fd = finite_difference_gradient(
        [&](const Eigen::VectorXd& t) {
          probe.set_parameters(t);
          return probe.nll_gradient(X, y, mask_ptr, scratch);
        },
        theta);
    CHECK(max_relative_error(analytic, fd) <= 1e-4);
  }
}

TEST_CASE("model JSON round-trips are bit-exact") {
  Rng rng(505);
  MarginalMixtureModel marg(4);
  Eigen::VectorXd theta(12);
  for (int i = 0; i < 12; ++i) theta(i) = rng.uniform(-2.0, 2.0);
  marg.set_parameters(theta);
  const auto marg2 = MarginalMixtureModel::from_json(
      nlohmann::json::parse(marg.to_json().dump()));
  CHECK((marg.parameters() - marg2.parameters()).cwiseAbs().maxCoeff() == 0.0);

  ConditionalMixtureModel cond(3, 6, 2, 4, 0.1);
  cond.init_random(rng);
  const auto cond2 = ConditionalMixtureModel::from_json(
      nlohmann::json::parse(cond.to_json().dump()));
  CHECK((cond.parameters() - cond2.parameters()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(cond2.input_dim() == 3);
  CHECK(cond2.kernel_count() == 4);
  CHECK(cond2.layer_count() == 2);
  CHECK(cond2.dropout_rate() == 0.1);
}
