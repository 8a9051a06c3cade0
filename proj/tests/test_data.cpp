#include <cstdio>
#include <fstream>
#include <string>

#include "doctest.h"
#include "predlab/data.hpp"
#include "predlab/synth.hpp"
#include "test_util.hpp"

using namespace predlab;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name, const std::string& content)
      : path("predlab_test_" + name) {
    std::ofstream out(path);
    out << content;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("load_table parses clean and partially malformed files") {
  TempFile clean("clean.csv",
                 "a,y,b\n1,10,2\n3,20,4\n5,30,6\n7,40,8\n9,50,10\n");
  const LabeledDataset ds = load_table(clean.path, "y");
  CHECK(ds.size() == 5);
  CHECK(ds.dim() == 2);
  CHECK(ds.dropped_rows == 0);
  CHECK(ds.feature_names == std::vector<std::string>{"a", "b"});
  CHECK(ds.target_name == "y");
  CHECK(ds.X(0, 0) == 1.0);
  CHECK(ds.X(0, 1) == 2.0);
  CHECK(ds.y(4) == 50.0);

  std::string rows = "x,y\n";
  for (int i = 0; i < 9; ++i)
    rows += std::to_string(i) + "," + std::to_string(i * 2) + "\n";
  rows += "oops,3\n";
  TempFile dirty("dirty.csv", rows);
  const LabeledDataset ds2 = load_table(dirty.path, "y");
  CHECK(ds2.size() == 9);
  CHECK(ds2.dropped_rows == 1);
}

TEST_CASE("load_table error cases are distinct") {
  TempFile f("err.csv", "a,b\n1,2\n");
  CHECK_THROWS_WITH_AS(load_table(f.path, "zz"), "target column not found: zz",
                       DataError);
  CHECK_THROWS_WITH_AS(load_table("predlab_no_such_file.csv", "y"),
                       "cannot open file: predlab_no_such_file.csv", DataError);
  TempFile empty("allbad.csv", "a,y\nx,x\n");
  CHECK_THROWS_AS(load_table(empty.path, "y"), DataError);
}

TEST_CASE("save/load round-trip is bitwise exact") {
  const auto [ds, _gt] = gen_dataset(SynthTaskKind::kMultivariate,
                                     NoiseKind::kLaplacian, 123.456, 200, 42);
  const std::string path = "predlab_test_roundtrip.csv";
  save_table(ds, path);
  const LabeledDataset back = load_table(path, "y");
  std::remove(path.c_str());
  REQUIRE(back.size() == ds.size());
  REQUIRE(back.dim() == ds.dim());
  CHECK((back.X - ds.X).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.y - ds.y).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.feature_names == ds.feature_names);
}

TEST_CASE("train_test_split is disjoint, exhaustive, deterministic") {
  const auto [ds, _gt] = gen_dataset(SynthTaskKind::kLinearity,
                                     NoiseKind::kGaussian, 10.0, 10, 1);
  const auto [train, test] = train_test_split(ds, 0.4, 7);
  CHECK(train.size() == 6);
  CHECK(test.size() == 4);

  // every original y value appears exactly once across the two parts
  std::vector<double> seen;
  for (int i = 0; i < train.size(); ++i) seen.push_back(train.y(i));
  for (int i = 0; i < test.size(); ++i) seen.push_back(test.y(i));
  std::sort(seen.begin(), seen.end());
  std::vector<double> orig(ds.y.begin(), ds.y.end());
  std::sort(orig.begin(), orig.end());
  CHECK(seen == orig);

  const auto [train2, test2] = train_test_split(ds, 0.4, 7);
  CHECK((train.y - train2.y).cwiseAbs().maxCoeff() == 0.0);
  CHECK((test.y - test2.y).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(train_test_split(ds, 0.0, 1), std::invalid_argument);
}

TEST_CASE("pca_fit matches an independent Jacobi eigendecomposition") {
  Rng rng(99);
  const int n = 500, d = 5;
  Eigen::MatrixXd X(n, d);
  for (int i = 0; i < n; ++i) {
    const double a = rng.normal(), b = rng.normal();
    X(i, 0) = 3.0 * a;
    X(i, 1) = a + 0.5 * b;
    X(i, 2) = rng.normal();
    X(i, 3) = 0.1 * b + 0.2 * rng.normal();
    X(i, 4) = rng.uniform(-1.0, 1.0);
  }
  const PcaModel model = pca_fit(X);

  // oracle: Jacobi eigenvalues of the same covariance
  Eigen::MatrixXd centered = X.rowwise() - X.colwise().mean();
  Eigen::MatrixXd cov = centered.transpose() * centered / (n - 1);
  const auto eigs = testutil::jacobi_eigenvalues(cov);
  const double trace = cov.trace();
  for (int i = 0; i < d; ++i) {
    CHECK(std::abs(model.ev_ratios(i) - eigs[static_cast<std::size_t>(i)] / trace) <=
          1e-8);
  }

  // orthonormality and descending order
  const Eigen::MatrixXd gram = model.components * model.components.transpose();
  CHECK((gram - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff() <= 1e-8);
  for (int i = 1; i < d; ++i) CHECK(model.ev_ratios(i) <= model.ev_ratios(i - 1));
  CHECK(model.ev_ratios.sum() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("pca degenerate and isotropic cases") {
  Rng rng(5);
  Eigen::MatrixXd dup(100, 2);
  for (int i = 0; i < 100; ++i) {
    dup(i, 0) = rng.normal();
    dup(i, 1) = dup(i, 0);
  }
  const PcaModel m = pca_fit(dup);
  CHECK(m.ev_ratios(1) <= 1e-12);  // identical columns: rank 1

  Eigen::MatrixXd iso(100000, 2);
  for (int i = 0; i < 100000; ++i) {
    iso(i, 0) = rng.normal();
    iso(i, 1) = rng.normal();
  }
  const PcaModel mi = pca_fit(iso);
  CHECK(mi.ev_ratios(0) == doctest::Approx(0.5).epsilon(0.02));
  CHECK(mi.ev_ratios(1) == doctest::Approx(0.5).epsilon(0.02));

  Eigen::MatrixXd bad(3, 1);
  bad << 1.0, std::nan(""), 2.0;
  CHECK_THROWS_AS(pca_fit(bad), std::invalid_argument);
  CHECK_THROWS_AS(pca_fit(Eigen::MatrixXd::Zero(5, 2)), std::invalid_argument);
}

TEST_CASE("pca_components_for_ev cumulative rule") {
  PcaModel m;
  m.ev_ratios.resize(3);
  m.ev_ratios << 0.7, 0.25, 0.05;
  m.feature_means = Eigen::VectorXd::Zero(3);
  m.components = Eigen::MatrixXd::Identity(3, 3);
  CHECK(pca_components_for_ev(m, 0.9) == 2);
  CHECK(pca_components_for_ev(m, 0.7) == 1);
  CHECK(pca_components_for_ev(m, 1.0) == 3);
  CHECK_THROWS_AS(pca_components_for_ev(m, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(pca_components_for_ev(m, 1.5), std::invalid_argument);
}

TEST_CASE("pca_reduce reconstruction and variance retention") {
  Rng rng(17);
  const int n = 2000, d = 4;
  Eigen::MatrixXd X(n, d);
  for (int i = 0; i < n; ++i) {
    const double a = rng.normal();
    X(i, 0) = 2.0 * a + 0.1 * rng.normal();
    X(i, 1) = -a + 0.3 * rng.normal();
    X(i, 2) = rng.normal();
    X(i, 3) = 0.5 * rng.normal();
  }
  const PcaModel model = pca_fit(X);

  // full basis reconstructs exactly
  const Eigen::MatrixXd proj = pca_reduce(model, X, d);
  const Eigen::MatrixXd rec =
      (proj * model.components).rowwise() + model.feature_means.transpose();
  CHECK((rec - X).cwiseAbs().maxCoeff() <= 1e-8);

  // ev threshold of 1.0 keeps everything
  CHECK(pca_reduce_ev(model, X, 1.0).cols() == d);

  // projected columns are uncorrelated and retain the cumulative variance
  const int k = 2;
  const Eigen::MatrixXd p2 = pca_reduce(model, X, k);
  Eigen::MatrixXd centered = p2.rowwise() - p2.colwise().mean();
  Eigen::MatrixXd cov = centered.transpose() * centered / (n - 1);
  const double total_var =
      ((X.rowwise() - X.colwise().mean()).array().square().sum()) / (n - 1);
  CHECK(std::abs(cov(0, 1)) <= 1e-6 * (total_var / d));
  CHECK(cov.trace() / total_var ==
        doctest::Approx(model.ev_ratios.head(k).sum()).epsilon(1e-8));

  CHECK_THROWS_AS(pca_reduce(model, X, d + 1), std::invalid_argument);
  CHECK_THROWS_AS(pca_reduce(model, Eigen::MatrixXd::Zero(3, d + 2), 1),
                  std::invalid_argument);
}
