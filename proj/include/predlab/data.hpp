#pragma once

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>
#include <stdexcept>
#include <string>
#include <vector>

#include "predlab/rng.hpp"

namespace predlab {

struct LabeledDataset {
  Eigen::MatrixXd X;  // N x d
  Eigen::VectorXd y;  // N
  std::vector<std::string> feature_names;
  std::string target_name;
  int dropped_rows = 0;  // rows discarded during ingestion

  int size() const { return static_cast<int>(y.size()); }
  int dim() const { return static_cast<int>(X.cols()); }
};

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// CSV with a header row; every non-target numeric column becomes a feature.
// Rows with missing or non-numeric cells are dropped and counted.
LabeledDataset load_table(const std::string& path,
                          const std::string& target_column);
void save_table(const LabeledDataset& ds, const std::string& path);

std::pair<LabeledDataset, LabeledDataset> train_test_split(
    const LabeledDataset& ds, double test_fraction, std::uint64_t seed);

struct PcaModel {
  Eigen::VectorXd feature_means;  // d
  Eigen::MatrixXd components;     // d x d, rows = principal directions
  Eigen::VectorXd ev_ratios;      // nonincreasing, sums to 1

  nlohmann::json to_json() const;
};

PcaModel pca_fit(const Eigen::MatrixXd& X);

// Smallest k whose cumulative explained variance reaches the threshold.
int pca_components_for_ev(const PcaModel& model, double ev_threshold);

Eigen::MatrixXd pca_reduce(const PcaModel& model, const Eigen::MatrixXd& X,
                           int k);
Eigen::MatrixXd pca_reduce_ev(const PcaModel& model, const Eigen::MatrixXd& X,
                              double ev_threshold);

}  // namespace predlab
