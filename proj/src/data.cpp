#include "predlab/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <numeric>
#include <sstream>

namespace predlab {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    // trim whitespace and a trailing CR
    const auto first = cell.find_first_not_of(" \t\r");
    const auto last = cell.find_last_not_of(" \t\r");
    cells.push_back(first == std::string::npos
                        ? std::string()
                        : cell.substr(first, last - first + 1));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* begin = s.data();
  const char* end = begin + s.size();
  const auto res = std::from_chars(begin, end, out);
  return res.ec == std::errc() && res.ptr == end && std::isfinite(out);
}

// Round-trip exact formatting for doubles.
std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

LabeledDataset load_table(const std::string& path,
                          const std::string& target_column) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty file: " + path);
  const auto header = split_csv_line(line);
  int target_idx = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == target_column) {
      target_idx = static_cast<int>(i);
      break;
    }
  }
  if (target_idx < 0) {
    throw DataError("target column not found: " + target_column);
  }

  LabeledDataset ds;
  ds.target_name = target_column;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (static_cast<int>(i) != target_idx) ds.feature_names.push_back(header[i]);
  }

  std::vector<std::vector<double>> rows;
  std::vector<double> targets;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      ++ds.dropped_rows;
      continue;
    }
    std::vector<double> row;
    row.reserve(header.size() - 1);
    double target = 0.0;
    bool ok = true;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      double v;
      if (!parse_double(cells[i], v)) {
        ok = false;
        break;
      }
      if (static_cast<int>(i) == target_idx) {
        target = v;
      } else {
        row.push_back(v);
      }
    }
    if (!ok) {
      ++ds.dropped_rows;
      continue;
    }
    rows.push_back(std::move(row));
    targets.push_back(target);
  }
  if (rows.empty()) throw DataError("no usable rows in: " + path);

  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto d = static_cast<Eigen::Index>(ds.feature_names.size());
  ds.X.resize(n, d);
  ds.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      ds.X(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    ds.y(i) = targets[static_cast<std::size_t>(i)];
  }
  return ds;
}

void save_table(const LabeledDataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write file: " + path);
  for (const auto& name : ds.feature_names) out << name << ',';
  out << ds.target_name << '\n';
  for (Eigen::Index i = 0; i < ds.y.size(); ++i) {
    for (Eigen::Index j = 0; j < ds.X.cols(); ++j) {
      out << format_double(ds.X(i, j)) << ',';
    }
    out << format_double(ds.y(i)) << '\n';
  }
}

std::pair<LabeledDataset, LabeledDataset> train_test_split(
    const LabeledDataset& ds, double test_fraction, std::uint64_t seed) {
  if (test_fraction <= 0.0 || test_fraction >= 1.0) {
    throw std::invalid_argument("test_fraction must be in (0, 1)");
  }
  const int n = ds.size();
  if (n < 2) throw std::invalid_argument("need at least 2 rows to split");
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  rng.shuffle(idx);
  int n_test = static_cast<int>(std::lround(test_fraction * n));
  n_test = std::clamp(n_test, 1, n - 1);

  auto take = [&](int begin, int count) {
    LabeledDataset part;
    part.feature_names = ds.feature_names;
    part.target_name = ds.target_name;
    part.X.resize(count, ds.X.cols());
    part.y.resize(count);
    for (int i = 0; i < count; ++i) {
      part.X.row(i) = ds.X.row(idx[static_cast<std::size_t>(begin + i)]);
      part.y(i) = ds.y(idx[static_cast<std::size_t>(begin + i)]);
    }
    return part;
  };
  return {take(n_test, n - n_test), take(0, n_test)};
}

nlohmann::json PcaModel::to_json() const {
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(components.size()));
  for (Eigen::Index i = 0; i < components.rows(); ++i) {
    for (Eigen::Index j = 0; j < components.cols(); ++j) {
      flat.push_back(components(i, j));
    }
  }
  return {{"feature_means",
           std::vector<double>(feature_means.begin(), feature_means.end())},
          {"components_row_major", flat},
          {"ev_ratios", std::vector<double>(ev_ratios.begin(), ev_ratios.end())}};
}

PcaModel pca_fit(const MatrixXd& X) {
  if (X.rows() < 2) throw std::invalid_argument("need at least 2 rows");
  if (!X.allFinite()) throw std::invalid_argument("non-finite input");
  PcaModel model;
  model.feature_means = X.colwise().mean();
  MatrixXd centered = X.rowwise() - model.feature_means.transpose();
  MatrixXd cov = centered.transpose() * centered /
                 static_cast<double>(X.rows() - 1);
  Eigen::SelfAdjointEigenSolver<MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigendecomposition failed");
  }
  const double trace = cov.trace();
  if (!(trace > 0.0)) {
    throw std::invalid_argument("zero total variance, PCA undefined");
  }

  const auto d = X.cols();
  // SelfAdjointEigenSolver sorts ascending; reverse to descending.
  model.components.resize(d, d);
  model.ev_ratios.resize(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const Eigen::Index src = d - 1 - i;
    VectorXd dir = solver.eigenvectors().col(src);
    // sign convention: largest-magnitude entry positive
    Eigen::Index argmax = 0;
    dir.cwiseAbs().maxCoeff(&argmax);
    if (dir(argmax) < 0.0) dir = -dir;
    model.components.row(i) = dir.transpose();
    model.ev_ratios(i) = std::max(solver.eigenvalues()(src), 0.0) / trace;
  }
  model.ev_ratios /= model.ev_ratios.sum();
  return model;
}

int pca_components_for_ev(const PcaModel& model, double ev_threshold) {
  if (ev_threshold <= 0.0 || ev_threshold > 1.0) {
    throw std::invalid_argument("ev threshold must be in (0, 1]");
  }
  double acc = 0.0;
  for (Eigen::Index i = 0; i < model.ev_ratios.size(); ++i) {
    acc += model.ev_ratios(i);
    if (acc >= ev_threshold - 1e-12) return static_cast<int>(i) + 1;
  }
  return static_cast<int>(model.ev_ratios.size());
}

MatrixXd pca_reduce(const PcaModel& model, const MatrixXd& X, int k) {
  if (X.cols() != model.components.cols()) {
    throw std::invalid_argument("feature dimension mismatch");
  }
  if (k < 1 || k > model.components.rows()) {
    throw std::invalid_argument("component count out of range");
  }
  return (X.rowwise() - model.feature_means.transpose()) *
         model.components.topRows(k).transpose();
}

MatrixXd pca_reduce_ev(const PcaModel& model, const MatrixXd& X,
                       double ev_threshold) {
  return pca_reduce(model, X, pca_components_for_ev(model, ev_threshold));
}

}  // namespace predlab
