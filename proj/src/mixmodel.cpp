#include "predlab/mixmodel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>

namespace predlab {

namespace {

using Eigen::ArrayXd;
using Eigen::ArrayXXd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

bool all_finite(const VectorXd& v) { return v.allFinite(); }

// Per-sample mixture NLL pieces for batched head outputs. Rows are samples.
struct MixtureBatch {
  double nll = 0.0;
  // Upstream gradients of the mean NLL w.r.t. head outputs, filled when
  // requested.
  MatrixXd d_logits;
  MatrixXd d_means;
  MatrixXd d_raw_scales;
};

MixtureBatch mixture_nll_batch(const HeadOutputs& head, const VectorXd& y,
                               bool want_grad) {
  const auto b = head.logits.rows();
  const auto k = head.logits.cols();
  MixtureBatch out;
  if (want_grad) {
    out.d_logits.resize(b, k);
    out.d_means.resize(b, k);
    out.d_raw_scales.resize(b, k);
  }

  ArrayXXd raw = head.raw_scales.array();
  ArrayXXd sig = raw.max(0.0) + (-raw.abs()).exp().log1p() + kScaleFloor;
  ArrayXXd log_sig = sig.log();

  double total = 0.0;
  ArrayXd l(k), r(k), w(k);
  for (Eigen::Index i = 0; i < b; ++i) {
    ArrayXd logits = head.logits.row(i).transpose().array();
    const double lse_w = [&] {
      const double m = logits.maxCoeff();
      return m + std::log((logits - m).exp().sum());
    }();
    ArrayXd zi = (y(i) - head.means.row(i).transpose().array()) /
                 sig.row(i).transpose();
    l = logits - lse_w - log_sig.row(i).transpose() - 0.5 * zi.square() -
        0.5 * kLog2Pi;
    const double m = l.maxCoeff();
    const double log_q = m + std::log((l - m).exp().sum());
    total += log_q;
    if (want_grad) {
      r = (l - log_q).exp();
      w = (logits - lse_w).exp();
      const double inv_b = 1.0 / static_cast<double>(b);
      ArrayXd si = sig.row(i).transpose();
      out.d_logits.row(i) = ((w - r) * inv_b).matrix().transpose();
      out.d_means.row(i) = (-(r * zi / si) * inv_b).matrix().transpose();
      // d sigma / d raw = sigmoid(raw)
      ArrayXd sigmoid = 1.0 / (1.0 + (-raw.row(i).transpose()).exp());
      out.d_raw_scales.row(i) =
          (-(r * (zi.square() - 1.0) / si) * sigmoid * inv_b)
              .matrix()
              .transpose();
    }
  }
  out.nll = -total / static_cast<double>(b);
  return out;
}

void glorot_init(DenseLayer& layer, Rng& rng) {
  const double limit = std::sqrt(
      6.0 / static_cast<double>(layer.weight.rows() + layer.weight.cols()));
  for (Eigen::Index j = 0; j < layer.weight.cols(); ++j) {
    for (Eigen::Index i = 0; i < layer.weight.rows(); ++i) {
      layer.weight(i, j) = rng.uniform(-limit, limit);
    }
  }
  layer.bias.setZero();
}

nlohmann::json flatten_row_major(const MatrixXd& m) {
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) flat.push_back(m(i, j));
  }
  return flat;
}

MatrixXd unflatten_row_major(const nlohmann::json& j, Eigen::Index rows,
                             Eigen::Index cols) {
  MatrixXd m(rows, cols);
  std::size_t idx = 0;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index jj = 0; jj < cols; ++jj) m(i, jj) = j.at(idx++);
  }
  return m;
}

VectorXd vector_from_json(const nlohmann::json& j) {
  VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j.at(i);
  return v;
}

}  // namespace

double softplus(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

double softplus_inverse(double y) {
  // y = log(1 + e^x)  =>  x = log(e^y - 1)
  if (y > 30.0) return y;
  return std::log(std::expm1(y));
}

void MixtureParams::validate() const {
  const auto k = weights.size();
  if (k < 1 || means.size() != k || scales.size() != k) {
    throw std::invalid_argument("invalid input: mixture field lengths differ");
  }
  if (!all_finite(weights) || !all_finite(means) || !all_finite(scales)) {
    throw std::invalid_argument("invalid input: non-finite mixture parameter");
  }
  if (weights.minCoeff() < 0.0) {
    throw std::invalid_argument("invalid input: negative mixture weight");
  }
  if (std::abs(weights.sum() - 1.0) > 1e-12) {
    throw std::invalid_argument("invalid input: weights do not sum to 1");
  }
  if (scales.minCoeff() <= 0.0) {
    throw std::invalid_argument("invalid input: nonpositive mixture scale");
  }
}

double mixture_log_density(const MixtureParams& params, double y) {
  params.validate();
  if (!std::isfinite(y)) throw std::invalid_argument("invalid input: y");
  const auto k = params.weights.size();
  double max_term = -std::numeric_limits<double>::infinity();
  VectorXd terms(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const double w = params.weights(i);
    if (w <= 0.0) {
      terms(i) = -std::numeric_limits<double>::infinity();
      continue;
    }
    const double z = (y - params.means(i)) / params.scales(i);
    terms(i) = std::log(w) - std::log(params.scales(i)) - 0.5 * z * z -
               0.5 * kLog2Pi;
    max_term = std::max(max_term, terms(i));
  }
  if (!std::isfinite(max_term)) {
    throw std::invalid_argument("invalid input: all mixture weights zero");
  }
  double acc = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    if (std::isfinite(terms(i))) acc += std::exp(terms(i) - max_term);
  }
  return max_term + std::log(acc);
}

// ---------------------------------------------------------------------------
// MarginalMixtureModel

MarginalMixtureModel::MarginalMixtureModel(int kernel_count)
    : logits_(VectorXd::Zero(kernel_count)),
      means_(VectorXd::Zero(kernel_count)),
      raw_scales_(VectorXd::Constant(kernel_count, softplus_inverse(1.0))) {
  if (kernel_count < 1) {
    throw std::invalid_argument("kernel_count must be >= 1");
  }
}

void MarginalMixtureModel::init_from_targets(const VectorXd& y, Rng& rng) {
  const auto n = y.size();
  if (n < 1) throw std::invalid_argument("empty target vector");
  for (Eigen::Index i = 0; i < means_.size(); ++i) {
    means_(i) = y(static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(n))));
  }
  const double mean = y.mean();
  const double sd = std::sqrt((y.array() - mean).square().sum() /
                              static_cast<double>(n));
  const double target_scale =
      std::max(sd * std::pow(static_cast<double>(kernel_count()), -0.2),
               kScaleFloor * 2.0);
  raw_scales_.setConstant(softplus_inverse(target_scale - kScaleFloor));
  logits_.setZero();
}

MixtureParams MarginalMixtureModel::mixture() const {
  MixtureParams p;
  const ArrayXd shifted = logits_.array() - logits_.maxCoeff();
  const ArrayXd e = shifted.exp();
  p.weights = (e / e.sum()).matrix();
  p.means = means_;
  p.scales = (raw_scales_.array().max(0.0) +
              (-raw_scales_.array().abs()).exp().log1p() + kScaleFloor)
                 .matrix();
  return p;
}

double MarginalMixtureModel::nll(const VectorXd& y_batch) const {
  return nll_loss(mixture(), y_batch);
}

double MarginalMixtureModel::nll_gradient(const VectorXd& y_batch,
                                          VectorXd& grad) const {
  const auto b = y_batch.size();
  if (b < 1) throw std::invalid_argument("empty batch");
  const auto k = static_cast<Eigen::Index>(kernel_count());

  ArrayXd raw = raw_scales_.array();
  ArrayXd sig = raw.max(0.0) + (-raw.abs()).exp().log1p() + kScaleFloor;
  ArrayXd log_sig = sig.log();
  ArrayXd shifted = logits_.array() - logits_.maxCoeff();
  ArrayXd log_w = shifted - std::log(shifted.exp().sum());
  ArrayXd w = log_w.exp();
  ArrayXd sigmoid = 1.0 / (1.0 + (-raw).exp());

  VectorXd g_logits = VectorXd::Zero(k);
  VectorXd g_means = VectorXd::Zero(k);
  VectorXd g_raw = VectorXd::Zero(k);
  double total = 0.0;
  ArrayXd l(k), r(k), z(k);
  for (Eigen::Index i = 0; i < b; ++i) {
    z = (y_batch(i) - means_.array()) / sig;
    l = log_w - log_sig - 0.5 * z.square() - 0.5 * kLog2Pi;
    const double m = l.maxCoeff();
    const double log_q = m + std::log((l - m).exp().sum());
    total += log_q;
    r = (l - log_q).exp();
    g_logits.array() += w - r;
    g_means.array() -= r * z / sig;
    g_raw.array() -= r * (z.square() - 1.0) / sig * sigmoid;
  }
  const double inv_b = 1.0 / static_cast<double>(b);
  grad.resize(3 * k);
  grad.segment(0, k) = g_logits * inv_b;
  grad.segment(k, k) = g_means * inv_b;
  grad.segment(2 * k, k) = g_raw * inv_b;
  return -total * inv_b;
}

VectorXd MarginalMixtureModel::parameters() const {
  const auto k = static_cast<Eigen::Index>(kernel_count());
  VectorXd flat(3 * k);
  flat.segment(0, k) = logits_;
  flat.segment(k, k) = means_;
  flat.segment(2 * k, k) = raw_scales_;
  return flat;
}

void MarginalMixtureModel::set_parameters(const VectorXd& flat) {
  const auto k = static_cast<Eigen::Index>(kernel_count());
  if (flat.size() != 3 * k) throw std::invalid_argument("parameter size mismatch");
  logits_ = flat.segment(0, k);
  means_ = flat.segment(k, k);
  raw_scales_ = flat.segment(2 * k, k);
}

nlohmann::json MarginalMixtureModel::to_json() const {
  return {{"format_version", 1},
          {"kind", "marginal_mixture"},
          {"kernel_count", kernel_count()},
          {"logits", std::vector<double>(logits_.begin(), logits_.end())},
          {"means", std::vector<double>(means_.begin(), means_.end())},
          {"raw_scales",
           std::vector<double>(raw_scales_.begin(), raw_scales_.end())}};
}

MarginalMixtureModel MarginalMixtureModel::from_json(const nlohmann::json& j) {
  if (j.at("format_version").get<int>() != 1 ||
      j.at("kind").get<std::string>() != "marginal_mixture") {
    throw std::invalid_argument("unsupported marginal model document");
  }
  MarginalMixtureModel m(j.at("kernel_count").get<int>());
  m.logits_ = vector_from_json(j.at("logits"));
  m.means_ = vector_from_json(j.at("means"));
  m.raw_scales_ = vector_from_json(j.at("raw_scales"));
  return m;
}

// ---------------------------------------------------------------------------
// ConditionalMixtureModel

ConditionalMixtureModel::ConditionalMixtureModel(int input_dim, int hidden_dim,
                                                 int layer_count,
                                                 int kernel_count,
                                                 double dropout_rate)
    : input_dim_(input_dim),
      hidden_dim_(hidden_dim),
      kernel_count_(kernel_count),
      dropout_rate_(dropout_rate) {
  if (input_dim < 1 || hidden_dim < 1 || layer_count < 1 || kernel_count < 1) {
    throw std::invalid_argument("model dimensions must be >= 1");
  }
  if (dropout_rate < 0.0 || dropout_rate >= 1.0) {
    throw std::invalid_argument("dropout_rate must be in [0, 1)");
  }
  hidden_.resize(static_cast<std::size_t>(layer_count));
  int fan_in = input_dim;
  for (auto& layer : hidden_) {
    layer.weight = MatrixXd::Zero(fan_in, hidden_dim);
    layer.bias = VectorXd::Zero(hidden_dim);
    fan_in = hidden_dim;
  }
  head_.weight = MatrixXd::Zero(hidden_dim, 3 * kernel_count);
  head_.bias = VectorXd::Zero(3 * kernel_count);
}

void ConditionalMixtureModel::init_random(Rng& rng) {
  for (auto& layer : hidden_) glorot_init(layer, rng);
  glorot_init(head_, rng);
}

void ConditionalMixtureModel::init_head_from_targets(const VectorXd& y,
                                                     Rng& rng) {
  const auto n = y.size();
  if (n < 1) throw std::invalid_argument("empty target vector");
  const auto k = static_cast<Eigen::Index>(kernel_count_);
  for (Eigen::Index i = 0; i < k; ++i) {
    head_.bias(k + i) =
        y(static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(n))));
  }
  const double mean = y.mean();
  const double sd =
      std::sqrt((y.array() - mean).square().sum() / static_cast<double>(n));
  const double target_scale = std::max(
      sd * std::pow(static_cast<double>(kernel_count_), -0.2), kScaleFloor * 2.0);
  head_.bias.segment(2 * k, k)
      .setConstant(softplus_inverse(target_scale - kScaleFloor));
}

std::vector<MatrixXd> ConditionalMixtureModel::make_dropout_masks(
    int batch, Rng& rng) const {
  std::vector<MatrixXd> masks;
  if (dropout_rate_ <= 0.0) return masks;
  masks.reserve(hidden_.size());
  const double keep = 1.0 - dropout_rate_;
  for (std::size_t l = 0; l < hidden_.size(); ++l) {
    MatrixXd mask(batch, hidden_dim_);
    for (Eigen::Index i = 0; i < mask.rows(); ++i) {
      for (Eigen::Index j = 0; j < mask.cols(); ++j) {
        mask(i, j) = rng.uniform() < keep ? 1.0 / keep : 0.0;
      }
    }
    masks.push_back(std::move(mask));
  }
  return masks;
}

HeadOutputs ConditionalMixtureModel::forward_batch(
    const MatrixXd& X, const std::vector<MatrixXd>* dropout_masks,
    std::vector<MatrixXd>* activations) const {
  if (X.cols() != input_dim_) {
    throw std::invalid_argument("feature dimension mismatch");
  }
  if (dropout_masks != nullptr && !dropout_masks->empty() &&
      dropout_masks->size() != hidden_.size()) {
    throw std::invalid_argument("dropout mask count mismatch");
  }
  MatrixXd h = X;
  for (std::size_t l = 0; l < hidden_.size(); ++l) {
    MatrixXd z = ((h * hidden_[l].weight).rowwise() +
                  hidden_[l].bias.transpose())
                     .array()
                     .tanh()
                     .matrix();
    if (activations != nullptr) activations->push_back(z);
    if (dropout_masks != nullptr && !dropout_masks->empty()) {
      z = z.cwiseProduct((*dropout_masks)[l]);
    }
    h = std::move(z);
  }
  MatrixXd out = (h * head_.weight).rowwise() + head_.bias.transpose();
  const auto k = static_cast<Eigen::Index>(kernel_count_);
  HeadOutputs head;
  head.logits = out.leftCols(k);
  head.means = out.middleCols(k, k);
  head.raw_scales = out.rightCols(k);
  return head;
}

MixtureParams ConditionalMixtureModel::forward(const VectorXd& x,
                                               bool dropout_active,
                                               Rng& rng) const {
  if (x.size() != input_dim_) {
    throw std::invalid_argument("feature dimension mismatch");
  }
  std::vector<MatrixXd> masks;
  if (dropout_active) masks = make_dropout_masks(1, rng);
  HeadOutputs head = forward_batch(x.transpose(), masks.empty() ? nullptr : &masks,
                                   nullptr);
  MixtureParams p;
  const ArrayXd logits = head.logits.row(0).transpose().array();
  const ArrayXd e = (logits - logits.maxCoeff()).exp();
  p.weights = (e / e.sum()).matrix();
  p.means = head.means.row(0).transpose();
  const ArrayXd raw = head.raw_scales.row(0).transpose().array();
  p.scales = (raw.max(0.0) + (-raw.abs()).exp().log1p() + kScaleFloor).matrix();
  return p;
}

double ConditionalMixtureModel::nll(const MatrixXd& X,
                                    const VectorXd& y) const {
  if (X.rows() != y.size()) throw std::invalid_argument("batch size mismatch");
  if (y.size() < 1) throw std::invalid_argument("empty batch");
  HeadOutputs head = forward_batch(X, nullptr, nullptr);
  return mixture_nll_batch(head, y, false).nll;
}

std::vector<double> ConditionalMixtureModel::log_densities(
    const MatrixXd& X, const VectorXd& y) const {
  if (X.rows() != y.size()) throw std::invalid_argument("batch size mismatch");
  HeadOutputs head = forward_batch(X, nullptr, nullptr);
  const auto b = y.size();
  std::vector<double> out(static_cast<std::size_t>(b));
  for (Eigen::Index i = 0; i < b; ++i) {
    HeadOutputs row;
    row.logits = head.logits.row(i);
    row.means = head.means.row(i);
    row.raw_scales = head.raw_scales.row(i);
    out[static_cast<std::size_t>(i)] =
        -mixture_nll_batch(row, y.segment(i, 1), false).nll;
  }
  return out;
}

double ConditionalMixtureModel::nll_gradient(
    const MatrixXd& X, const VectorXd& y,
    const std::vector<MatrixXd>* dropout_masks, VectorXd& grad) const {
  if (X.rows() != y.size()) throw std::invalid_argument("batch size mismatch");
  if (y.size() < 1) throw std::invalid_argument("empty batch");

  std::vector<MatrixXd> acts;  // tanh outputs per hidden layer (pre-dropout)
  acts.reserve(hidden_.size());
  HeadOutputs head = forward_batch(X, dropout_masks, &acts);
  MixtureBatch mb = mixture_nll_batch(head, y, true);

  const auto k = static_cast<Eigen::Index>(kernel_count_);
  MatrixXd g_head(y.size(), 3 * k);
  g_head.leftCols(k) = mb.d_logits;
  g_head.middleCols(k, k) = mb.d_means;
  g_head.rightCols(k) = mb.d_raw_scales;

  const bool use_masks = dropout_masks != nullptr && !dropout_masks->empty();
  grad.resize(parameter_count());
  Eigen::Index offset = static_cast<Eigen::Index>(parameter_count());

  // Head gradients.
  MatrixXd last = use_masks ? acts.back().cwiseProduct(dropout_masks->back())
                            : acts.back();
  const Eigen::Index head_b = head_.bias.size();
  const Eigen::Index head_w = head_.weight.size();
  offset -= head_b;
  grad.segment(offset, head_b) = g_head.colwise().sum().transpose();
  offset -= head_w;
  {
    MatrixXd gw = last.transpose() * g_head;
    grad.segment(offset, head_w) = Eigen::Map<VectorXd>(gw.data(), head_w);
  }

  MatrixXd delta = g_head * head_.weight.transpose();
  for (std::size_t li = hidden_.size(); li-- > 0;) {
    if (use_masks) delta = delta.cwiseProduct((*dropout_masks)[li]);
    delta = delta.cwiseProduct(
        (1.0 - acts[li].array().square()).matrix());  // tanh'
    MatrixXd input = li == 0 ? X
                             : (use_masks ? acts[li - 1].cwiseProduct(
                                                (*dropout_masks)[li - 1])
                                          : acts[li - 1]);
    const Eigen::Index nb = hidden_[li].bias.size();
    const Eigen::Index nw = hidden_[li].weight.size();
    offset -= nb;
    grad.segment(offset, nb) = delta.colwise().sum().transpose();
    offset -= nw;
    MatrixXd gw = input.transpose() * delta;
    grad.segment(offset, nw) = Eigen::Map<VectorXd>(gw.data(), nw);
    if (li > 0) delta = delta * hidden_[li].weight.transpose();
  }
  return mb.nll;
}

VectorXd ConditionalMixtureModel::parameters() const {
  VectorXd flat(parameter_count());
  Eigen::Index offset = 0;
  for (const auto& layer : hidden_) {
    flat.segment(offset, layer.weight.size()) =
        Eigen::Map<const VectorXd>(layer.weight.data(), layer.weight.size());
    offset += layer.weight.size();
    flat.segment(offset, layer.bias.size()) = layer.bias;
    offset += layer.bias.size();
  }
  flat.segment(offset, head_.weight.size()) =
      Eigen::Map<const VectorXd>(head_.weight.data(), head_.weight.size());
  offset += head_.weight.size();
  flat.segment(offset, head_.bias.size()) = head_.bias;
  return flat;
}

void ConditionalMixtureModel::set_parameters(const VectorXd& flat) {
  if (flat.size() != parameter_count()) {
    throw std::invalid_argument("parameter size mismatch");
  }
  Eigen::Index offset = 0;
  for (auto& layer : hidden_) {
    Eigen::Map<VectorXd>(layer.weight.data(), layer.weight.size()) =
        flat.segment(offset, layer.weight.size());
    offset += layer.weight.size();
    layer.bias = flat.segment(offset, layer.bias.size());
    offset += layer.bias.size();
  }
  Eigen::Map<VectorXd>(head_.weight.data(), head_.weight.size()) =
      flat.segment(offset, head_.weight.size());
  offset += head_.weight.size();
  head_.bias = flat.segment(offset, head_.bias.size());
}

int ConditionalMixtureModel::parameter_count() const {
  Eigen::Index n = head_.weight.size() + head_.bias.size();
  for (const auto& layer : hidden_) n += layer.weight.size() + layer.bias.size();
  return static_cast<int>(n);
}

nlohmann::json ConditionalMixtureModel::to_json() const {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& layer : hidden_) {
    layers.push_back({{"rows", layer.weight.rows()},
                      {"cols", layer.weight.cols()},
                      {"weight", flatten_row_major(layer.weight)},
                      {"bias", std::vector<double>(layer.bias.begin(),
                                                   layer.bias.end())}});
  }
  return {{"format_version", 1},
          {"kind", "conditional_mixture"},
          {"input_dim", input_dim_},
          {"hidden_dim", hidden_dim_},
          {"kernel_count", kernel_count_},
          {"dropout_rate", dropout_rate_},
          {"hidden_layers", layers},
          {"head",
           {{"rows", head_.weight.rows()},
            {"cols", head_.weight.cols()},
            {"weight", flatten_row_major(head_.weight)},
            {"bias",
             std::vector<double>(head_.bias.begin(), head_.bias.end())}}}};
}

ConditionalMixtureModel ConditionalMixtureModel::from_json(
    const nlohmann::json& j) {
  if (j.at("format_version").get<int>() != 1 ||
      j.at("kind").get<std::string>() != "conditional_mixture") {
    throw std::invalid_argument("unsupported conditional model document");
  }
  ConditionalMixtureModel m(
      j.at("input_dim").get<int>(), j.at("hidden_dim").get<int>(),
      static_cast<int>(j.at("hidden_layers").size()),
      j.at("kernel_count").get<int>(), j.at("dropout_rate").get<double>());
  std::size_t li = 0;
  for (const auto& lj : j.at("hidden_layers")) {
    m.hidden_[li].weight = unflatten_row_major(
        lj.at("weight"), lj.at("rows").get<Eigen::Index>(),
        lj.at("cols").get<Eigen::Index>());
    m.hidden_[li].bias = vector_from_json(lj.at("bias"));
    ++li;
  }
  const auto& hj = j.at("head");
  m.head_.weight = unflatten_row_major(hj.at("weight"),
                                       hj.at("rows").get<Eigen::Index>(),
                                       hj.at("cols").get<Eigen::Index>());
  m.head_.bias = vector_from_json(hj.at("bias"));
  return m;
}

// ---------------------------------------------------------------------------

double nll_loss(const MixtureParams& params, const VectorXd& y_batch) {
  if (y_batch.size() < 1) throw std::invalid_argument("empty batch");
  double total = 0.0;
  for (Eigen::Index i = 0; i < y_batch.size(); ++i) {
    total += mixture_log_density(params, y_batch(i));
  }
  return -total / static_cast<double>(y_batch.size());
}

double nll_loss(const MarginalMixtureModel& model, const VectorXd& y_batch) {
  if (y_batch.size() < 1) throw std::invalid_argument("empty batch");
  return model.nll(y_batch);
}

double nll_loss(const ConditionalMixtureModel& model, const MatrixXd& X,
                const VectorXd& y_batch) {
  if (y_batch.size() < 1) throw std::invalid_argument("empty batch");
  return model.nll(X, y_batch);
}

}  // namespace predlab
