#include "sdist/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>

#include "sdist/adam.hpp"
#include "sdist/error.hpp"

namespace sdist::c2st {

namespace {

using ColMatrix = Eigen::MatrixXd;
using ConstMap = Eigen::Map<const ColMatrix>;

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }
double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void check_labels(const Matrix& features, const std::vector<int>& labels) {
  if (static_cast<std::size_t>(features.rows()) != labels.size()) {
    throw std::invalid_argument("mlp: feature rows and label count differ");
  }
  for (int l : labels) {
    if (l != 0 && l != 1) throw std::invalid_argument("mlp: labels must be 0 or 1");
  }
}

}  // namespace

void MlpConfig::validate() const {
  for (std::size_t h : hidden_sizes) {
    if (h < 1) throw std::invalid_argument("mlp: hidden layer sizes must be >= 1");
  }
  if (epochs < 1) throw std::invalid_argument("mlp: epochs must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("mlp: batch_size must be >= 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw std::invalid_argument("mlp: learning_rate must be positive");
  if (!(l2_penalty >= 0.0) || !std::isfinite(l2_penalty)) throw std::invalid_argument("mlp: l2_penalty must be >= 0");
}

std::string MlpConfig::describe() const {
  std::ostringstream out;
  out << "mlp(hidden=";
  for (std::size_t i = 0; i < hidden_sizes.size(); ++i) out << (i ? "x" : "") << hidden_sizes[i];
  out << ";epochs=" << epochs << ";batch=" << batch_size << ";lr=" << learning_rate << ";l2=" << l2_penalty << ')';
  return out.str();
}

Mlp::Mlp(std::size_t input_dim, std::vector<std::size_t> hidden_sizes, Rng& rng) {
  if (input_dim < 1) throw std::invalid_argument("mlp: input dimension must be >= 1");
  layer_sizes_.push_back(input_dim);
  for (std::size_t h : hidden_sizes) {
    if (h < 1) throw std::invalid_argument("mlp: hidden layer sizes must be >= 1");
    layer_sizes_.push_back(h);
  }
  layer_sizes_.push_back(1);

  Eigen::Index offset = 0;
  for (std::size_t l = 0; l + 1 < layer_sizes_.size(); ++l) {
    const auto in = static_cast<Eigen::Index>(layer_sizes_[l]);
    const auto out = static_cast<Eigen::Index>(layer_sizes_[l + 1]);
    weight_offsets_.push_back(offset);
    offset += in * out;
    bias_offsets_.push_back(offset);
    offset += out;
  }
  parameters_ = Vector::Zero(offset);
  for (std::size_t l = 0; l + 1 < layer_sizes_.size(); ++l) {
    const auto in = static_cast<double>(layer_sizes_[l]);
    const auto out = static_cast<double>(layer_sizes_[l + 1]);
    const double limit = std::sqrt(6.0 / (in + out));
    for (Eigen::Index i = weight_offsets_[l]; i < bias_offsets_[l]; ++i) parameters_(i) = limit * (2.0 * rng.uniform() - 1.0);
  }
}

void Mlp::set_parameters(const Vector& parameters) {
  if (parameters.size() != parameters_.size()) throw std::invalid_argument("mlp: parameter vector has the wrong size");
  parameters_ = parameters;
}

Vector Mlp::logits(const Matrix& features) const {
  if (static_cast<std::size_t>(features.cols()) != input_dim()) throw std::invalid_argument("mlp: feature dimension mismatch");
  ColMatrix h = features;
  for (std::size_t l = 0; l + 1 < layer_sizes_.size(); ++l) {
    const auto in = static_cast<Eigen::Index>(layer_sizes_[l]);
    const auto out = static_cast<Eigen::Index>(layer_sizes_[l + 1]);
    ConstMap w(parameters_.data() + weight_offsets_[l], in, out);
    Eigen::Map<const Eigen::RowVectorXd> b(parameters_.data() + bias_offsets_[l], out);
    ColMatrix z = h * w;
    z.rowwise() += b;
    if (l + 2 < layer_sizes_.size()) {
      h = z.cwiseMax(0.0);
    } else {
      return z.col(0);
    }
  }
  return {};
}

Vector Mlp::predict_proba(const Matrix& features) const { return logits(features).unaryExpr(&sigmoid); }

std::vector<int> Mlp::predict(const Matrix& features) const {
  const Vector z = logits(features);
  std::vector<int> out(static_cast<std::size_t>(z.size()));
  for (Eigen::Index i = 0; i < z.size(); ++i) out[static_cast<std::size_t>(i)] = z(i) > 0.0 ? 1 : 0;
  return out;
}

double Mlp::loss(const Matrix& features, const std::vector<int>& labels, double l2_penalty, Vector* gradient) const {
  check_labels(features, labels);
  if (features.rows() < 1) throw std::invalid_argument("mlp: empty batch");
  if (static_cast<std::size_t>(features.cols()) != input_dim()) throw std::invalid_argument("mlp: feature dimension mismatch");
  const std::size_t layers = layer_sizes_.size() - 1;
  const auto batch = static_cast<double>(features.rows());

  std::vector<ColMatrix> acts;  // acts[l] is the input to layer l
  acts.reserve(layers + 1);
  acts.emplace_back(features);
  for (std::size_t l = 0; l < layers; ++l) {
    const auto in = static_cast<Eigen::Index>(layer_sizes_[l]);
    const auto out = static_cast<Eigen::Index>(layer_sizes_[l + 1]);
    ConstMap w(parameters_.data() + weight_offsets_[l], in, out);
    Eigen::Map<const Eigen::RowVectorXd> b(parameters_.data() + bias_offsets_[l], out);
    ColMatrix z = acts[l] * w;
    z.rowwise() += b;
    if (l + 1 < layers) z = z.cwiseMax(0.0);
    acts.push_back(std::move(z));
  }
  const ColMatrix& z_out = acts.back();

  double data_loss = 0.0;
  for (Eigen::Index i = 0; i < z_out.rows(); ++i) {
    const double z = z_out(i, 0);
    data_loss += softplus(z) - labels[static_cast<std::size_t>(i)] * z;
  }
  data_loss /= batch;
  double weight_sq = 0.0;
  for (std::size_t l = 0; l < layers; ++l) {
    weight_sq += parameters_.segment(weight_offsets_[l], bias_offsets_[l] - weight_offsets_[l]).squaredNorm();
  }
  const double total = data_loss + 0.5 * l2_penalty * weight_sq / batch;
  if (gradient == nullptr) return total;

  gradient->setZero(parameters_.size());
  ColMatrix delta(z_out.rows(), 1);
  for (Eigen::Index i = 0; i < z_out.rows(); ++i) {
    delta(i, 0) = (sigmoid(z_out(i, 0)) - labels[static_cast<std::size_t>(i)]) / batch;
  }
  for (std::size_t l = layers; l-- > 0;) {
    const auto in = static_cast<Eigen::Index>(layer_sizes_[l]);
    const auto out = static_cast<Eigen::Index>(layer_sizes_[l + 1]);
    ConstMap w(parameters_.data() + weight_offsets_[l], in, out);
    Eigen::Map<ColMatrix> gw(gradient->data() + weight_offsets_[l], in, out);
    Eigen::Map<Eigen::RowVectorXd> gb(gradient->data() + bias_offsets_[l], out);
    gw.noalias() = acts[l].transpose() * delta;
    gw += (l2_penalty / batch) * w;
    gb = delta.colwise().sum();
    if (l > 0) {
      ColMatrix upstream = delta * w.transpose();
      delta = upstream.cwiseProduct((acts[l].array() > 0.0).cast<double>().matrix());
    }
  }
  return total;
}

Mlp train_mlp(const Matrix& features, const std::vector<int>& labels, const MlpConfig& config, Rng& rng) {
  config.validate();
  check_labels(features, labels);
  if (features.rows() < 2) throw std::invalid_argument("train_mlp: need at least 2 samples");
  const bool has0 = std::find(labels.begin(), labels.end(), 0) != labels.end();
  const bool has1 = std::find(labels.begin(), labels.end(), 1) != labels.end();
  if (!has0 || !has1) throw std::invalid_argument("train_mlp: both labels must be present");

  Mlp net(static_cast<std::size_t>(features.cols()), config.hidden_sizes, rng);
  const std::size_t n = labels.size();
  const std::size_t batch = std::min(config.batch_size, n);
  fitting::AdamConfig adam;
  adam.learning_rate = config.learning_rate;
  fitting::AdamState state(net.parameter_count());

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Matrix xb;
  std::vector<int> yb;
  Vector grad;
  Vector params = net.parameters();
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order.begin(), order.end());
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t count = std::min(batch, n - start);
      xb.resize(static_cast<Eigen::Index>(count), features.cols());
      yb.resize(count);
      for (std::size_t r = 0; r < count; ++r) {
        xb.row(static_cast<Eigen::Index>(r)) = features.row(static_cast<Eigen::Index>(order[start + r]));
        yb[r] = labels[order[start + r]];
      }
      const double value = net.loss(xb, yb, config.l2_penalty, &grad);
      if (!std::isfinite(value) || !grad.allFinite()) {
        throw NumericalError("train_mlp: non-finite loss at epoch " + std::to_string(epoch) +
                             "; try a smaller learning_rate");
      }
      adam_step(params, grad, state, adam);
      net.set_parameters(params);
    }
  }
  return net;
}

}  // namespace sdist::c2st
