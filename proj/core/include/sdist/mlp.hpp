#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "sdist/rng.hpp"
#include "sdist/sample_set.hpp"

namespace sdist::c2st {

struct MlpConfig {
  std::vector<std::size_t> hidden_sizes{100, 100};
  std::size_t epochs = 300;
  std::size_t batch_size = 200;  // clipped to the training-set size
  double learning_rate = 1e-3;
  double l2_penalty = 1e-4;

  void validate() const;
  std::string describe() const;
};

/// Fully connected binary classifier: ReLU hidden layers, one sigmoid output.
/// All weights and biases live in one flat parameter vector, layer by layer
/// (weights column-major in x out, then biases).
class Mlp {
 public:
  /// Glorot-uniform initialization.
  Mlp(std::size_t input_dim, std::vector<std::size_t> hidden_sizes, Rng& rng);

  std::size_t input_dim() const noexcept { return layer_sizes_.front(); }
  const std::vector<std::size_t>& layer_sizes() const noexcept { return layer_sizes_; }
  std::size_t parameter_count() const noexcept { return static_cast<std::size_t>(parameters_.size()); }
  const Vector& parameters() const noexcept { return parameters_; }
  void set_parameters(const Vector& parameters);

  Vector logits(const Matrix& features) const;
  /// P(label = 1) per row.
  Vector predict_proba(const Matrix& features) const;
  /// Hard labels, threshold 0.5.
  std::vector<int> predict(const Matrix& features) const;

  /// Mean binary cross-entropy on the batch plus 0.5 * l2 * sum(W^2) / batch,
  /// the L2 term covering weights but not biases. Writes d loss / d params
  /// into *gradient when it is non-null.
  double loss(const Matrix& features, const std::vector<int>& labels, double l2_penalty, Vector* gradient = nullptr) const;

 private:
  std::vector<std::size_t> layer_sizes_;
  std::vector<Eigen::Index> weight_offsets_;
  std::vector<Eigen::Index> bias_offsets_;
  Vector parameters_;
};

/// Mini-batch Adam on the cross-entropy objective; reshuffles every epoch.
/// Throws sdist::NumericalError if the loss stops being finite.
Mlp train_mlp(const Matrix& features, const std::vector<int>& labels, const MlpConfig& config, Rng& rng);

}  // namespace sdist::c2st
