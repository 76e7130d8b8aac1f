#pragma once

#include <cstddef>

#include "sdist/sample_set.hpp"

namespace sdist::fitting {

struct AdamConfig {
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void validate() const;
};

/// First and second moment estimates plus the step counter.
struct AdamState {
  AdamState() = default;
  explicit AdamState(std::size_t size) : m(Vector::Zero(static_cast<Eigen::Index>(size))), v(m), t(0) {}

  Vector m;
  Vector v;
  std::size_t t = 0;
};

/// One bias-corrected Adam update, applied in place:
///   m <- b1 m + (1-b1) g,  v <- b2 v + (1-b2) g^2,
///   p <- p - lr * (m / (1-b1^t)) / (sqrt(v / (1-b2^t)) + eps)
void adam_step(Vector& params, const Vector& grads, AdamState& state, const AdamConfig& config = {});

}  // namespace sdist::fitting
