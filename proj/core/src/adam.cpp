#include "sdist/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace sdist::fitting {

void AdamConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw std::invalid_argument("adam: learning rate must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw std::invalid_argument("adam: momentum coefficients must lie in [0, 1)");
  }
  if (!(epsilon > 0.0)) throw std::invalid_argument("adam: epsilon must be positive");
}

void adam_step(Vector& params, const Vector& grads, AdamState& state, const AdamConfig& config) {
  if (params.size() != grads.size()) throw std::invalid_argument("adam_step: parameter and gradient sizes differ");
  if (state.t == 0 && state.m.size() == 0) state = AdamState(static_cast<std::size_t>(params.size()));
  if (state.m.size() != params.size() || state.v.size() != params.size()) {
    throw std::invalid_argument("adam_step: optimizer state does not match the parameter size");
  }
  ++state.t;
  const double b1 = config.beta1, b2 = config.beta2;
  state.m = b1 * state.m + (1.0 - b1) * grads;
  state.v = b2 * state.v + (1.0 - b2) * grads.cwiseProduct(grads);
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.t));
  for (Eigen::Index i = 0; i < params.size(); ++i) {
    const double m_hat = state.m(i) / c1;
    const double v_hat = state.v(i) / c2;
    params(i) -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
  }
}

}  // namespace sdist::fitting
