#pragma once

#include <string>

#include <Eigen/Core>

namespace sdist::mmd {

enum class KernelFamily { gaussian, laplacian, linear, polynomial, energy };

/// A validated kernel family plus its hyperparameters. Construct through the
/// named factories; each checks its parameters.
///
///   gaussian    exp(-|x-y|^2 / (2 sigma^2))
///   laplacian   exp(-|x-y|_1 / sigma)
///   linear      x.y
///   polynomial  (scale * x.y + offset)^degree
///   energy      |x|^p + |y|^p - |x-y|^p   (Euclidean norms)
class KernelSpec {
 public:
  static KernelSpec gaussian(double bandwidth);
  static KernelSpec laplacian(double bandwidth);
  static KernelSpec linear();
  static KernelSpec polynomial(double degree = 3.0, double offset = 1.0, double scale = 1.0);
  static KernelSpec energy(double power = 1.0);

  KernelFamily family() const noexcept { return family_; }
  double bandwidth() const noexcept { return bandwidth_; }
  double degree() const noexcept { return degree_; }
  double offset() const noexcept { return offset_; }
  double scale() const noexcept { return scale_; }
  double power() const noexcept { return power_; }

  /// Same family and parameters, different bandwidth (gaussian/laplacian only).
  KernelSpec with_bandwidth(double bandwidth) const;

  double operator()(const Eigen::Ref<const Eigen::RowVectorXd>& a, const Eigen::Ref<const Eigen::RowVectorXd>& b) const;

  /// Short human-readable form, e.g. "gaussian(sigma=5)".
  std::string describe() const;

  friend bool operator==(const KernelSpec&, const KernelSpec&) = default;

 private:
  KernelSpec() = default;

  KernelFamily family_ = KernelFamily::linear;
  double bandwidth_ = 0.0;
  double degree_ = 0.0;
  double offset_ = 0.0;
  double scale_ = 1.0;
  double power_ = 0.0;
};

std::string to_string(KernelFamily family);
/// Throws std::invalid_argument for unknown names.
KernelFamily parse_kernel_family(const std::string& name);

}  // namespace sdist::mmd
