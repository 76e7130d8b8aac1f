#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "sdist/rng.hpp"
#include "sdist/sample_set.hpp"

namespace sdist {

/// Multivariate normal N(mean, covariance) with a cached lower Cholesky factor.
///
/// The covariance is symmetrized and PSD-repaired on construction (eigenvalues
/// within -1e-10 * lambda_max of zero are clamped). Singular covariances are
/// allowed for sampling; log_density on them throws.
class GaussianModel {
 public:
  GaussianModel(Vector mean, SquareMatrix covariance);

  /// Direct construction from a lower-triangular factor; covariance = L L^T.
  static GaussianModel from_cholesky(Vector mean, SquareMatrix lower);
  static GaussianModel standard(std::size_t dim);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(mean_.size()); }
  const Vector& mean() const noexcept { return mean_; }
  const SquareMatrix& covariance() const noexcept { return covariance_; }
  const SquareMatrix& cholesky() const noexcept { return cholesky_; }
  bool singular() const noexcept { return singular_; }

  /// Draws x = mean + L eps for each row of `noise` (standard normal draws).
  Matrix transform(const Matrix& noise) const;

  double log_density(const Eigen::Ref<const Vector>& x) const;
  /// log density of every row of `points`.
  Vector log_density_rows(const Matrix& points) const;

 private:
  GaussianModel() = default;
  void finish();

  Vector mean_;
  SquareMatrix covariance_;
  SquareMatrix cholesky_;
  double log_norm_ = 0.0;  // -0.5 * (d log 2pi + log det)
  bool singular_ = false;
};

/// Finite mixture sum_k w_k N(mu_k, Sigma_k).
class MixtureModel {
 public:
  /// Weights must be nonnegative and sum to 1 within 1e-12.
  MixtureModel(std::vector<double> weights, std::vector<GaussianModel> components);

  std::size_t dim() const noexcept { return components_.front().dim(); }
  std::size_t size() const noexcept { return components_.size(); }
  const std::vector<double>& weights() const noexcept { return weights_; }
  const std::vector<GaussianModel>& components() const noexcept { return components_; }

  Vector mean() const;
  SquareMatrix covariance() const;

  double log_density(const Eigen::Ref<const Vector>& x) const;
  Vector log_density_rows(const Matrix& points) const;

 private:
  std::vector<double> weights_;
  std::vector<GaussianModel> components_;
};

using DistributionModel = std::variant<GaussianModel, MixtureModel>;

/// Builds a mixture from raw parameters; covariance failures name the component.
MixtureModel make_mixture(std::vector<double> weights, const std::vector<Vector>& means,
                          const std::vector<SquareMatrix>& covariances);

SampleSet sample(const GaussianModel& model, std::size_t n, Rng& rng);
SampleSet sample(const MixtureModel& model, std::size_t n, Rng& rng);
SampleSet sample(const DistributionModel& model, std::size_t n, Rng& rng);

double log_density(const DistributionModel& model, const Eigen::Ref<const Vector>& x);
Vector log_density_rows(const DistributionModel& model, const Matrix& points);
std::size_t dim(const DistributionModel& model);
Vector model_mean(const DistributionModel& model);
SquareMatrix model_covariance(const DistributionModel& model);

/// Gaussian with the same first two moments as `mixture`.
GaussianModel moment_matched_gaussian(const MixtureModel& mixture);

/// Reference "2d-MoG": three equally weighted components with means on the
/// circle of radius 2 (angles 90, 210 and 330 degrees) and covariance 0.3 I.
MixtureModel canonical_mog2d();

}  // namespace sdist
