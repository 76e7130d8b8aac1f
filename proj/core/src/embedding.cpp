#include "sdist/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sdist/linalg.hpp"
#include "sdist/mmd.hpp"

namespace sdist::embedding {

GaussianMoments fit_moments(const SampleSet& embeddings) {
  if (embeddings.n() < 2) throw std::invalid_argument("fit_moments: need at least 2 samples");
  GaussianMoments m;
  m.n = embeddings.n();
  m.mean = embeddings.column_means();
  const Matrix centered = embeddings.data().rowwise() - m.mean.transpose();
  SquareMatrix cov = centered.transpose() * centered;
  cov /= static_cast<double>(m.n - 1);
  m.covariance = linalg::symmetrize(cov);
  return m;
}

double frechet_distance(const GaussianMoments& a, const GaussianMoments& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("frechet_distance: dimension mismatch");
  const SquareMatrix root_a = linalg::sqrt_psd(a.covariance);
  const SquareMatrix inner = linalg::symmetrize(root_a * b.covariance * root_a);
  const Vector lambda = linalg::eigh(inner).values;
  double cross = 0.0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) cross += std::sqrt(std::max(lambda(i), 0.0));
  const double value = (a.mean - b.mean).squaredNorm() + a.covariance.trace() + b.covariance.trace() - 2.0 * cross;
  return std::max(value, 0.0);
}

double frechet_distance(const SampleSet& x, const SampleSet& y) {
  require_same_dimension(x, y, "frechet_distance");
  return frechet_distance(fit_moments(x), fit_moments(y));
}

mmd::KernelSpec default_kid_kernel(std::size_t dim) {
  if (dim < 1) throw std::invalid_argument("default_kid_kernel: dimension must be >= 1");
  return mmd::KernelSpec::polynomial(3.0, 1.0, 1.0 / static_cast<double>(dim));
}

double kid(const SampleSet& x, const SampleSet& y, const mmd::KernelSpec& kernel) {
  return mmd::mmd2_unbiased(x, y, kernel).mmd_squared;
}

double kid(const SampleSet& x, const SampleSet& y) { return kid(x, y, default_kid_kernel(x.d())); }

std::string moment_warning(const GaussianMoments& a, const GaussianMoments& b) {
  if (!a.rank_deficient() && !b.rank_deficient()) return {};
  return "n=" + std::to_string(std::min(a.n, b.n)) + " <= d=" + std::to_string(a.dim()) +
         ": covariance estimate is rank deficient";
}

}  // namespace sdist::embedding
