#pragma once

#include <cstddef>
#include <string>

#include "sdist/kernels.hpp"
#include "sdist/sample_set.hpp"

namespace sdist::embedding {

// Embedding sets are plain SampleSets whose rows are precomputed feature
// vectors; the set's label can carry the name of the embedding network.

struct GaussianMoments {
  Vector mean;
  SquareMatrix covariance;  // unbiased, symmetrized
  std::size_t n = 0;

  std::size_t dim() const noexcept { return static_cast<std::size_t>(mean.size()); }
  /// The sample covariance cannot have full rank when n <= d.
  bool rank_deficient() const noexcept { return n <= dim(); }
};

/// Column means and (n-1)-normalized covariance. Requires n >= 2.
GaussianMoments fit_moments(const SampleSet& embeddings);

/// |mu_a - mu_b|^2 + Tr(S_a + S_b) - 2 Tr((S_a^{1/2} S_b S_a^{1/2})^{1/2}),
/// with square roots from symmetric eigendecompositions, negative eigenvalue
/// noise clamped to 0 and the result floored at 0.
double frechet_distance(const GaussianMoments& a, const GaussianMoments& b);

/// Convenience: frechet_distance(fit_moments(x), fit_moments(y)).
double frechet_distance(const SampleSet& x, const SampleSet& y);

/// Polynomial kernel (x.y / d + 1)^3, the usual KID choice.
mmd::KernelSpec default_kid_kernel(std::size_t dim);

/// Unbiased MMD^2 in embedding space; identical to mmd::mmd2_unbiased.
double kid(const SampleSet& x, const SampleSet& y, const mmd::KernelSpec& kernel);
double kid(const SampleSet& x, const SampleSet& y);

/// Empty when fine; otherwise a short note about rank-deficient covariances.
std::string moment_warning(const GaussianMoments& a, const GaussianMoments& b);

}  // namespace sdist::embedding
