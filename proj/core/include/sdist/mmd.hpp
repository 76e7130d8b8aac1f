#pragma once

#include <cstddef>

#include "sdist/kernels.hpp"
#include "sdist/sample_set.hpp"

namespace sdist::mmd {

struct MmdEstimate {
  double mmd_squared = 0.0;  // unbiased; can be negative
  KernelSpec kernel = KernelSpec::linear();
  std::size_t m = 0;
  std::size_t n = 0;
};

/// Unbiased estimator
///   1/(m(m-1)) sum_{i!=j} k(x_i,x_j) + 1/(n(n-1)) sum_{i!=j} k(y_i,y_j) - 2/(mn) sum_{i,j} k(x_i,y_j).
/// Arguments are put into a canonical order before summation, so swapping
/// x and y gives a bit-identical result. Requires m, n >= 2.
MmdEstimate mmd2_unbiased(const SampleSet& x, const SampleSet& y, const KernelSpec& kernel);

enum class FeatureMap { identity, quadratic };

/// Explicit feature-map MMD for one-dimensional sets, using biased (1/N)
/// plug-in moments:
///   identity   (mu_x - mu_y)^2
///   quadratic  (mu_x - mu_y)^2 + (E_x[x^2] - E_y[y^2])^2
double mmd2_feature(const SampleSet& x, const SampleSet& y, FeatureMap feature);

/// Median Euclidean distance over all unordered pairs of the pooled sample
/// (mean of the two central values when the pair count is even). Throws
/// sdist::NumericalError("degenerate bandwidth ...") when the median is 0.
double median_heuristic(const SampleSet& x, const SampleSet& y);

/// Unnormalized witness mean_i k(x_i, u) - mean_j k(y_j, u).
double witness(const SampleSet& x, const SampleSet& y, const KernelSpec& kernel,
               const Eigen::Ref<const Eigen::RowVectorXd>& u);

struct MmdGradient {
  double value = 0.0;  // mmd2_unbiased(x, y, kernel)
  Matrix gradient;     // d value / d x
};

/// Analytic gradient of the unbiased estimator with respect to the rows of x.
/// Gaussian kernel only.
MmdGradient mmd2_grad(const SampleSet& x, const SampleSet& y, const KernelSpec& kernel);

}  // namespace sdist::mmd
