#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sdist/rng.hpp"
#include "sdist/sample_set.hpp"

namespace sdist::wasserstein {

/// All distances here use the empirical expectation form
///   W_q = ( (1/N) sum_i |cost_i|^q )^(1/q)
/// so values are comparable across sample sizes.

/// Row i of X is transported to row assignment[i] of Y.
struct TransportPlan {
  std::vector<std::size_t> assignment;
  /// sum_i ||x_i - y_assignment[i]||^q (the unnormalized q-th power cost).
  double total_cost = 0.0;
};

struct ExactResult {
  double distance = 0.0;
  TransportPlan plan;
};

inline constexpr std::size_t kDefaultExactCap = 2000;
inline constexpr std::size_t kDefaultSlices = 100;

/// Exact 1D distance via order statistics, O(N log N). Inputs must have equal
/// length N >= 1; q >= 1.
double wasserstein_1d(std::span<const double> x, std::span<const double> y, double q = 2.0);

/// q-th power of wasserstein_1d, i.e. the mean matched cost before the root.
double wasserstein_1d_power(std::span<const double> x, std::span<const double> y, double q = 2.0);

/// Exact optimal assignment with Euclidean ground cost. O(N^3); N is capped.
ExactResult exact_wasserstein(const SampleSet& x, const SampleSet& y, double q = 2.0,
                              std::size_t max_samples = kDefaultExactCap);

/// l x d matrix of directions drawn uniformly on the unit sphere
/// (standard normal rows, normalized).
class SliceDirections {
 public:
  static SliceDirections draw(std::size_t slices, std::size_t dim, Rng& rng);
  /// Rows are normalized on entry.
  explicit SliceDirections(Matrix directions);

  const Matrix& directions() const noexcept { return directions_; }
  std::size_t count() const noexcept { return static_cast<std::size_t>(directions_.rows()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(directions_.cols()); }

 private:
  Matrix directions_;
};

struct SlicedResult {
  double distance = 0.0;            // (mean_s W_q^q)^(1/q)
  std::vector<double> slice_costs;  // W_q^q for every slice
  /// Standard error of mean(slice_costs); 0 for a single slice.
  double standard_error() const;
};

double sliced_wasserstein(const SampleSet& x, const SampleSet& y, double q, std::size_t slices, Rng& rng);
SlicedResult sliced_wasserstein_detail(const SampleSet& x, const SampleSet& y, double q,
                                       const SliceDirections& directions);

struct SlicedGradient {
  double value = 0.0;  // SW_2^2, the quantity differentiated
  Matrix gradient;     // d value / d x, same shape as x
};

/// SW_2^2 and its gradient with respect to the rows of x, for the directions
/// drawn from rng exactly as sliced_wasserstein would draw them. Sorting is
/// stable (value, then index), so at ties this is one valid subgradient.
SlicedGradient sliced_wasserstein_grad(const SampleSet& x, const SampleSet& y, std::size_t slices, Rng& rng);
SlicedGradient sliced_wasserstein_grad(const SampleSet& x, const SampleSet& y, const SliceDirections& directions);

}  // namespace sdist::wasserstein
