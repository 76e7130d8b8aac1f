#include "sdist/mmd.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "kernel_blocks.hpp"
#include "sdist/error.hpp"

namespace sdist::mmd {

namespace {

void require_two(const SampleSet& s, const char* name) {
  if (s.n() < 2) {
    throw std::invalid_argument(std::string("mmd2_unbiased: ") + name +
                                " needs at least 2 samples (the estimator excludes the diagonal)");
  }
}

double mean_squares(const SampleSet& s) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < s.data().rows(); ++i) total += s.data()(i, 0) * s.data()(i, 0);
  return total / static_cast<double>(s.n());
}

// Exact median of all pairwise distances without materializing them when the
// pair count is large: one histogram pass locates the bins holding the
// central ranks, a second pass collects only those bins.
double median_pair_distance(const Matrix& pool) {
  const Vector norms = detail::row_squared_norms(pool);
  const auto p = static_cast<std::uint64_t>(pool.rows());
  const std::uint64_t pairs = p * (p - 1) / 2;
  const std::uint64_t hi_rank = pairs / 2;
  const std::uint64_t lo_rank = (pairs % 2 == 0) ? hi_rank - 1 : hi_rank;

  constexpr std::uint64_t kCollectAll = std::uint64_t{1} << 22;
  if (pairs <= kCollectAll) {
    std::vector<double> all;
    all.reserve(pairs);
    detail::for_each_pair_distance(pool, norms, [&](double dist) { all.push_back(dist); });
    std::nth_element(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(hi_rank), all.end());
    const double hi = all[hi_rank];
    if (lo_rank == hi_rank) return hi;
    const double lo = *std::max_element(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(hi_rank));
    return 0.5 * (lo + hi);
  }

  // Every pairwise distance is at most twice the largest distance to row 0.
  double radius = 0.0;
  for (Eigen::Index i = 1; i < pool.rows(); ++i) radius = std::max(radius, (pool.row(i) - pool.row(0)).norm());
  const double bound = 2.0 * radius;
  if (!(bound > 0.0)) return 0.0;
  constexpr std::size_t kBins = 65536;
  const double inv_width = static_cast<double>(kBins) / bound;
  auto bin_of = [&](double dist) {
    const double pos = dist * inv_width;
    return pos >= static_cast<double>(kBins - 1) ? kBins - 1 : static_cast<std::size_t>(pos);
  };
  std::vector<std::uint64_t> counts(kBins, 0);
  detail::for_each_pair_distance(pool, norms, [&](double dist) { ++counts[bin_of(dist)]; });

  std::array<std::uint64_t, 2> ranks{lo_rank, hi_rank};
  std::array<std::size_t, 2> bins{};
  std::array<std::uint64_t, 2> below{};
  {
    std::uint64_t cumulative = 0;
    std::size_t r = 0;
    for (std::size_t b = 0; b < kBins && r < 2; ++b) {
      while (r < 2 && ranks[r] < cumulative + counts[b]) {
        bins[r] = b;
        below[r] = cumulative;
        ++r;
      }
      cumulative += counts[b];
    }
  }
  std::vector<double> lo_bin, hi_bin;
  detail::for_each_pair_distance(pool, norms, [&](double dist) {
    const std::size_t b = bin_of(dist);
    if (b == bins[0]) lo_bin.push_back(dist);
    if (b == bins[1] && bins[1] != bins[0]) hi_bin.push_back(dist);
  });
  auto select = [](std::vector<double>& v, std::uint64_t k) {
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
    return v[k];
  };
  const double lo = select(lo_bin, ranks[0] - below[0]);
  const double hi = bins[1] == bins[0] ? select(lo_bin, ranks[1] - below[1]) : select(hi_bin, ranks[1] - below[1]);
  return 0.5 * (lo + hi);
}

}  // namespace

MmdEstimate mmd2_unbiased(const SampleSet& x, const SampleSet& y, const KernelSpec& kernel) {
  require_same_dimension(x, y, "mmd2_unbiased");
  require_two(x, "x");
  require_two(y, "y");
  const bool swap = detail::canonical_less(y.data(), x.data());
  const Matrix& a = swap ? y.data() : x.data();
  const Matrix& b = swap ? x.data() : y.data();
  const Vector na = detail::row_squared_norms(a);
  const Vector nb = detail::row_squared_norms(b);
  const auto m = static_cast<double>(a.rows());
  const auto n = static_cast<double>(b.rows());
  const double saa = detail::off_diagonal_sum(kernel, a, na);
  const double sbb = detail::off_diagonal_sum(kernel, b, nb);
  const double sab = detail::cross_sum(kernel, a, na, b, nb);

  MmdEstimate est;
  est.mmd_squared = saa / (m * (m - 1.0)) + sbb / (n * (n - 1.0)) - 2.0 * sab / (m * n);
  est.kernel = kernel;
  est.m = x.n();
  est.n = y.n();
  return est;
}

double mmd2_feature(const SampleSet& x, const SampleSet& y, FeatureMap feature) {
  if (x.d() != 1 || y.d() != 1) throw std::invalid_argument("mmd2_feature: only one-dimensional sets are supported");
  const double dm = x.column_means()(0) - y.column_means()(0);
  double value = dm * dm;
  if (feature == FeatureMap::quadratic) {
    const double ds = mean_squares(x) - mean_squares(y);
    value += ds * ds;
  }
  return value;
}

double median_heuristic(const SampleSet& x, const SampleSet& y) {
  require_same_dimension(x, y, "median_heuristic");
  const bool swap = detail::canonical_less(y.data(), x.data());
  const Matrix& a = swap ? y.data() : x.data();
  const Matrix& b = swap ? x.data() : y.data();
  Matrix pool(a.rows() + b.rows(), a.cols());
  pool.topRows(a.rows()) = a;
  pool.bottomRows(b.rows()) = b;
  const double sigma = median_pair_distance(pool);
  if (!(sigma > 0.0)) {
    throw NumericalError("degenerate bandwidth: the median pairwise distance of the pooled sample is 0");
  }
  return sigma;
}

double witness(const SampleSet& x, const SampleSet& y, const KernelSpec& kernel,
               const Eigen::Ref<const Eigen::RowVectorXd>& u) {
  require_same_dimension(x, y, "witness");
  if (static_cast<std::size_t>(u.size()) != x.d()) throw std::invalid_argument("witness: evaluation point dimension mismatch");
  double fx = 0.0, fy = 0.0;
  for (std::size_t i = 0; i < x.n(); ++i) fx += kernel(x.row(i), u);
  for (std::size_t j = 0; j < y.n(); ++j) fy += kernel(y.row(j), u);
  return fx / static_cast<double>(x.n()) - fy / static_cast<double>(y.n());
}

MmdGradient mmd2_grad(const SampleSet& x, const SampleSet& y, const KernelSpec& kernel) {
  if (kernel.family() != KernelFamily::gaussian) throw std::invalid_argument("mmd2_grad: only the gaussian kernel is supported");
  require_same_dimension(x, y, "mmd2_grad");
  require_two(x, "x");
  require_two(y, "y");

  const Matrix& a = x.data();
  const Matrix& b = y.data();
  const Vector na = detail::row_squared_norms(a);
  const Vector nb = detail::row_squared_norms(b);
  const Eigen::Index m = a.rows(), n = b.rows();
  const double inv_s2 = 1.0 / (kernel.bandwidth() * kernel.bandwidth());
  const double wxx = -2.0 / (static_cast<double>(m) * static_cast<double>(m - 1)) * inv_s2;
  const double wxy = 2.0 / (static_cast<double>(m) * static_cast<double>(n)) * inv_s2;

  // G_a = sum_j W(a,j) (x_a - z_j) accumulated block by block.
  Matrix grad = Matrix::Zero(m, a.cols());
  Vector row_weight = Vector::Zero(m);
  SquareMatrix block;
  double sxx = 0.0, sxy = 0.0;
  for (Eigen::Index i0 = 0; i0 < m; i0 += detail::kBlock) {
    const Eigen::Index ni = std::min(detail::kBlock, m - i0);
    for (Eigen::Index j0 = 0; j0 < m; j0 += detail::kBlock) {
      const Eigen::Index nj = std::min(detail::kBlock, m - j0);
      detail::kernel_block(kernel, a, na, i0, ni, a, na, j0, nj, block);
      if (i0 == j0) block.diagonal().setZero();
      sxx += block.sum();
      block *= wxx;
      row_weight.segment(i0, ni) += block.rowwise().sum();
      grad.middleRows(i0, ni).noalias() -= block * a.middleRows(j0, nj);
    }
    for (Eigen::Index j0 = 0; j0 < n; j0 += detail::kBlock) {
      const Eigen::Index nj = std::min(detail::kBlock, n - j0);
      detail::kernel_block(kernel, a, na, i0, ni, b, nb, j0, nj, block);
      sxy += block.sum();
      block *= wxy;
      row_weight.segment(i0, ni) += block.rowwise().sum();
      grad.middleRows(i0, ni).noalias() -= block * b.middleRows(j0, nj);
    }
  }
  grad += row_weight.asDiagonal() * a;

  MmdGradient out;
  const double syy = detail::off_diagonal_sum(kernel, b, nb);
  const auto md = static_cast<double>(m), nd = static_cast<double>(n);
  out.value = sxx / (md * (md - 1.0)) + syy / (nd * (nd - 1.0)) - 2.0 * sxy / (md * nd);
  out.gradient = std::move(grad);
  return out;
}

}  // namespace sdist::mmd
