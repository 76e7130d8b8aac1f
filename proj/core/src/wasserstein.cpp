#include "sdist/wasserstein.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>
#include <stdexcept>
#include <string>

#include "sdist/assignment.hpp"

namespace sdist::wasserstein {

namespace {

void check_order(double q) {
  if (!(q >= 1.0) || !std::isfinite(q)) throw std::invalid_argument("wasserstein: order q must be >= 1");
}

double power(double a, double q) {
  if (q == 1.0) return a;
  if (q == 2.0) return a * a;
  return std::pow(a, q);
}

double root(double a, double q) {
  if (q == 1.0) return a;
  if (q == 2.0) return std::sqrt(a);
  return std::pow(a, 1.0 / q);
}

// Permutation sorting `values` ascending; ties keep index order.
void argsort(const double* values, std::size_t n, std::vector<std::pair<double, std::size_t>>& scratch,
             std::vector<std::size_t>& order) {
  scratch.resize(n);
  for (std::size_t i = 0; i < n; ++i) scratch[i] = {values[i], i};
  std::sort(scratch.begin(), scratch.end());
  order.resize(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = scratch[i].second;
}

void check_pair(const SampleSet& x, const SampleSet& y, std::string_view op) {
  require_same_dimension(x, y, op);
  require_same_size(x, y, op);
}

}  // namespace

double wasserstein_1d_power(std::span<const double> x, std::span<const double> y, double q) {
  check_order(q);
  if (x.size() != y.size()) {
    throw std::invalid_argument("wasserstein_1d: sample counts differ (" + std::to_string(x.size()) + " vs " +
                                std::to_string(y.size()) + ")");
  }
  if (x.empty()) throw std::invalid_argument("wasserstein_1d: empty input");
  std::vector<double> xs(x.begin(), x.end()), ys(y.begin(), y.end());
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  double total = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) total += power(std::abs(xs[i] - ys[i]), q);
  return total / static_cast<double>(xs.size());
}

double wasserstein_1d(std::span<const double> x, std::span<const double> y, double q) {
  return root(wasserstein_1d_power(x, y, q), q);
}

ExactResult exact_wasserstein(const SampleSet& x, const SampleSet& y, double q, std::size_t max_samples) {
  check_order(q);
  check_pair(x, y, "exact_wasserstein");
  const std::size_t n = x.n();
  if (n > max_samples) {
    throw std::invalid_argument("exact_wasserstein: N = " + std::to_string(n) + " exceeds the cap of " +
                                std::to_string(max_samples) + " (cost is O(N^3)); use sliced_wasserstein");
  }
  const auto ni = static_cast<Eigen::Index>(n);
  SquareMatrix cost(ni, ni);
  for (Eigen::Index i = 0; i < ni; ++i) {
    for (Eigen::Index j = 0; j < ni; ++j) cost(i, j) = power((x.data().row(i) - y.data().row(j)).norm(), q);
  }
  Assignment a = solve_assignment(cost);
  ExactResult result;
  result.plan.assignment = std::move(a.row_to_col);
  result.plan.total_cost = a.cost;
  result.distance = root(a.cost / static_cast<double>(n), q);
  return result;
}

SliceDirections::SliceDirections(Matrix directions) : directions_(std::move(directions)) {
  if (directions_.rows() < 1 || directions_.cols() < 1) {
    throw std::invalid_argument("SliceDirections: need at least one direction");
  }
  for (Eigen::Index s = 0; s < directions_.rows(); ++s) {
    const double norm = directions_.row(s).norm();
    if (!(norm > 0.0)) throw std::invalid_argument("SliceDirections: zero direction");
    directions_.row(s) /= norm;
  }
}

SliceDirections SliceDirections::draw(std::size_t slices, std::size_t dim, Rng& rng) {
  if (slices < 1) throw std::invalid_argument("sliced_wasserstein: slice count must be >= 1");
  if (dim < 1) throw std::invalid_argument("sliced_wasserstein: dimension must be >= 1");
  Matrix raw = standard_normal_matrix(static_cast<Eigen::Index>(slices), static_cast<Eigen::Index>(dim), rng);
  for (Eigen::Index s = 0; s < raw.rows(); ++s) {
    // A zero draw has probability zero; redraw rather than divide by it.
    while (raw.row(s).squaredNorm() == 0.0) {
      for (Eigen::Index j = 0; j < raw.cols(); ++j) raw(s, j) = rng.normal();
    }
  }
  return SliceDirections(std::move(raw));
}

double SlicedResult::standard_error() const {
  const std::size_t l = slice_costs.size();
  if (l < 2) return 0.0;
  const double mean = std::accumulate(slice_costs.begin(), slice_costs.end(), 0.0) / static_cast<double>(l);
  double ss = 0.0;
  for (double c : slice_costs) ss += (c - mean) * (c - mean);
  return std::sqrt(ss / static_cast<double>(l - 1) / static_cast<double>(l));
}

namespace {

// Column s holds the projections onto direction s; contiguous per slice.
SquareMatrix project(const SampleSet& set, const SliceDirections& directions) {
  return set.data() * directions.directions().transpose();
}

}  // namespace

SlicedResult sliced_wasserstein_detail(const SampleSet& x, const SampleSet& y, double q,
                                       const SliceDirections& directions) {
  check_order(q);
  check_pair(x, y, "sliced_wasserstein");
  if (directions.dim() != x.d()) throw std::invalid_argument("sliced_wasserstein: direction dimension mismatch");
  const SquareMatrix px = project(x, directions);
  const SquareMatrix py = project(y, directions);
  const std::size_t n = x.n();
  SlicedResult result;
  result.slice_costs.resize(directions.count());
  std::vector<double> a(n), b(n);
  double total = 0.0;
  for (std::size_t s = 0; s < directions.count(); ++s) {
    const auto col = static_cast<Eigen::Index>(s);
    std::copy(px.col(col).data(), px.col(col).data() + n, a.begin());
    std::copy(py.col(col).data(), py.col(col).data() + n, b.begin());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double c = 0.0;
    for (std::size_t i = 0; i < n; ++i) c += power(std::abs(a[i] - b[i]), q);
    c /= static_cast<double>(n);
    result.slice_costs[s] = c;
    total += c;
  }
  result.distance = root(total / static_cast<double>(directions.count()), q);
  return result;
}

double sliced_wasserstein(const SampleSet& x, const SampleSet& y, double q, std::size_t slices, Rng& rng) {
  check_pair(x, y, "sliced_wasserstein");
  const SliceDirections dirs = SliceDirections::draw(slices, x.d(), rng);
  return sliced_wasserstein_detail(x, y, q, dirs).distance;
}

SlicedGradient sliced_wasserstein_grad(const SampleSet& x, const SampleSet& y, const SliceDirections& directions) {
  check_pair(x, y, "sliced_wasserstein_grad");
  if (directions.dim() != x.d()) throw std::invalid_argument("sliced_wasserstein_grad: direction dimension mismatch");
  const SquareMatrix px = project(x, directions);
  const SquareMatrix py = project(y, directions);
  const std::size_t n = x.n();
  const std::size_t l = directions.count();
  // residual(i, s) = u_s^T x_i - u_s^T y_match(i)
  SquareMatrix residual(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(l));
  std::vector<std::size_t> ox, oy;
  std::vector<std::pair<double, std::size_t>> scratch;
  double total = 0.0;
  for (std::size_t s = 0; s < l; ++s) {
    const auto col = static_cast<Eigen::Index>(s);
    argsort(px.col(col).data(), n, scratch, ox);
    argsort(py.col(col).data(), n, scratch, oy);
    double c = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double diff = px(static_cast<Eigen::Index>(ox[r]), col) - py(static_cast<Eigen::Index>(oy[r]), col);
      residual(static_cast<Eigen::Index>(ox[r]), col) = diff;
      c += diff * diff;
    }
    total += c / static_cast<double>(n);
  }
  SlicedGradient out;
  out.value = total / static_cast<double>(l);
  out.gradient = (2.0 / (static_cast<double>(l) * static_cast<double>(n))) * residual * directions.directions();
  return out;
}

SlicedGradient sliced_wasserstein_grad(const SampleSet& x, const SampleSet& y, std::size_t slices, Rng& rng) {
  check_pair(x, y, "sliced_wasserstein_grad");
  const SliceDirections dirs = SliceDirections::draw(slices, x.d(), rng);
  return sliced_wasserstein_grad(x, y, dirs);
}

}  // namespace sdist::wasserstein
