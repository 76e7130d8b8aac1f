#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sdist::testing {

double brute_force_ot_power(const Matrix& x, const Matrix& y, double q) {
  const auto n = static_cast<std::size_t>(x.rows());
  if (n == 0 || y.rows() != x.rows()) throw std::invalid_argument("brute_force_ot_power: need equal non-empty sets");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = INFINITY;
  do {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto xi = x.row(static_cast<Eigen::Index>(i));
      const auto yj = y.row(static_cast<Eigen::Index>(perm[i]));
      total += std::pow((xi - yj).norm(), q);
    }
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best / static_cast<double>(n);
}

std::vector<double> jacobi_eigenvalues(SquareMatrix a, double tol, int max_sweeps) {
  const Eigen::Index n = a.rows();
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    if (off < tol * tol) break;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> values(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) values[static_cast<std::size_t>(i)] = a(i, i);
  std::sort(values.begin(), values.end());
  return values;
}

namespace {

double mean_pairwise(const Matrix& a, const Matrix& b, double power, bool distinct) {
  double total = 0.0;
  std::size_t count = 0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
      if (distinct && i == j) continue;
      total += std::pow((a.row(i) - b.row(j)).norm(), power);
      ++count;
    }
  }
  return total / static_cast<double>(count);
}

}  // namespace

double energy_distance_direct(const Matrix& x, const Matrix& y, double power) {
  return 2.0 * mean_pairwise(x, y, power, false) - mean_pairwise(x, x, power, true) -
         mean_pairwise(y, y, power, true);
}

double naive_mmd2(const Matrix& x, const Matrix& y,
                  const std::function<double(const Eigen::RowVectorXd&, const Eigen::RowVectorXd&)>& k) {
  const auto m = static_cast<double>(x.rows());
  const auto n = static_cast<double>(y.rows());
  double kxx = 0.0, kyy = 0.0, kxy = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.rows(); ++j)
      if (i != j) kxx += k(x.row(i), x.row(j));
  for (Eigen::Index i = 0; i < y.rows(); ++i)
    for (Eigen::Index j = 0; j < y.rows(); ++j)
      if (i != j) kyy += k(y.row(i), y.row(j));
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < y.rows(); ++j) kxy += k(x.row(i), y.row(j));
  return kxx / (m * (m - 1)) + kyy / (n * (n - 1)) - 2.0 * kxy / (m * n);
}

Vector central_difference(const std::function<double(const Vector&)>& f, const Vector& x, double h) {
  Vector grad(x.size());
  Vector probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe(i) = x(i) + h;
    const double up = f(probe);
    probe(i) = x(i) - h;
    const double down = f(probe);
    probe(i) = x(i);
    grad(i) = (up - down) / (2.0 * h);
  }
  return grad;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double Summary::se() const { return n > 0 ? sd / std::sqrt(static_cast<double>(n)) : 0.0; }

Summary summarize(const std::vector<double>& values) {
  Summary s;
  s.n = values.size();
  if (values.empty()) return s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.n);
  if (s.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(s.n - 1));
  }
  return s;
}

double pooled_sd(const Summary& a, const Summary& b) { return std::sqrt(0.5 * (a.sd * a.sd + b.sd * b.sd)); }

double max_abs(const Vector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace sdist::testing
