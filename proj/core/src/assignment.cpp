#include "sdist/assignment.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace sdist::wasserstein {

Assignment solve_assignment(const SquareMatrix& cost) {
  const auto n = static_cast<std::size_t>(cost.rows());
  if (cost.rows() != cost.cols()) throw std::invalid_argument("solve_assignment: cost matrix must be square");
  if (n == 0) return {};
  if (!cost.allFinite()) throw std::invalid_argument("solve_assignment: non-finite cost");

  constexpr double kInf = std::numeric_limits<double>::infinity();
  // 1-based; index 0 is the virtual column used to start each augmentation.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), min_slack(n + 1);
  std::vector<std::size_t> col_owner(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);

  for (std::size_t row = 1; row <= n; ++row) {
    col_owner[0] = row;
    std::size_t col0 = 0;
    std::fill(min_slack.begin(), min_slack.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[col0] = 1;
      const std::size_t r = col_owner[col0];
      double delta = kInf;
      std::size_t next = 0;
      for (std::size_t c = 1; c <= n; ++c) {
        if (used[c]) continue;
        const double slack = cost(static_cast<Eigen::Index>(r - 1), static_cast<Eigen::Index>(c - 1)) - u[r] - v[c];
        if (slack < min_slack[c]) {
          min_slack[c] = slack;
          way[c] = col0;
        }
        if (min_slack[c] < delta) {
          delta = min_slack[c];
          next = c;
        }
      }
      for (std::size_t c = 0; c <= n; ++c) {
        if (used[c]) {
          u[col_owner[c]] += delta;
          v[c] -= delta;
        } else {
          min_slack[c] -= delta;
        }
      }
      col0 = next;
    } while (col_owner[col0] != 0);
    do {
      const std::size_t prev = way[col0];
      col_owner[col0] = col_owner[prev];
      col0 = prev;
    } while (col0 != 0);
  }

  Assignment result;
  result.row_to_col.assign(n, 0);
  for (std::size_t c = 1; c <= n; ++c) result.row_to_col[col_owner[c] - 1] = c - 1;
  for (std::size_t i = 0; i < n; ++i) {
    result.cost += cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(result.row_to_col[i]));
  }
  return result;
}

}  // namespace sdist::wasserstein
