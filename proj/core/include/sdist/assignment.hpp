#pragma once

#include <cstddef>
#include <vector>

#include "sdist/sample_set.hpp"

namespace sdist::wasserstein {

struct Assignment {
  std::vector<std::size_t> row_to_col;
  double cost = 0.0;  // sum_i cost(i, row_to_col[i]), accumulated in row order
};

/// Minimum-cost perfect matching on a square cost matrix (Kuhn-Munkres with
/// row potentials and shortest augmenting paths, O(n^3)).
Assignment solve_assignment(const SquareMatrix& cost);

}  // namespace sdist::wasserstein
