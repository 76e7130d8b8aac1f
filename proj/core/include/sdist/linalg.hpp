#pragma once

#include "sdist/sample_set.hpp"

namespace sdist::linalg {

struct EigenDecomposition {
  Vector values;         // ascending
  SquareMatrix vectors;  // orthonormal columns, matching `values`
};

/// Symmetric eigendecomposition. The input must be symmetric to within
/// 1e-8 * max(1, max|m|); it is symmetrized before solving.
EigenDecomposition eigh(const SquareMatrix& m);

SquareMatrix symmetrize(const SquareMatrix& m);

/// Symmetrizes and clamps eigenvalues in [-tol * lambda_max, 0) to zero.
/// Eigenvalues below -tol * lambda_max throw NumericalError.
SquareMatrix repair_psd(const SquareMatrix& covariance, double relative_tolerance = 1e-10);

/// Lower-triangular L with L L^T = m for symmetric positive semi-definite m.
/// Pivots that vanish (relative to the largest diagonal entry) produce a zero
/// column instead of failing; a clearly negative pivot throws NumericalError.
SquareMatrix cholesky_psd(const SquareMatrix& m);

/// Principal square root of a PSD matrix via eigh, negative noise clamped at 0.
SquareMatrix sqrt_psd(const SquareMatrix& m);

}  // namespace sdist::linalg
