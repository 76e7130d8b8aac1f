#include "sdist/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "sdist/error.hpp"

namespace sdist::linalg {

SquareMatrix symmetrize(const SquareMatrix& m) { return 0.5 * (m + m.transpose()); }

EigenDecomposition eigh(const SquareMatrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw std::invalid_argument("eigh: expected a non-empty square matrix");
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (!(asym <= 1e-8 * scale)) {
    throw std::invalid_argument("eigh: matrix is not symmetric (max asymmetry " + std::to_string(asym) + ")");
  }
  Eigen::SelfAdjointEigenSolver<SquareMatrix> solver(symmetrize(m));
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eigh: eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

SquareMatrix repair_psd(const SquareMatrix& covariance, double relative_tolerance) {
  auto [values, vectors] = eigh(covariance);
  const double top = std::max(0.0, values.maxCoeff());
  const double floor = -relative_tolerance * top;
  bool clamped = false;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values[i] < floor || (top == 0.0 && values[i] < 0.0)) {
      throw NumericalError("covariance is not positive semi-definite (eigenvalue " +
                           std::to_string(values[i]) + ")");
    }
    if (values[i] < 0.0) {
      values[i] = 0.0;
      clamped = true;
    }
  }
  if (!clamped) return symmetrize(covariance);
  return symmetrize(vectors * values.asDiagonal() * vectors.transpose());
}

SquareMatrix cholesky_psd(const SquareMatrix& m) {
  const Eigen::Index d = m.rows();
  if (d != m.cols()) throw std::invalid_argument("cholesky_psd: matrix must be square");
  SquareMatrix lower = SquareMatrix::Zero(d, d);
  const double scale = std::max(m.diagonal().cwiseAbs().maxCoeff(), 0.0);
  const double tiny = 1e-12 * scale;
  for (Eigen::Index j = 0; j < d; ++j) {
    double pivot = m(j, j);
    for (Eigen::Index k = 0; k < j; ++k) pivot -= lower(j, k) * lower(j, k);
    if (pivot < -1e-8 * std::max(scale, 1e-300)) {
      throw NumericalError("cholesky: matrix is not positive semi-definite (pivot " +
                           std::to_string(pivot) + " at index " + std::to_string(j) + ")");
    }
    if (pivot <= tiny) continue;  // zero column
    const double ljj = std::sqrt(pivot);
    lower(j, j) = ljj;
    for (Eigen::Index i = j + 1; i < d; ++i) {
      double s = m(i, j);
      for (Eigen::Index k = 0; k < j; ++k) s -= lower(i, k) * lower(j, k);
      lower(i, j) = s / ljj;
    }
  }
  return lower;
}

SquareMatrix sqrt_psd(const SquareMatrix& m) {
  auto [values, vectors] = eigh(m);
  for (Eigen::Index i = 0; i < values.size(); ++i) values[i] = std::sqrt(std::max(values[i], 0.0));
  return symmetrize(vectors * values.asDiagonal() * vectors.transpose());
}

}  // namespace sdist::linalg
