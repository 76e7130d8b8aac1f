#pragma once

// Blocked kernel and distance evaluation shared by the MMD, witness and
// median-heuristic code. Every reduction visits blocks in a fixed order so
// results do not depend on scheduling.

#include <algorithm>
#include <cmath>

#include "sdist/kernels.hpp"
#include "sdist/sample_set.hpp"

namespace sdist::mmd::detail {

inline constexpr Eigen::Index kBlock = 256;
inline constexpr Eigen::Index kDirectMaxDim = 32;

/// Row squared norms, computed once per matrix.
inline Vector row_squared_norms(const Matrix& m) { return m.rowwise().squaredNorm(); }

/// out(i, j) = |a_{i0+i} - b_{j0+j}|^2 for an ni x nj block.
inline void squared_distance_block(const Matrix& a, const Vector& na, Eigen::Index i0, Eigen::Index ni, const Matrix& b,
                                   const Vector& nb, Eigen::Index j0, Eigen::Index nj, SquareMatrix& out) {
  out.resize(ni, nj);
  const Eigen::Index d = a.cols();
  if (d <= kDirectMaxDim) {
    for (Eigen::Index j = 0; j < nj; ++j) {
      const double* bj = b.row(j0 + j).data();
      for (Eigen::Index i = 0; i < ni; ++i) {
        const double* ai = a.row(i0 + i).data();
        double s = 0.0;
        for (Eigen::Index k = 0; k < d; ++k) {
          const double t = ai[k] - bj[k];
          s += t * t;
        }
        out(i, j) = s;
      }
    }
    return;
  }
  out.noalias() = -2.0 * a.middleRows(i0, ni) * b.middleRows(j0, nj).transpose();
  out.colwise() += na.segment(i0, ni);
  out.rowwise() += nb.segment(j0, nj).transpose();
  out = out.cwiseMax(0.0);
}

/// The kernel evaluated on an ni x nj block.
inline void kernel_block(const KernelSpec& kernel, const Matrix& a, const Vector& na, Eigen::Index i0, Eigen::Index ni,
                         const Matrix& b, const Vector& nb, Eigen::Index j0, Eigen::Index nj, SquareMatrix& out) {
  switch (kernel.family()) {
    case KernelFamily::gaussian: {
      squared_distance_block(a, na, i0, ni, b, nb, j0, nj, out);
      const double scale = -1.0 / (2.0 * kernel.bandwidth() * kernel.bandwidth());
      out = (out * scale).array().exp().matrix();
      return;
    }
    case KernelFamily::laplacian: {
      out.resize(ni, nj);
      const Eigen::Index d = a.cols();
      for (Eigen::Index j = 0; j < nj; ++j) {
        const double* bj = b.row(j0 + j).data();
        for (Eigen::Index i = 0; i < ni; ++i) {
          const double* ai = a.row(i0 + i).data();
          double s = 0.0;
          for (Eigen::Index k = 0; k < d; ++k) s += std::abs(ai[k] - bj[k]);
          out(i, j) = std::exp(-s / kernel.bandwidth());
        }
      }
      return;
    }
    case KernelFamily::linear:
    case KernelFamily::polynomial: {
      out.resize(ni, nj);
      const Eigen::Index d = a.cols();
      if (d <= kDirectMaxDim) {
        for (Eigen::Index j = 0; j < nj; ++j) {
          const double* bj = b.row(j0 + j).data();
          for (Eigen::Index i = 0; i < ni; ++i) {
            const double* ai = a.row(i0 + i).data();
            double s = 0.0;
            for (Eigen::Index k = 0; k < d; ++k) s += ai[k] * bj[k];
            out(i, j) = s;
          }
        }
      } else {
        out.noalias() = a.middleRows(i0, ni) * b.middleRows(j0, nj).transpose();
      }
      if (kernel.family() == KernelFamily::polynomial) {
        const double scale = kernel.scale(), offset = kernel.offset(), degree = kernel.degree();
        out = out.unaryExpr([=](double g) { return std::pow(scale * g + offset, degree); });
      }
      return;
    }
    case KernelFamily::energy: {
      squared_distance_block(a, na, i0, ni, b, nb, j0, nj, out);
      const double p = kernel.power();
      for (Eigen::Index j = 0; j < nj; ++j) {
        const double bj = std::pow(std::sqrt(nb(j0 + j)), p);
        for (Eigen::Index i = 0; i < ni; ++i) {
          out(i, j) = std::pow(std::sqrt(na(i0 + i)), p) + bj - std::pow(std::sqrt(out(i, j)), p);
        }
      }
      return;
    }
  }
}

/// Sum of k(a_i, a_j) over ordered pairs i != j.
inline double off_diagonal_sum(const KernelSpec& kernel, const Matrix& a, const Vector& na) {
  const Eigen::Index n = a.rows();
  SquareMatrix block;
  double total = 0.0;
  for (Eigen::Index i0 = 0; i0 < n; i0 += kBlock) {
    const Eigen::Index ni = std::min(kBlock, n - i0);
    for (Eigen::Index j0 = i0; j0 < n; j0 += kBlock) {
      const Eigen::Index nj = std::min(kBlock, n - j0);
      kernel_block(kernel, a, na, i0, ni, a, na, j0, nj, block);
      double s = 0.0;
      if (j0 == i0) {
        for (Eigen::Index j = 1; j < nj; ++j) {
          for (Eigen::Index i = 0; i < j; ++i) s += block(i, j);
        }
      } else {
        s = block.sum();
      }
      total += s;
    }
  }
  return 2.0 * total;
}

/// Sum of k(a_i, b_j) over all pairs.
inline double cross_sum(const KernelSpec& kernel, const Matrix& a, const Vector& na, const Matrix& b, const Vector& nb) {
  SquareMatrix block;
  double total = 0.0;
  for (Eigen::Index i0 = 0; i0 < a.rows(); i0 += kBlock) {
    const Eigen::Index ni = std::min(kBlock, a.rows() - i0);
    for (Eigen::Index j0 = 0; j0 < b.rows(); j0 += kBlock) {
      const Eigen::Index nj = std::min(kBlock, b.rows() - j0);
      kernel_block(kernel, a, na, i0, ni, b, nb, j0, nj, block);
      total += block.sum();
    }
  }
  return total;
}

/// Visits the Euclidean distance of every unordered pair i < j of `a`,
/// always in the same order.
template <class Visit>
void for_each_pair_distance(const Matrix& a, const Vector& na, Visit&& visit) {
  const Eigen::Index n = a.rows();
  SquareMatrix block;
  for (Eigen::Index i0 = 0; i0 < n; i0 += kBlock) {
    const Eigen::Index ni = std::min(kBlock, n - i0);
    for (Eigen::Index j0 = i0; j0 < n; j0 += kBlock) {
      const Eigen::Index nj = std::min(kBlock, n - j0);
      squared_distance_block(a, na, i0, ni, a, na, j0, nj, block);
      for (Eigen::Index j = 0; j < nj; ++j) {
        const Eigen::Index i_end = (j0 == i0) ? j : ni;
        for (Eigen::Index i = 0; i < i_end; ++i) visit(std::sqrt(block(i, j)));
      }
    }
  }
}

/// Strict weak order used to put a pair of inputs into a canonical order:
/// by row count, then column count, then lexicographically by entries.
inline bool canonical_less(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) return a.rows() < b.rows();
  if (a.cols() != b.cols()) return a.cols() < b.cols();
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

}  // namespace sdist::mmd::detail
