#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace sdist {

/// Row-major storage so that each sample is contiguous.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
/// Dense square matrices (covariances, eigenvectors) use Eigen's default layout.
using SquareMatrix = Eigen::MatrixXd;

/// An immutable n x d set of finite samples.
class SampleSet {
 public:
  /// Throws std::invalid_argument when empty or when any entry is NaN/Inf.
  explicit SampleSet(Matrix data, std::string label = {});

  std::size_t n() const noexcept { return static_cast<std::size_t>(data_.rows()); }
  std::size_t d() const noexcept { return static_cast<std::size_t>(data_.cols()); }
  const Matrix& data() const noexcept { return data_; }
  const std::string& label() const noexcept { return label_; }

  auto row(std::size_t i) const { return data_.row(static_cast<Eigen::Index>(i)); }
  /// Column 0 copied out; handy for one-dimensional sets.
  std::vector<double> column(std::size_t j) const;

  Vector column_means() const;

  SampleSet with_label(std::string label) const { return SampleSet(data_, std::move(label)); }

  friend bool operator==(const SampleSet& a, const SampleSet& b) {
    return a.data_.rows() == b.data_.rows() && a.data_.cols() == b.data_.cols() &&
           a.data_ == b.data_;
  }

 private:
  Matrix data_;
  std::string label_;
};

/// Rows of `indices` gathered into a new set.
SampleSet select_rows(const SampleSet& set, const std::vector<std::size_t>& indices);

void require_same_dimension(const SampleSet& a, const SampleSet& b, std::string_view op);
void require_same_size(const SampleSet& a, const SampleSet& b, std::string_view op);

}  // namespace sdist
