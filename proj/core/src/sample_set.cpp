#include "sdist/sample_set.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sdist {

SampleSet::SampleSet(Matrix data, std::string label) : data_(std::move(data)), label_(std::move(label)) {
  if (data_.rows() < 1 || data_.cols() < 1) {
    throw std::invalid_argument("SampleSet: need at least one sample of dimension >= 1");
  }
  if (!data_.allFinite()) {
    for (Eigen::Index i = 0; i < data_.rows(); ++i) {
      for (Eigen::Index j = 0; j < data_.cols(); ++j) {
        if (!std::isfinite(data_(i, j))) {
          throw std::invalid_argument("SampleSet: non-finite entry at row " + std::to_string(i) +
                                      ", column " + std::to_string(j));
        }
      }
    }
  }
}

std::vector<double> SampleSet::column(std::size_t j) const {
  std::vector<double> out(n());
  for (std::size_t i = 0; i < n(); ++i) out[i] = data_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  return out;
}

Vector SampleSet::column_means() const { return data_.colwise().mean().transpose(); }

SampleSet select_rows(const SampleSet& set, const std::vector<std::size_t>& indices) {
  Matrix out(static_cast<Eigen::Index>(indices.size()), set.data().cols());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= set.n()) throw std::out_of_range("select_rows: index out of range");
    out.row(static_cast<Eigen::Index>(i)) = set.row(indices[i]);
  }
  return SampleSet(std::move(out), set.label());
}

void require_same_dimension(const SampleSet& a, const SampleSet& b, std::string_view op) {
  if (a.d() != b.d()) {
    throw std::invalid_argument(std::string(op) + ": dimension mismatch (" + std::to_string(a.d()) +
                                " vs " + std::to_string(b.d()) + ")");
  }
}

void require_same_size(const SampleSet& a, const SampleSet& b, std::string_view op) {
  if (a.n() != b.n()) {
    throw std::invalid_argument(std::string(op) + ": sample counts differ (" + std::to_string(a.n()) +
                                " vs " + std::to_string(b.n()) + ")");
  }
}

}  // namespace sdist
