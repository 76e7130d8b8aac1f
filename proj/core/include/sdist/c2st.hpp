#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "sdist/distributions.hpp"
#include "sdist/mlp.hpp"
#include "sdist/rng.hpp"
#include "sdist/sample_set.hpp"

namespace sdist::c2st {

struct KnnConfig {
  std::size_t k = 5;
  std::string describe() const;
};

using ClassifierSpec = std::variant<KnnConfig, MlpConfig>;

std::string describe(const ClassifierSpec& spec);

struct C2stResult {
  double accuracy = 0.0;  // mean of fold_accuracies; never clipped to >= 0.5
  std::vector<double> fold_accuracies;
  std::string classifier;
};

inline constexpr std::size_t kDefaultFolds = 5;

/// Cross-validated accuracy of telling x (label 0) from y (label 1).
///
/// Sample pair (x_i, y_i) is kept together: one shuffled permutation of the
/// pair indices is dealt round-robin into folds, so each fold is balanced and
/// c2st(y, x) sees exactly the same splits with labels exchanged. Features are
/// standardized with statistics of the training part of every fold.
C2stResult c2st(const SampleSet& x, const SampleSet& y, const ClassifierSpec& classifier,
                std::size_t folds, Rng& rng);

/// Brute-force k-nearest-neighbour majority vote. Neighbours are ordered by
/// (squared distance, training index); a tied vote goes to the label of the
/// nearest neighbour.
std::vector<int> knn_predict(const Matrix& train, const std::vector<int>& train_labels, const Matrix& test,
                             std::size_t k);

/// Monte Carlo accuracy of the Bayes classifier between two densities:
///   0.5 * (P_p[log p(x) > log q(x)] + P_q[log q(y) >= log p(y)]).
/// Ties are scored in favour of q.
double optimal_c2st(const DistributionModel& p, const DistributionModel& q, std::size_t n_mc, Rng& rng);

}  // namespace sdist::c2st
