#include "sdist/c2st.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace sdist::c2st {

std::string KnnConfig::describe() const { return "knn(k=" + std::to_string(k) + ")"; }

std::string describe(const ClassifierSpec& spec) {
  return std::visit([](const auto& c) { return c.describe(); }, spec);
}

namespace {

// Rows x_i and y_i are written next to each other so the model sees pairs.
struct FoldData {
  Matrix train;
  std::vector<int> train_labels;
  Matrix test;
  std::vector<int> test_labels;
};

FoldData build_fold(const SampleSet& x, const SampleSet& y, const std::vector<std::size_t>& train_pairs,
                    const std::vector<std::size_t>& test_pairs) {
  const Eigen::Index d = static_cast<Eigen::Index>(x.d());
  // Per-feature mean and standard deviation over the training part. Each
  // sum adds (x_i + y_i) so exchanging the two sets cannot change the bits.
  Vector mean = Vector::Zero(d);
  for (std::size_t i : train_pairs) mean += (x.row(i) + y.row(i)).transpose();
  const auto count = static_cast<double>(2 * train_pairs.size());
  mean /= count;
  Vector var = Vector::Zero(d);
  for (std::size_t i : train_pairs) {
    const Vector dx = x.row(i).transpose() - mean;
    const Vector dy = y.row(i).transpose() - mean;
    var += dx.cwiseProduct(dx) + dy.cwiseProduct(dy);
  }
  var /= count;
  Vector inv_sd(d);
  for (Eigen::Index j = 0; j < d; ++j) inv_sd(j) = var(j) > 0.0 ? 1.0 / std::sqrt(var(j)) : 1.0;

  auto fill = [&](const std::vector<std::size_t>& pairs, Matrix& out, std::vector<int>& labels) {
    out.resize(static_cast<Eigen::Index>(2 * pairs.size()), d);
    labels.resize(2 * pairs.size());
    for (std::size_t r = 0; r < pairs.size(); ++r) {
      const auto row = static_cast<Eigen::Index>(2 * r);
      out.row(row) = (x.row(pairs[r]) - mean.transpose()).cwiseProduct(inv_sd.transpose());
      out.row(row + 1) = (y.row(pairs[r]) - mean.transpose()).cwiseProduct(inv_sd.transpose());
      labels[2 * r] = 0;
      labels[2 * r + 1] = 1;
    }
  };
  FoldData fold;
  fill(train_pairs, fold.train, fold.train_labels);
  fill(test_pairs, fold.test, fold.test_labels);
  return fold;
}

struct Scorer {
  const FoldData& fold;
  Rng& rng;

  std::vector<int> operator()(const KnnConfig& knn) const {
    return knn_predict(fold.train, fold.train_labels, fold.test, knn.k);
  }
  std::vector<int> operator()(const MlpConfig& config) const {
    Mlp net = train_mlp(fold.train, fold.train_labels, config, rng);
    return net.predict(fold.test);
  }
};

}  // namespace

std::vector<int> knn_predict(const Matrix& train, const std::vector<int>& train_labels, const Matrix& test,
                             std::size_t k) {
  if (k < 1) throw std::invalid_argument("knn: k must be >= 1");
  if (train.rows() < 1) throw std::invalid_argument("knn: empty training set");
  if (static_cast<std::size_t>(train.rows()) != train_labels.size()) {
    throw std::invalid_argument("knn: training rows and label count differ");
  }
  if (train.cols() != test.cols()) throw std::invalid_argument("knn: dimension mismatch");
  const auto n_train = static_cast<std::size_t>(train.rows());
  const std::size_t kk = std::min(k, n_train);
  const Eigen::Index d = train.cols();

  const Vector train_norms = train.rowwise().squaredNorm();
  std::vector<int> out(static_cast<std::size_t>(test.rows()));
  constexpr Eigen::Index kBlock = 256;
  Eigen::MatrixXd dist;
  std::vector<std::pair<double, std::size_t>> cand(n_train);
  for (Eigen::Index t0 = 0; t0 < test.rows(); t0 += kBlock) {
    const Eigen::Index nt = std::min(kBlock, test.rows() - t0);
    // dist(j, t): squared distance from training row j to test row t0 + t.
    if (d <= 32) {
      dist.resize(static_cast<Eigen::Index>(n_train), nt);
      for (Eigen::Index t = 0; t < nt; ++t) {
        for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(n_train); ++j) {
          dist(j, t) = (train.row(j) - test.row(t0 + t)).squaredNorm();
        }
      }
    } else {
      dist.noalias() = -2.0 * train * test.middleRows(t0, nt).transpose();
      dist.colwise() += train_norms;
      const Vector test_norms = test.middleRows(t0, nt).rowwise().squaredNorm();
      dist.rowwise() += test_norms.transpose();
    }
    for (Eigen::Index t = 0; t < nt; ++t) {
      for (std::size_t j = 0; j < n_train; ++j) cand[j] = {dist(static_cast<Eigen::Index>(j), t), j};
      std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(kk), cand.end());
      std::size_t ones = 0;
      for (std::size_t r = 0; r < kk; ++r) ones += train_labels[cand[r].second] == 1 ? 1 : 0;
      const std::size_t zeros = kk - ones;
      int label;
      if (ones != zeros) {
        label = ones > zeros ? 1 : 0;
      } else {
        label = train_labels[cand[0].second];
      }
      out[static_cast<std::size_t>(t0 + t)] = label;
    }
  }
  return out;
}

C2stResult c2st(const SampleSet& x, const SampleSet& y, const ClassifierSpec& classifier, std::size_t folds,
                Rng& rng) {
  require_same_dimension(x, y, "c2st");
  if (x.n() != y.n()) {
    throw std::invalid_argument("c2st: classes must be balanced (got " + std::to_string(x.n()) + " and " +
                                std::to_string(y.n()) + " samples)");
  }
  if (folds < 2) throw std::invalid_argument("c2st: folds must be >= 2");
  if (x.n() < folds) throw std::invalid_argument("c2st: need at least one sample per class in every fold");
  if (const auto* mlp = std::get_if<MlpConfig>(&classifier)) mlp->validate();
  if (const auto* knn = std::get_if<KnnConfig>(&classifier); knn && knn->k < 1) {
    throw std::invalid_argument("c2st: knn k must be >= 1");
  }

  const std::size_t n = x.n();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  rng.shuffle(perm.begin(), perm.end());
  std::vector<std::size_t> fold_of(n);
  for (std::size_t r = 0; r < n; ++r) fold_of[perm[r]] = r % folds;

  C2stResult result;
  result.classifier = describe(classifier);
  result.fold_accuracies.reserve(folds);
  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<std::size_t> train_pairs, test_pairs;
    for (std::size_t i = 0; i < n; ++i) (fold_of[i] == f ? test_pairs : train_pairs).push_back(i);
    const FoldData fold = build_fold(x, y, train_pairs, test_pairs);
    Rng fold_rng = rng.split(f);
    const std::vector<int> predicted = std::visit(Scorer{fold, fold_rng}, classifier);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) correct += predicted[i] == fold.test_labels[i] ? 1 : 0;
    result.fold_accuracies.push_back(static_cast<double>(correct) / static_cast<double>(predicted.size()));
  }
  result.accuracy = std::accumulate(result.fold_accuracies.begin(), result.fold_accuracies.end(), 0.0) /
                    static_cast<double>(folds);
  return result;
}

double optimal_c2st(const DistributionModel& p, const DistributionModel& q, std::size_t n_mc, Rng& rng) {
  if (n_mc < 1) throw std::invalid_argument("optimal_c2st: n_mc must be >= 1");
  if (dim(p) != dim(q)) throw std::invalid_argument("optimal_c2st: model dimensions differ");
  const SampleSet xp = sample(p, n_mc, rng);
  const SampleSet xq = sample(q, n_mc, rng);
  const Vector pp = log_density_rows(p, xp.data());
  const Vector qp = log_density_rows(q, xp.data());
  const Vector pq = log_density_rows(p, xq.data());
  const Vector qq = log_density_rows(q, xq.data());
  std::size_t hits_p = 0, hits_q = 0;
  for (Eigen::Index i = 0; i < pp.size(); ++i) hits_p += pp(i) > qp(i) ? 1 : 0;
  for (Eigen::Index i = 0; i < qq.size(); ++i) hits_q += qq(i) >= pq(i) ? 1 : 0;
  const auto n = static_cast<double>(n_mc);
  return 0.5 * (static_cast<double>(hits_p) / n + static_cast<double>(hits_q) / n);
}

}  // namespace sdist::c2st
