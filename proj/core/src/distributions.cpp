#include "sdist/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "sdist/error.hpp"
#include "sdist/linalg.hpp"

namespace sdist {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

double log_sum_exp(const std::vector<double>& terms) {
  const double top = *std::max_element(terms.begin(), terms.end());
  if (!std::isfinite(top)) return top;
  double s = 0.0;
  for (double t : terms) s += std::exp(t - top);
  return top + std::log(s);
}

}  // namespace

GaussianModel::GaussianModel(Vector mean, SquareMatrix covariance) : mean_(std::move(mean)) {
  const auto d = mean_.size();
  if (d < 1) throw std::invalid_argument("GaussianModel: dimension must be >= 1");
  if (covariance.rows() != d || covariance.cols() != d) {
    throw std::invalid_argument("GaussianModel: covariance must be " + std::to_string(d) + "x" +
                                std::to_string(d));
  }
  if (!mean_.allFinite() || !covariance.allFinite()) {
    throw std::invalid_argument("GaussianModel: non-finite parameters");
  }
  covariance_ = linalg::repair_psd(covariance);
  cholesky_ = linalg::cholesky_psd(covariance_);
  finish();
}

GaussianModel GaussianModel::from_cholesky(Vector mean, SquareMatrix lower) {
  const auto d = mean.size();
  if (d < 1 || lower.rows() != d || lower.cols() != d) {
    throw std::invalid_argument("GaussianModel::from_cholesky: shape mismatch");
  }
  if (!mean.allFinite() || !lower.allFinite()) {
    throw std::invalid_argument("GaussianModel::from_cholesky: non-finite parameters");
  }
  GaussianModel g;
  g.mean_ = std::move(mean);
  g.cholesky_ = lower.triangularView<Eigen::Lower>();
  g.covariance_ = g.cholesky_ * g.cholesky_.transpose();
  g.finish();
  return g;
}

GaussianModel GaussianModel::standard(std::size_t dim) {
  const auto d = static_cast<Eigen::Index>(dim);
  return GaussianModel(Vector::Zero(d), SquareMatrix::Identity(d, d));
}

void GaussianModel::finish() {
  const auto diag = cholesky_.diagonal();
  singular_ = (diag.array() <= 0.0).any();
  if (singular_) {
    log_norm_ = -std::numeric_limits<double>::infinity();
    return;
  }
  const double log_det = 2.0 * diag.array().log().sum();
  log_norm_ = -0.5 * (static_cast<double>(dim()) * kLog2Pi + log_det);
}

Matrix GaussianModel::transform(const Matrix& noise) const {
  if (noise.cols() != mean_.size()) throw std::invalid_argument("GaussianModel::transform: dimension mismatch");
  Matrix out = noise * cholesky_.transpose();
  out.rowwise() += mean_.transpose();
  return out;
}

double GaussianModel::log_density(const Eigen::Ref<const Vector>& x) const {
  if (x.size() != mean_.size()) throw std::invalid_argument("log_density: dimension mismatch");
  if (singular_) throw NumericalError("log_density: covariance is singular");
  const Vector z = cholesky_.triangularView<Eigen::Lower>().solve(x - mean_);
  return log_norm_ - 0.5 * z.squaredNorm();
}

Vector GaussianModel::log_density_rows(const Matrix& points) const {
  if (points.cols() != mean_.size()) throw std::invalid_argument("log_density: dimension mismatch");
  if (singular_) throw NumericalError("log_density: covariance is singular");
  // Solve L Z^T = (X - mu)^T for all rows at once.
  SquareMatrix centered = (points.rowwise() - mean_.transpose()).transpose();
  cholesky_.triangularView<Eigen::Lower>().solveInPlace(centered);
  Vector out = centered.colwise().squaredNorm().transpose();
  return (log_norm_ - 0.5 * out.array()).matrix();
}

MixtureModel::MixtureModel(std::vector<double> weights, std::vector<GaussianModel> components)
    : weights_(std::move(weights)), components_(std::move(components)) {
  if (components_.empty()) throw std::invalid_argument("MixtureModel: need at least one component");
  if (weights_.size() != components_.size()) {
    throw std::invalid_argument("MixtureModel: weight count does not match component count");
  }
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("MixtureModel: weights must be nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("MixtureModel: weights sum to " + std::to_string(total) + ", expected 1");
  }
  for (std::size_t k = 1; k < components_.size(); ++k) {
    if (components_[k].dim() != components_[0].dim()) {
      throw std::invalid_argument("MixtureModel: component " + std::to_string(k) + " has a different dimension");
    }
  }
}

Vector MixtureModel::mean() const {
  Vector m = Vector::Zero(static_cast<Eigen::Index>(dim()));
  for (std::size_t k = 0; k < size(); ++k) m += weights_[k] * components_[k].mean();
  return m;
}

SquareMatrix MixtureModel::covariance() const {
  const Vector mu = mean();
  const auto d = static_cast<Eigen::Index>(dim());
  SquareMatrix c = SquareMatrix::Zero(d, d);
  for (std::size_t k = 0; k < size(); ++k) {
    const Vector delta = components_[k].mean() - mu;
    c += weights_[k] * (components_[k].covariance() + delta * delta.transpose());
  }
  return linalg::symmetrize(c);
}

double MixtureModel::log_density(const Eigen::Ref<const Vector>& x) const {
  std::vector<double> terms(size());
  for (std::size_t k = 0; k < size(); ++k) {
    terms[k] = weights_[k] > 0.0 ? std::log(weights_[k]) + components_[k].log_density(x)
                                 : -std::numeric_limits<double>::infinity();
  }
  return log_sum_exp(terms);
}

Vector MixtureModel::log_density_rows(const Matrix& points) const {
  const Eigen::Index n = points.rows();
  std::vector<Vector> per(size());
  for (std::size_t k = 0; k < size(); ++k) {
    if (weights_[k] > 0.0) per[k] = components_[k].log_density_rows(points).array() + std::log(weights_[k]);
  }
  Vector out(n);
  std::vector<double> terms(size());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < size(); ++k) {
      terms[k] = weights_[k] > 0.0 ? per[k][i] : -std::numeric_limits<double>::infinity();
    }
    out[i] = log_sum_exp(terms);
  }
  return out;
}

MixtureModel make_mixture(std::vector<double> weights, const std::vector<Vector>& means,
                          const std::vector<SquareMatrix>& covariances) {
  if (means.size() != covariances.size()) {
    throw std::invalid_argument("make_mixture: means and covariances differ in count");
  }
  std::vector<GaussianModel> components;
  components.reserve(means.size());
  for (std::size_t k = 0; k < means.size(); ++k) {
    try {
      components.emplace_back(means[k], covariances[k]);
    } catch (const std::exception& e) {
      throw NumericalError("mixture component " + std::to_string(k) + ": " + e.what());
    }
  }
  return MixtureModel(std::move(weights), std::move(components));
}

SampleSet sample(const GaussianModel& model, std::size_t n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("sample: n must be >= 1");
  const Matrix noise = standard_normal_matrix(static_cast<Eigen::Index>(n),
                                              static_cast<Eigen::Index>(model.dim()), rng);
  return SampleSet(model.transform(noise));
}

SampleSet sample(const MixtureModel& model, std::size_t n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("sample: n must be >= 1");
  const auto d = static_cast<Eigen::Index>(model.dim());
  std::vector<double> cumulative(model.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < model.size(); ++k) cumulative[k] = (acc += model.weights()[k]);
  Matrix out(static_cast<Eigen::Index>(n), d);
  Vector eps(d);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform();
    std::size_t k = 0;
    while (k + 1 < model.size() && !(u < cumulative[k])) ++k;
    // Guard against rounding in the cumulative sum landing on a zero-weight tail.
    while (model.weights()[k] == 0.0 && k > 0) --k;
    for (Eigen::Index j = 0; j < d; ++j) eps[j] = rng.normal();
    const auto& c = model.components()[k];
    out.row(static_cast<Eigen::Index>(i)) = (c.mean() + c.cholesky() * eps).transpose();
  }
  return SampleSet(std::move(out));
}

SampleSet sample(const DistributionModel& model, std::size_t n, Rng& rng) {
  return std::visit([&](const auto& m) { return sample(m, n, rng); }, model);
}

double log_density(const DistributionModel& model, const Eigen::Ref<const Vector>& x) {
  return std::visit([&](const auto& m) { return m.log_density(x); }, model);
}

Vector log_density_rows(const DistributionModel& model, const Matrix& points) {
  return std::visit([&](const auto& m) { return m.log_density_rows(points); }, model);
}

std::size_t dim(const DistributionModel& model) {
  return std::visit([](const auto& m) { return m.dim(); }, model);
}

Vector model_mean(const DistributionModel& model) {
  return std::visit([](const auto& m) -> Vector { return m.mean(); }, model);
}

SquareMatrix model_covariance(const DistributionModel& model) {
  return std::visit([](const auto& m) -> SquareMatrix { return m.covariance(); }, model);
}

GaussianModel moment_matched_gaussian(const MixtureModel& mixture) {
  return GaussianModel(mixture.mean(), mixture.covariance());
}

MixtureModel canonical_mog2d() {
  std::vector<Vector> means;
  std::vector<SquareMatrix> covs;
  for (double degrees : {90.0, 210.0, 330.0}) {
    const double a = degrees * std::numbers::pi / 180.0;
    Vector m(2);
    m << 2.0 * std::cos(a), 2.0 * std::sin(a);
    means.push_back(m);
    covs.push_back(0.3 * SquareMatrix::Identity(2, 2));
  }
  return make_mixture({1.0 / 3.0, 1.0 / 3.0, 1.0 - 2.0 / 3.0}, means, covs);
}

}  // namespace sdist
