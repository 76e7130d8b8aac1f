#include "sdist/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "json_support.hpp"
#include "sdist/error.hpp"
#include "sdist/mmd.hpp"

namespace sdist::fitting {

std::string to_string(LossKind kind) {
  switch (kind) {
    case LossKind::sliced_wasserstein: return "sliced_wasserstein";
    case LossKind::mmd: return "mmd";
    case LossKind::c2st_optimal: return "c2st_optimal";
  }
  return "unknown";
}

LossKind parse_loss_kind(const std::string& name) {
  if (name == "swd" || name == "sw" || name == "sliced_wasserstein") return LossKind::sliced_wasserstein;
  if (name == "mmd") return LossKind::mmd;
  if (name == "c2st" || name == "c2st_optimal") return LossKind::c2st_optimal;
  throw std::invalid_argument("unknown loss '" + name + "' (expected swd, mmd or c2st)");
}

LossSpec LossSpec::sliced_wasserstein(std::size_t slices, std::size_t samples) {
  LossSpec s;
  s.kind = LossKind::sliced_wasserstein;
  s.slices = slices;
  s.samples_per_epoch = samples;
  s.validate();
  return s;
}

LossSpec LossSpec::mmd(std::optional<mmd::KernelSpec> kernel, std::size_t samples) {
  LossSpec s;
  s.kind = LossKind::mmd;
  s.kernel = kernel;
  s.samples_per_epoch = samples;
  s.validate();
  return s;
}

LossSpec LossSpec::c2st_optimal(std::size_t samples) {
  LossSpec s;
  s.kind = LossKind::c2st_optimal;
  s.samples_per_epoch = samples;
  s.validate();
  return s;
}

void LossSpec::validate() const {
  if (samples_per_epoch < 2) throw std::invalid_argument("loss: samples_per_epoch must be >= 2");
  if (kind == LossKind::sliced_wasserstein && slices < 1) throw std::invalid_argument("loss: slice count must be >= 1");
  if (kind == LossKind::mmd && kernel && kernel->family() != mmd::KernelFamily::gaussian) {
    throw std::invalid_argument("loss: the mmd loss needs a gaussian kernel (analytic gradient)");
  }
}

std::string LossSpec::describe() const {
  switch (kind) {
    case LossKind::sliced_wasserstein: return "sliced_wasserstein(l=" + std::to_string(slices) + ")";
    case LossKind::mmd: return "mmd(" + (kernel ? kernel->describe() : std::string("gaussian(sigma=median)")) + ")";
    case LossKind::c2st_optimal: return "c2st_optimal";
  }
  return "unknown";
}

// ---- parameterization ---------------------------------------------------

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double inverse_softplus(double y) {
  if (!(y > 0.0)) throw std::invalid_argument("inverse_softplus: argument must be positive");
  return y > 30.0 ? y + std::log1p(-std::exp(-y)) : std::log(std::expm1(y));
}

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double log_sigmoid(double z) { return -softplus(-z); }

}  // namespace

std::size_t parameter_count(std::size_t dim) { return dim + dim * (dim + 1) / 2; }

Vector pack_parameters(const Vector& mean, const SquareMatrix& cholesky) {
  const Eigen::Index d = mean.size();
  if (cholesky.rows() != d || cholesky.cols() != d) throw std::invalid_argument("pack_parameters: shape mismatch");
  Vector theta(static_cast<Eigen::Index>(parameter_count(static_cast<std::size_t>(d))));
  theta.head(d) = mean;
  Eigen::Index k = d;
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) theta(k++) = (i == j) ? inverse_softplus(cholesky(i, i)) : cholesky(i, j);
  }
  return theta;
}

Vector unpack_mean(const Vector& theta, std::size_t dim) { return theta.head(static_cast<Eigen::Index>(dim)); }

SquareMatrix unpack_cholesky(const Vector& theta, std::size_t dim) {
  const auto d = static_cast<Eigen::Index>(dim);
  SquareMatrix c = SquareMatrix::Zero(d, d);
  Eigen::Index k = d;
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) c(i, j) = (i == j) ? softplus(theta(k++)) : theta(k++);
  }
  return c;
}

namespace {

void check_theta(const Vector& theta, std::size_t d) {
  if (static_cast<std::size_t>(theta.size()) != parameter_count(d)) {
    throw std::invalid_argument("reparameterized_loss: parameter vector does not match the dimension");
  }
}

Matrix model_samples(const Vector& mean, const SquareMatrix& chol, const Matrix& eps) {
  Matrix x = eps * chol.transpose();
  x.rowwise() += mean.transpose();
  return x;
}

// Chain rule from d loss / d samples (G) to d loss / d theta.
Vector pull_back(const Matrix& g, const Matrix& eps, const Vector& theta, std::size_t dim) {
  const auto d = static_cast<Eigen::Index>(dim);
  Vector out(theta.size());
  out.head(d) = g.colwise().sum().transpose();
  const SquareMatrix dc = g.transpose() * eps;  // dc(j, k) = sum_i g_ij eps_ik
  Eigen::Index k = d;
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j, ++k) out(k) = (i == j) ? dc(i, i) * sigmoid(theta(k)) : dc(i, j);
  }
  return out;
}

double c2st_loss_value(const Vector& theta, const Matrix& eps, const SampleSet& target, const Vector& target_logp_target,
                       const DistributionModel& target_model, std::size_t dim) {
  const Vector mean = unpack_mean(theta, dim);
  const SquareMatrix chol = unpack_cholesky(theta, dim);
  const GaussianModel model = GaussianModel::from_cholesky(mean, chol);
  const Matrix x = model_samples(mean, chol, eps);
  const Vector lq_x = model.log_density_rows(x);
  const Vector lp_x = log_density_rows(target_model, x);
  const Vector lq_t = model.log_density_rows(target.data());
  // logit = log q_model - log p_target; class "model" for x, "target" for t.
  double ce = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) ce -= log_sigmoid(lq_x(i) - lp_x(i));
  for (Eigen::Index i = 0; i < target.data().rows(); ++i) ce -= log_sigmoid(target_logp_target(i) - lq_t(i));
  ce /= static_cast<double>(x.rows() + target.data().rows());
  return std::log(2.0) - ce;
}

struct LossVisitor {
  const Vector& theta;
  const Matrix& eps;
  const SampleSet& target;
  Vector* gradient;
  std::size_t dim;

  double operator()(const wasserstein::SliceDirections& dirs) const {
    const SampleSet x(model_samples(unpack_mean(theta, dim), unpack_cholesky(theta, dim), eps));
    const auto r = wasserstein::sliced_wasserstein_grad(x, target, dirs);
    if (gradient) *gradient = pull_back(r.gradient, eps, theta, dim);
    return r.value;
  }

  double operator()(const mmd::KernelSpec& kernel) const {
    const SampleSet x(model_samples(unpack_mean(theta, dim), unpack_cholesky(theta, dim), eps));
    if (!gradient) return mmd::mmd2_unbiased(x, target, kernel).mmd_squared;
    const auto r = mmd::mmd2_grad(x, target, kernel);
    *gradient = pull_back(r.gradient, eps, theta, dim);
    return r.value;
  }

  double operator()(const OptimalC2stLoss& loss) const {
    if (loss.target == nullptr) throw std::invalid_argument("reparameterized_loss: c2st loss needs a target model");
    if (dim > kMaxFiniteDifferenceDim) {
      throw std::invalid_argument("c2st_optimal loss uses finite differences and supports d <= " +
                                  std::to_string(kMaxFiniteDifferenceDim));
    }
    const Vector lp_t = log_density_rows(*loss.target, target.data());
    const double value = c2st_loss_value(theta, eps, target, lp_t, *loss.target, dim);
    if (gradient) {
      constexpr double h = 1e-5;
      gradient->resize(theta.size());
      Vector probe = theta;
      for (Eigen::Index k = 0; k < theta.size(); ++k) {
        probe(k) = theta(k) + h;
        const double up = c2st_loss_value(probe, eps, target, lp_t, *loss.target, dim);
        probe(k) = theta(k) - h;
        const double down = c2st_loss_value(probe, eps, target, lp_t, *loss.target, dim);
        probe(k) = theta(k);
        (*gradient)(k) = (up - down) / (2.0 * h);
      }
    }
    return value;
  }
};

}  // namespace

double reparameterized_loss(const Vector& theta, const Matrix& eps, const SampleSet& target, const EpochLoss& loss,
                            Vector* gradient) {
  const std::size_t d = target.d();
  check_theta(theta, d);
  if (static_cast<std::size_t>(eps.cols()) != d) throw std::invalid_argument("reparameterized_loss: noise dimension mismatch");
  return std::visit(LossVisitor{theta, eps, target, gradient, d}, loss);
}

namespace {

// ---- shared fitting helpers ----------------------------------------------

SampleSet target_batch(const FitTarget& target, std::size_t count, Rng& rng) {
  if (const auto* model = std::get_if<DistributionModel>(&target)) return sample(*model, count, rng);
  const SampleSet& set = std::get<SampleSet>(target);
  if (count >= set.n()) return set;
  std::vector<std::size_t> idx(set.n());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < count; ++i) std::swap(idx[i], idx[i + rng.below(set.n() - i)]);
  idx.resize(count);
  return select_rows(set, idx);
}

std::size_t target_dim(const FitTarget& target) {
  if (const auto* model = std::get_if<DistributionModel>(&target)) return dim(*model);
  return std::get<SampleSet>(target).d();
}

EpochLoss make_epoch_loss(const LossSpec& spec, const SampleSet& model_batch, const SampleSet& target,
                          const FitTarget* full_target, Rng& rng) {
  switch (spec.kind) {
    case LossKind::sliced_wasserstein:
      return wasserstein::SliceDirections::draw(spec.slices, target.d(), rng);
    case LossKind::mmd:
      if (spec.kernel) return *spec.kernel;
      return mmd::KernelSpec::gaussian(mmd::median_heuristic(model_batch, target));
    case LossKind::c2st_optimal: {
      const auto* model = full_target ? std::get_if<DistributionModel>(full_target) : nullptr;
      if (model == nullptr) {
        throw std::invalid_argument("c2st_optimal loss needs a target model with a density, not a sample set");
      }
      return OptimalC2stLoss{model};
    }
  }
  throw std::logic_error("unreachable");
}

ComponentSnapshot snapshot(const Vector& theta, std::size_t d) { return {unpack_mean(theta, d), unpack_cholesky(theta, d)}; }

void require_finite_loss(double value, std::size_t epoch) {
  if (!std::isfinite(value)) {
    throw NumericalError("fit: non-finite loss at epoch " + std::to_string(epoch) + "; try a smaller learning rate");
  }
}

}  // namespace

FitTrace fit_gaussian(const FitTarget& target, const LossSpec& loss, std::size_t epochs, const AdamConfig& adam,
                      Rng& rng, const std::optional<GaussianModel>& init) {
  loss.validate();
  adam.validate();
  const std::size_t d = target_dim(target);
  if (loss.kind == LossKind::c2st_optimal) {
    if (!std::holds_alternative<DistributionModel>(target)) {
      throw std::invalid_argument("c2st_optimal loss needs a target model with a density, not a sample set");
    }
    if (d > kMaxFiniteDifferenceDim) {
      throw std::invalid_argument("c2st_optimal loss uses finite differences and supports d <= " +
                                  std::to_string(kMaxFiniteDifferenceDim));
    }
  }
  const auto di = static_cast<Eigen::Index>(d);

  Vector theta;
  {
    SampleSet first = target_batch(target, loss.samples_per_epoch, rng);
    if (init) {
      if (init->dim() != d) throw std::invalid_argument("fit_gaussian: initial model dimension mismatch");
      if ((init->cholesky().diagonal().array() <= 0.0).any()) {
        throw std::invalid_argument("fit_gaussian: initial covariance must be positive definite");
      }
      theta = pack_parameters(init->mean(), init->cholesky());
    } else {
      Vector mu0 = first.column_means();
      for (Eigen::Index j = 0; j < di; ++j) mu0(j) += 0.1 * rng.normal();
      theta = pack_parameters(mu0, 0.5 * SquareMatrix::Identity(di, di));
    }
  }

  FitTrace trace;
  trace.loss_kind = loss.kind;
  trace.loss_description = loss.describe();
  AdamState state(static_cast<std::size_t>(theta.size()));

  auto evaluate = [&](std::size_t epoch, Vector* grad) {
    const SampleSet batch = target_batch(target, loss.samples_per_epoch, rng);
    const Matrix eps = standard_normal_matrix(static_cast<Eigen::Index>(batch.n()), di, rng);
    const SampleSet current(model_samples(unpack_mean(theta, d), unpack_cholesky(theta, d), eps));
    const EpochLoss epoch_loss = make_epoch_loss(loss, current, batch, &target, rng);
    const double value = reparameterized_loss(theta, eps, batch, epoch_loss, grad);
    require_finite_loss(value, epoch);
    if (grad && !grad->allFinite()) throw NumericalError("fit: non-finite gradient at epoch " + std::to_string(epoch));
    return value;
  };

  trace.records.push_back({0, evaluate(0, nullptr), {1.0}, {snapshot(theta, d)}});
  Vector grad;
  for (std::size_t epoch = 1; epoch <= epochs; ++epoch) {
    const double value = evaluate(epoch, &grad);
    adam_step(theta, grad, state, adam);
    trace.records.push_back({epoch, value, {1.0}, {snapshot(theta, d)}});
  }
  const ComponentSnapshot& last = trace.records.back().components.front();
  trace.final_model = GaussianModel::from_cholesky(last.mean, last.cholesky);
  return trace;
}

Matrix responsibilities(const MixtureModel& mixture, const Matrix& points) {
  const auto k = static_cast<Eigen::Index>(mixture.size());
  Matrix logr(points.rows(), k);
  for (Eigen::Index c = 0; c < k; ++c) {
    const double w = mixture.weights()[static_cast<std::size_t>(c)];
    const double lw = w > 0.0 ? std::log(w) : -std::numeric_limits<double>::infinity();
    logr.col(c) = mixture.components()[static_cast<std::size_t>(c)].log_density_rows(points).array() + lw;
  }
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const double top = logr.row(i).maxCoeff();
    if (!std::isfinite(top)) throw NumericalError("responsibilities: point has zero density under every component");
    double total = 0.0;
    for (Eigen::Index c = 0; c < k; ++c) total += (logr(i, c) = std::exp(logr(i, c) - top));
    logr.row(i) /= total;
  }
  return logr;
}

namespace {

// Lloyd's algorithm from a k-means++ seed, two centres.
std::vector<Vector> two_means(const Matrix& points, Rng& rng) {
  const Eigen::Index n = points.rows();
  std::vector<Vector> centres;
  centres.push_back(points.row(static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)))).transpose());
  Vector d2(n);
  for (Eigen::Index i = 0; i < n; ++i) d2(i) = (points.row(i).transpose() - centres[0]).squaredNorm();
  const double total = d2.sum();
  Eigen::Index pick = 0;
  if (total > 0.0) {
    double u = rng.uniform() * total;
    for (pick = 0; pick < n - 1; ++pick) {
      u -= d2(pick);
      if (u < 0.0) break;
    }
  }
  centres.push_back(points.row(pick).transpose());

  std::vector<int> assign(static_cast<std::size_t>(n), 0);
  for (int iter = 0; iter < 50; ++iter) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      const int a = (points.row(i).transpose() - centres[1]).squaredNorm() <
                            (points.row(i).transpose() - centres[0]).squaredNorm()
                        ? 1
                        : 0;
      if (a != assign[static_cast<std::size_t>(i)]) changed = true;
      assign[static_cast<std::size_t>(i)] = a;
    }
    for (int c = 0; c < 2; ++c) {
      Vector sum = Vector::Zero(points.cols());
      std::size_t count = 0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (assign[static_cast<std::size_t>(i)] == c) {
          sum += points.row(i).transpose();
          ++count;
        }
      }
      if (count > 0) centres[static_cast<std::size_t>(c)] = sum / static_cast<double>(count);
    }
    if (!changed && iter > 0) break;
  }
  return centres;
}

MixtureModel mixture_from(const std::vector<double>& weights, const std::vector<Vector>& thetas, std::size_t d) {
  std::vector<GaussianModel> comps;
  for (const Vector& t : thetas) comps.push_back(GaussianModel::from_cholesky(unpack_mean(t, d), unpack_cholesky(t, d)));
  return MixtureModel(weights, std::move(comps));
}

std::vector<double> normalized(const Vector& w) {
  std::vector<double> out(static_cast<std::size_t>(w.size()));
  const double total = w.sum();
  for (Eigen::Index k = 0; k < w.size(); ++k) out[static_cast<std::size_t>(k)] = std::max(w(k), 0.0) / total;
  return out;
}

}  // namespace

FitTrace fit_mixture_em(const SampleSet& target, const LossSpec& loss, std::size_t epochs, const AdamConfig& adam,
                        Rng& rng, const std::optional<MixtureModel>& init) {
  loss.validate();
  adam.validate();
  if (loss.kind == LossKind::c2st_optimal) {
    throw std::invalid_argument("fit_mixture_em: the c2st_optimal loss is only available for single-Gaussian fits");
  }
  constexpr std::size_t K = 2;
  const std::size_t d = target.d();
  const auto di = static_cast<Eigen::Index>(d);
  if (target.n() < 2 * K) throw std::invalid_argument("fit_mixture_em: need at least 4 target samples");

  std::vector<double> weights;
  std::vector<Vector> thetas;
  if (init) {
    if (init->size() != K || init->dim() != d) throw std::invalid_argument("fit_mixture_em: initial mixture must have 2 components of matching dimension");
    weights = init->weights();
    for (const auto& c : init->components()) {
      if ((c.cholesky().diagonal().array() <= 0.0).any()) {
        throw std::invalid_argument("fit_mixture_em: initial covariances must be positive definite");
      }
      thetas.push_back(pack_parameters(c.mean(), c.cholesky()));
    }
  } else {
    const std::vector<Vector> centres = two_means(target.data(), rng);
    weights.assign(K, 1.0 / static_cast<double>(K));
    for (const Vector& c : centres) thetas.push_back(pack_parameters(c, 0.5 * SquareMatrix::Identity(di, di)));
  }
  std::vector<AdamState> states(K, AdamState(parameter_count(d)));

  auto record_of = [&](std::size_t epoch, double value) {
    FitRecord r{epoch, value, weights, {}};
    for (const Vector& t : thetas) r.components.push_back(snapshot(t, d));
    return r;
  };

  FitTrace trace;
  trace.loss_kind = loss.kind;
  trace.loss_description = loss.describe();

  const FitTarget full(target);
  // Returns the size-weighted component loss; steps only when `step` is set.
  auto epoch_pass = [&](std::size_t epoch, bool step) {
    const SampleSet batch = target_batch(full, loss.samples_per_epoch, rng);
    const Matrix resp = responsibilities(mixture_from(weights, thetas, d), batch.data());
    const Vector col_mean = resp.colwise().mean().transpose();
    if (step) weights = normalized(col_mean);

    std::vector<std::vector<std::size_t>> members(K);
    for (Eigen::Index i = 0; i < resp.rows(); ++i) {
      const double u = rng.uniform();
      members[u < resp(i, 0) ? 0 : 1].push_back(static_cast<std::size_t>(i));
    }
    double total = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      if (members[k].size() < 2) continue;
      const SampleSet cluster = select_rows(batch, members[k]);
      const Matrix eps = standard_normal_matrix(static_cast<Eigen::Index>(cluster.n()), di, rng);
      const SampleSet current(model_samples(unpack_mean(thetas[k], d), unpack_cholesky(thetas[k], d), eps));
      const EpochLoss epoch_loss = make_epoch_loss(loss, current, cluster, nullptr, rng);
      Vector grad;
      const double value = reparameterized_loss(thetas[k], eps, cluster, epoch_loss, step ? &grad : nullptr);
      require_finite_loss(value, epoch);
      total += value * static_cast<double>(cluster.n()) / static_cast<double>(batch.n());
      if (step) {
        if (!grad.allFinite()) throw NumericalError("fit: non-finite gradient at epoch " + std::to_string(epoch));
        adam_step(thetas[k], grad, states[k], adam);
      }
    }
    return total;
  };

  trace.records.push_back(record_of(0, epoch_pass(0, false)));
  for (std::size_t epoch = 1; epoch <= epochs; ++epoch) {
    const double value = epoch_pass(epoch, true);
    trace.records.push_back(record_of(epoch, value));
  }
  const FitRecord& last = trace.records.back();
  std::vector<GaussianModel> comps;
  for (const auto& c : last.components) comps.push_back(GaussianModel::from_cholesky(c.mean, c.cholesky));
  trace.final_model = MixtureModel(last.weights, std::move(comps));
  return trace;
}

std::string trace_to_json(const FitTrace& trace) {
  using detail::json;
  json records = json::array();
  for (const FitRecord& r : trace.records) {
    json comps = json::array();
    for (const auto& c : r.components) {
      comps.push_back({{"mean", detail::vector_to_json(c.mean)}, {"cholesky", detail::matrix_to_json(c.cholesky)}});
    }
    records.push_back({{"epoch", r.epoch}, {"loss", r.loss}, {"weights", r.weights}, {"components", comps}});
  }
  json out = {{"loss_kind", to_string(trace.loss_kind)},
              {"loss", trace.loss_description},
              {"epochs", trace.records.empty() ? 0 : trace.records.back().epoch},
              {"records", records},
              {"final_model", detail::model_to_json_value(trace.final_model)}};
  return out.dump(2);
}

}  // namespace sdist::fitting
