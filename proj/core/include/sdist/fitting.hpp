#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sdist/adam.hpp"
#include "sdist/distributions.hpp"
#include "sdist/kernels.hpp"
#include "sdist/rng.hpp"
#include "sdist/sample_set.hpp"
#include "sdist/wasserstein.hpp"

namespace sdist::fitting {

enum class LossKind { sliced_wasserstein, mmd, c2st_optimal };

std::string to_string(LossKind kind);
/// Accepts "swd"/"sliced_wasserstein", "mmd", "c2st"/"c2st_optimal".
LossKind parse_loss_kind(const std::string& name);

struct LossSpec {
  LossKind kind = LossKind::sliced_wasserstein;
  std::size_t slices = wasserstein::kDefaultSlices;
  /// Gaussian kernel for the mmd loss. When empty the bandwidth is the
  /// median heuristic of each epoch's pooled batch, held constant for that
  /// epoch's gradient.
  std::optional<mmd::KernelSpec> kernel;
  std::size_t samples_per_epoch = 10000;

  static LossSpec sliced_wasserstein(std::size_t slices = wasserstein::kDefaultSlices, std::size_t samples = 10000);
  static LossSpec mmd(std::optional<mmd::KernelSpec> kernel = std::nullopt, std::size_t samples = 10000);
  static LossSpec c2st_optimal(std::size_t samples = 10000);

  void validate() const;
  std::string describe() const;
};

/// Parameters of one Gaussian component after an epoch.
struct ComponentSnapshot {
  Vector mean;
  SquareMatrix cholesky;  // lower triangular, positive diagonal
};

/// Record 0 is the initialization. Record e >= 1 holds the loss measured at
/// the start of epoch e and the parameters after that epoch's update.
struct FitRecord {
  std::size_t epoch = 0;
  double loss = 0.0;
  std::vector<double> weights;  // {1} for a single Gaussian
  std::vector<ComponentSnapshot> components;
};

struct FitTrace {
  LossKind loss_kind = LossKind::sliced_wasserstein;
  std::string loss_description;
  std::vector<FitRecord> records;
  DistributionModel final_model = GaussianModel::standard(1);
};

using FitTarget = std::variant<SampleSet, DistributionModel>;

// ---- parameterization ---------------------------------------------------
//
// theta = [mean (d); lower-triangular raw entries, row by row (d(d+1)/2)].
// Off-diagonal raw entries are used as is, diagonal ones through softplus.

std::size_t parameter_count(std::size_t dim);
Vector pack_parameters(const Vector& mean, const SquareMatrix& cholesky);
Vector unpack_mean(const Vector& theta, std::size_t dim);
SquareMatrix unpack_cholesky(const Vector& theta, std::size_t dim);
double softplus(double x);
double inverse_softplus(double y);

/// Optimal-classifier loss against a target with a known density.
struct OptimalC2stLoss {
  const DistributionModel* target = nullptr;
};

/// One epoch's loss with every random choice frozen.
using EpochLoss = std::variant<wasserstein::SliceDirections, mmd::KernelSpec, OptimalC2stLoss>;

/// Loss of the model x_i = mu + C eps_i (eps: rows of standard normals)
/// against `target`; fills d loss / d theta when `gradient` is non-null.
///   sliced Wasserstein  SW_2^2, analytic gradient
///   gaussian mmd        unbiased MMD^2, analytic gradient
///   optimal c2st        log 2 - cross-entropy of the density-ratio classifier,
///                       central finite differences (d <= 5)
double reparameterized_loss(const Vector& theta, const Matrix& eps, const SampleSet& target, const EpochLoss& loss,
                            Vector* gradient = nullptr);

inline constexpr std::size_t kMaxFiniteDifferenceDim = 5;

/// Single-Gaussian fit by stochastic gradient descent (Adam). Without `init`
/// the start is mean = batch mean + 0.1 N(0, I), Cholesky factor 0.5 I.
FitTrace fit_gaussian(const FitTarget& target, const LossSpec& loss, std::size_t epochs, const AdamConfig& adam,
                      Rng& rng, const std::optional<GaussianModel>& init = std::nullopt);

/// Posterior component probabilities, one row per point; rows sum to 1.
Matrix responsibilities(const MixtureModel& mixture, const Matrix& points);

/// Two-component mixture fit: E-step responsibilities, weight update, latent
/// assignment sampling, then one distance-loss step per component on its
/// assigned points. A component with fewer than 2 assigned points skips its
/// step that epoch. Without `init` the start is 2-means on the target with
/// Cholesky factors 0.5 I. The c2st_optimal loss is not available here.
FitTrace fit_mixture_em(const SampleSet& target, const LossSpec& loss, std::size_t epochs, const AdamConfig& adam,
                        Rng& rng, const std::optional<MixtureModel>& init = std::nullopt);

std::string trace_to_json(const FitTrace& trace);

}  // namespace sdist::fitting
