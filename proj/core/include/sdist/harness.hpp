#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sdist/c2st.hpp"
#include "sdist/generators.hpp"
#include "sdist/kernels.hpp"
#include "sdist/rng.hpp"
#include "sdist/sample_set.hpp"

namespace sdist::harness {

enum class MetricKind { swd, wasserstein, mmd, c2st, fid, kid };

std::string to_string(MetricKind kind);
MetricKind parse_metric_kind(const std::string& name);

/// One distance with its hyperparameters. Fields irrelevant to `kind` are ignored.
struct MetricSpec {
  MetricKind kind = MetricKind::swd;
  double q = 2.0;                             // swd, wasserstein
  std::size_t slices = 100;                   // swd
  std::size_t max_samples = 2000;             // wasserstein
  mmd::KernelFamily kernel = mmd::KernelFamily::gaussian;  // mmd, kid
  std::optional<double> bandwidth;            // mmd gaussian/laplacian; empty = median heuristic
  double degree = 3.0, offset = 1.0;          // polynomial
  std::optional<double> scale;                // polynomial; empty = 1 (mmd) or 1/d (kid)
  double power = 1.0;                         // energy
  c2st::ClassifierSpec classifier = c2st::MlpConfig{};
  std::size_t folds = c2st::kDefaultFolds;

  std::string name() const { return to_string(kind); }
};

enum class ParamAxisKind { bandwidth, slices };

/// Optional hyperparameter axis. Bandwidth values may be relative, i.e.
/// multiples of each comparison's median-heuristic bandwidth.
struct ParamAxis {
  ParamAxisKind kind = ParamAxisKind::bandwidth;
  std::vector<double> values;
  bool relative = false;
};

struct SweepConfig {
  std::string experiment;
  GeneratorSpec generator;
  std::vector<std::size_t> sample_sizes;
  std::vector<std::size_t> dims;
  std::optional<ParamAxis> param_axis;
  std::vector<MetricSpec> metrics;
  std::size_t repeats = 5;
  std::uint64_t base_seed = 0;

  /// Throws std::invalid_argument describing the first problem found.
  void validate() const;
  /// Number of (n, d, param, metric) cells.
  std::size_t cell_count() const;
  /// cell_count() * repeats * 2 comparisons.
  std::size_t report_count() const { return cell_count() * repeats * 2; }
};

/// Parses a config document: one JSON object or an array of them.
std::vector<SweepConfig> parse_sweep_configs(const std::string& json_text);
std::string sweep_config_to_json(const SweepConfig& config);

/// Built-in experiments: fig5a, fig5b, fig5c, figS1, figS2a..c, figS3a..c, figS4.
const std::vector<std::string>& builtin_config_names();
std::string builtin_config_json(const std::string& name);
std::vector<SweepConfig> builtin_configs(const std::string& name);

/// `inputs` marks a direct comparison of two user-supplied sets.
enum class Comparison { true_vs_true, true_vs_model, inputs };
std::string to_string(Comparison c);

struct DistanceReport {
  std::string experiment;
  std::string metric;
  Comparison comparison = Comparison::true_vs_true;
  std::size_t n = 0;
  std::size_t d = 0;
  std::optional<double> param;
  std::size_t repeat = 0;
  std::uint64_t seed = 0;
  double value = 0.0;  // NaN on error rows
  double seconds = 0.0;
  std::string note;    // error message or warning, empty otherwise
};

struct MetricValue {
  double value = 0.0;
  std::string note;
};

/// Evaluates one metric on one pair of sets. `param` overrides the bandwidth
/// or slice count when a parameter axis is active; relative bandwidths must
/// already be resolved to absolute values.
MetricValue evaluate_metric(const MetricSpec& metric, const SampleSet& a, const SampleSet& b, Rng& rng,
                            std::optional<double> bandwidth_override = std::nullopt,
                            std::optional<std::size_t> slices_override = std::nullopt);

/// Data seed of one (n, d) cell and repeat: base_seed XOR mix64(cell * repeats + repeat).
std::uint64_t derive_seed(std::uint64_t base_seed, std::size_t nd_cell, std::size_t repeats, std::size_t repeat);

struct SweepOptions {
  std::size_t threads = 0;  // 0 = hardware concurrency
};

using ReportSink = std::function<void(const DistanceReport&)>;

/// Runs every cell and repeat; `sink` receives reports in cell order
/// (n, d, param, metric, repeat, comparison) as soon as they are available.
/// Metric failures become error rows; the sweep continues.
void run_sweep(const SweepConfig& config, const ReportSink& sink, const SweepOptions& options = {});
std::vector<DistanceReport> run_sweep(const SweepConfig& config, const SweepOptions& options = {});

/// CSV header: experiment,metric,comparison,n,d,param,repeat,seed,value,seconds,note
void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const DistanceReport& report);
std::string reports_to_json(const std::vector<DistanceReport>& reports);
std::string report_to_json(const DistanceReport& report);

}  // namespace sdist::harness
