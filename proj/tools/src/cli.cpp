#include "sdist_cli/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sdist/error.hpp"
#include "sdist/fitting.hpp"
#include "sdist/generators.hpp"
#include "sdist/harness.hpp"
#include "sdist/io.hpp"

namespace sdist::cli {

namespace {

/// Bad flag values found after CLI11 parsing; reported like parse errors.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format;
};

struct GenOptions {
  std::string dist = "gauss";
  std::string side = "truth";
  std::size_t dim = 0;
  std::size_t n = 1000;
  double shift = 1.0;
};

struct DistOptions {
  std::string metric;
  std::string a, b;
  std::string kernel;
  std::string bandwidth = "median";
  std::size_t slices = 100;
  double q = 2.0;
  std::string classifier = "mlp";
  std::size_t k = 5;
  std::size_t folds = 5;
  std::size_t epochs = 300;
  std::vector<std::size_t> hidden{100, 100};
  std::size_t max_samples = 2000;
};

struct SweepCliOptions {
  std::string config;
  std::size_t threads = 0;
  bool print_config = false;
};

struct FitOptions {
  std::string loss = "swd";
  std::string target;
  std::size_t epochs = 500;
  double lr = 0.01;
  std::size_t samples = 0;
  std::size_t slices = 100;
  std::string bandwidth = "median";
  bool mixture = false;
};

std::uint64_t seed_or(const GlobalOptions& g, std::uint64_t fallback) { return g.seed ? *g.seed : fallback; }

std::string resolve_format(const GlobalOptions& g, const std::string& fallback) {
  const std::string f = g.format.empty() ? fallback : g.format;
  if (f != "csv" && f != "json") throw UsageError("--format must be csv or json");
  return f;
}

void with_output(const GlobalOptions& g, std::ostream& fallback, const std::function<void(std::ostream&)>& body) {
  if (g.out.empty()) {
    body(fallback);
    fallback.flush();
    return;
  }
  std::ofstream file(g.out, std::ios::binary | std::ios::trunc);
  if (!file) throw Error("cannot open output file " + g.out);
  body(file);
  file.flush();
  if (!file) throw Error("failed writing output file " + g.out);
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::optional<double> parse_bandwidth(const std::string& text) {
  if (text == "median") return std::nullopt;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || !(v > 0.0)) throw UsageError("--bandwidth must be a positive number or 'median'");
  return v;
}

// ---- gen -------------------------------------------------------------------

void run_gen(const GlobalOptions& g, const GenOptions& o, std::ostream& out) {
  const std::string format = resolve_format(g, "csv");
  if (o.n < 1) throw UsageError("--n must be >= 1");
  std::optional<DistributionModel> model;
  if (ends_with(o.dist, ".json")) {
    model = io::load_model(o.dist);
  } else {
    bool known = false;
    for (const auto& name : harness::generator_names()) known = known || name == o.dist;
    if (!known) throw UsageError("unknown --dist '" + o.dist + "'");
    if (o.side != "truth" && o.side != "model") throw UsageError("--side must be truth or model");
    const std::size_t dim = o.dim ? o.dim : (o.dist == "mog2d" ? 2 : 0);
    if (dim == 0) throw UsageError("--dim is required for generator " + o.dist);
    const auto pair = harness::make_generator({o.dist, o.shift}, dim);
    model = o.side == "truth" ? pair.truth : pair.model;
  }
  Rng rng(seed_or(g, 0), 0);
  const SampleSet set = sample(*model, o.n, rng);
  with_output(g, out, [&](std::ostream& os) {
    if (format == "csv") {
      io::write_samples_csv(set, os);
      return;
    }
    os << "{\"samples\": [";
    for (std::size_t i = 0; i < set.n(); ++i) {
      os << (i ? ",\n  [" : "\n  [");
      for (std::size_t j = 0; j < set.d(); ++j) {
        os << (j ? ", " : "") << io::format_double(set.data()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
      }
      os << ']';
    }
    os << "\n]}\n";
  });
}

// ---- dist ------------------------------------------------------------------

harness::MetricSpec metric_from_flags(const DistOptions& o) {
  harness::MetricSpec m;
  try {
    m.kind = harness::parse_metric_kind(o.metric);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  m.q = o.q;
  m.slices = o.slices;
  m.max_samples = o.max_samples;
  if (o.slices < 1) throw UsageError("--slices must be >= 1");
  if (!(o.q >= 1.0)) throw UsageError("--q must be >= 1");
  if (m.kind == harness::MetricKind::mmd || m.kind == harness::MetricKind::kid) {
    const std::string kernel = o.kernel.empty() ? (m.kind == harness::MetricKind::kid ? "polynomial" : "gaussian") : o.kernel;
    try {
      m.kernel = mmd::parse_kernel_family(kernel);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    m.bandwidth = parse_bandwidth(o.bandwidth);
  }
  if (m.kind == harness::MetricKind::c2st) {
    m.folds = o.folds;
    if (o.folds < 2) throw UsageError("--folds must be >= 2");
    if (o.classifier == "knn") {
      if (o.k < 1) throw UsageError("--k must be >= 1");
      m.classifier = c2st::KnnConfig{o.k};
    } else if (o.classifier == "mlp") {
      c2st::MlpConfig c;
      c.epochs = o.epochs;
      c.hidden_sizes = o.hidden;
      try {
        c.validate();
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      m.classifier = c;
    } else {
      throw UsageError("--classifier must be knn or mlp");
    }
  }
  return m;
}

void run_dist(const GlobalOptions& g, const DistOptions& o, std::ostream& out) {
  const std::string format = resolve_format(g, "csv");
  const harness::MetricSpec metric = metric_from_flags(o);
  const SampleSet a = io::load_samples(o.a);
  const SampleSet b = io::load_samples(o.b);

  harness::DistanceReport r;
  r.experiment = "dist";
  r.metric = metric.name();
  r.comparison = harness::Comparison::inputs;
  r.n = a.n();
  r.d = a.d();
  r.seed = seed_or(g, 0);
  Rng rng(r.seed, 0);
  const auto start = std::chrono::steady_clock::now();
  const harness::MetricValue v = harness::evaluate_metric(metric, a, b, rng);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.value = v.value;
  r.note = v.note;
  with_output(g, out, [&](std::ostream& os) {
    if (format == "csv") {
      harness::write_csv_header(os);
      harness::write_csv_row(os, r);
    } else {
      os << harness::report_to_json(r) << '\n';
    }
  });
}

// ---- sweep -----------------------------------------------------------------

std::vector<harness::SweepConfig> load_sweep_configs(const std::string& ref) {
  for (const auto& name : harness::builtin_config_names()) {
    if (ref == name || ref == name + ".json") {
      std::ifstream probe(ref);
      if (!probe) return harness::builtin_configs(name);
    }
  }
  return harness::parse_sweep_configs(io::read_text_file(ref));
}

void run_sweep_cmd(const GlobalOptions& g, const SweepCliOptions& o, std::ostream& out) {
  if (o.print_config) {
    const std::string text = harness::builtin_config_json(o.config);
    with_output(g, out, [&](std::ostream& os) { os << text << '\n'; });
    return;
  }
  const std::string format = resolve_format(g, ends_with(g.out, ".json") ? "json" : "csv");
  std::vector<harness::SweepConfig> configs = load_sweep_configs(o.config);
  if (g.seed) {
    for (auto& c : configs) c.base_seed = *g.seed;
  }
  harness::SweepOptions options;
  options.threads = o.threads;
  with_output(g, out, [&](std::ostream& os) {
    if (format == "csv") {
      harness::write_csv_header(os);
      for (const auto& c : configs) {
        harness::run_sweep(c, [&](const harness::DistanceReport& r) {
          harness::write_csv_row(os, r);
          os.flush();
        }, options);
      }
    } else {
      std::vector<harness::DistanceReport> all;
      for (const auto& c : configs) {
        auto part = harness::run_sweep(c, options);
        all.insert(all.end(), part.begin(), part.end());
      }
      os << harness::reports_to_json(all) << '\n';
    }
  });
}

// ---- fit -------------------------------------------------------------------

void run_fit(const GlobalOptions& g, const FitOptions& o, std::ostream& out) {
  if (resolve_format(g, "json") != "json") throw UsageError("fit writes JSON traces; --format csv is not supported");
  fitting::LossKind kind;
  try {
    kind = fitting::parse_loss_kind(o.loss);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (o.target.empty()) throw UsageError("--target is required");
  if (!(o.lr > 0.0)) throw UsageError("--lr must be positive");
  const std::size_t samples = o.samples ? o.samples : (o.mixture ? 5000 : 10000);
  fitting::LossSpec loss;
  loss.kind = kind;
  loss.samples_per_epoch = samples;
  loss.slices = o.slices;
  if (kind == fitting::LossKind::mmd) {
    if (const auto bw = parse_bandwidth(o.bandwidth)) loss.kernel = mmd::KernelSpec::gaussian(*bw);
  }
  try {
    loss.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  fitting::AdamConfig adam;
  adam.learning_rate = o.lr;
  Rng rng(seed_or(g, 0), 0);

  fitting::FitTrace trace;
  if (ends_with(o.target, ".json")) {
    const DistributionModel model = io::load_model(o.target);
    if (o.mixture) {
      const SampleSet target = sample(model, samples, rng);
      trace = fitting::fit_mixture_em(target, loss, o.epochs, adam, rng);
    } else {
      trace = fitting::fit_gaussian(fitting::FitTarget(model), loss, o.epochs, adam, rng);
    }
  } else {
    const SampleSet target = io::load_samples(o.target);
    trace = o.mixture ? fitting::fit_mixture_em(target, loss, o.epochs, adam, rng)
                      : fitting::fit_gaussian(fitting::FitTarget(target), loss, o.epochs, adam, rng);
  }
  with_output(g, out, [&](std::ostream& os) { os << fitting::trace_to_json(trace) << '\n'; });
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sample-based statistical distances: generate data, compare sets, run sweeps, fit models", "sdist"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  std::uint64_t seed_value = 0;
  CLI::Option* seed_opt = app.add_option("--seed", seed_value, "Random seed (64-bit unsigned)");
  app.add_option("--out", g.out, "Write output to this file instead of stdout");
  app.add_option("--format", g.format, "Output format: csv or json")->check(CLI::IsMember({"csv", "json"}));

  GenOptions gen;
  CLI::App* gen_cmd = app.add_subcommand("gen", "Write samples from a named generator or a model JSON file");
  gen_cmd->add_option("--dist", gen.dist, "Generator name (gauss, shift-first, shift-all, var-all, mog2d) or model .json");
  gen_cmd->add_option("--side", gen.side, "Which side of a generator pair to sample: truth or model");
  gen_cmd->add_option("--dim", gen.dim, "Dimension (generators only)");
  gen_cmd->add_option("--n", gen.n, "Number of samples");
  gen_cmd->add_option("--shift", gen.shift, "Shift / variance increment of the model side");

  DistOptions dist;
  CLI::App* dist_cmd = app.add_subcommand("dist", "Compute one distance between two sample CSV files");
  dist_cmd->add_option("--metric", dist.metric, "swd, wasserstein, mmd, c2st, fid or kid")->required();
  dist_cmd->add_option("--a,--embeddings-a", dist.a, "First sample CSV")->required();
  dist_cmd->add_option("--b,--embeddings-b", dist.b, "Second sample CSV")->required();
  dist_cmd->add_option("--kernel", dist.kernel, "MMD/KID kernel: gaussian, laplacian, linear, polynomial, energy");
  dist_cmd->add_option("--bandwidth", dist.bandwidth, "Kernel bandwidth or 'median'");
  dist_cmd->add_option("--slices", dist.slices, "Number of random projections (swd)");
  dist_cmd->add_option("--q", dist.q, "Wasserstein order");
  dist_cmd->add_option("--max-samples", dist.max_samples, "Size cap for the exact Wasserstein solver");
  dist_cmd->add_option("--classifier", dist.classifier, "C2ST classifier: knn or mlp");
  dist_cmd->add_option("--k", dist.k, "Neighbours for the knn classifier");
  dist_cmd->add_option("--folds", dist.folds, "Cross-validation folds");
  dist_cmd->add_option("--epochs", dist.epochs, "MLP training epochs");
  dist_cmd->add_option("--hidden", dist.hidden, "MLP hidden layer sizes")->delimiter(',');

  SweepCliOptions sweep;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Run a sweep config (file or built-in name) and stream reports");
  sweep_cmd->add_option("--config", sweep.config, "Config JSON path or built-in name (e.g. fig5b)")->required();
  sweep_cmd->add_option("--threads", sweep.threads, "Worker threads (0 = all cores)");
  sweep_cmd->add_flag("--print-config", sweep.print_config, "Print the built-in config JSON and exit");

  FitOptions fit;
  CLI::App* fit_cmd = app.add_subcommand("fit", "Fit a Gaussian (or a 2-component mixture) by minimizing a distance");
  fit_cmd->add_option("--loss", fit.loss, "swd, mmd or c2st");
  fit_cmd->add_option("--target", fit.target, "Target samples (.csv) or model (.json)")->required();
  fit_cmd->add_option("--epochs", fit.epochs, "Optimization epochs");
  fit_cmd->add_option("--lr", fit.lr, "Adam learning rate");
  fit_cmd->add_option("--samples", fit.samples, "Samples per epoch (default 10000, 5000 with --mixture)");
  fit_cmd->add_option("--slices", fit.slices, "Slices for the swd loss");
  fit_cmd->add_option("--bandwidth", fit.bandwidth, "Gaussian bandwidth for the mmd loss or 'median'");
  fit_cmd->add_flag("--mixture", fit.mixture, "Fit a two-component mixture with distance EM");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  if (seed_opt->count() > 0) g.seed = seed_value;

  try {
    if (*gen_cmd) run_gen(g, gen, out);
    if (*dist_cmd) run_dist(g, dist, out);
    if (*sweep_cmd) run_sweep_cmd(g, sweep, out);
    if (*fit_cmd) run_fit(g, fit, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\nRun with --help for usage.\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

int run_cli(int argc, const char* const* argv) { return run_cli(argc, argv, std::cout, std::cerr); }

}  // namespace sdist::cli
