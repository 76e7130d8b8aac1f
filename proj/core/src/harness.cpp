#include "sdist/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <limits>
#include <mutex>
#include <ostream>
#include <set>
#include <stdexcept>
#include <thread>

#include "json_support.hpp"
#include "sdist/embedding.hpp"
#include "sdist/io.hpp"
#include "sdist/mmd.hpp"
#include "sdist/wasserstein.hpp"

namespace sdist::harness {

using detail::json;

std::string to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::swd: return "swd";
    case MetricKind::wasserstein: return "wasserstein";
    case MetricKind::mmd: return "mmd";
    case MetricKind::c2st: return "c2st";
    case MetricKind::fid: return "fid";
    case MetricKind::kid: return "kid";
  }
  return "unknown";
}

MetricKind parse_metric_kind(const std::string& name) {
  if (name == "swd" || name == "sw" || name == "sliced_wasserstein") return MetricKind::swd;
  if (name == "wasserstein" || name == "w" || name == "exact_wasserstein") return MetricKind::wasserstein;
  if (name == "mmd") return MetricKind::mmd;
  if (name == "c2st") return MetricKind::c2st;
  if (name == "fid" || name == "frechet") return MetricKind::fid;
  if (name == "kid") return MetricKind::kid;
  throw std::invalid_argument("unknown metric '" + name + "' (expected swd, wasserstein, mmd, c2st, fid, kid)");
}

std::string to_string(Comparison c) {
  switch (c) {
    case Comparison::true_vs_true: return "true-vs-true";
    case Comparison::true_vs_model: return "true-vs-model";
    case Comparison::inputs: return "a-vs-b";
  }
  return "unknown";
}

// ---- config JSON -----------------------------------------------------------

namespace {

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) throw std::invalid_argument(where + ": unknown field '" + it.key() + "'");
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw std::invalid_argument(std::string("field '") + key + "' has the wrong type");
  }
}

MetricSpec metric_from_json(const json& j) {
  if (j.is_string()) {
    MetricSpec m;
    m.kind = parse_metric_kind(j.get<std::string>());
    return m;
  }
  if (!j.is_object() || !j.contains("name")) throw std::invalid_argument("metric entries need a 'name'");
  MetricSpec m;
  m.kind = parse_metric_kind(j.at("name").get<std::string>());
  const std::string where = "metric " + m.name();
  switch (m.kind) {
    case MetricKind::swd:
      reject_unknown_keys(j, {"name", "slices", "q"}, where);
      m.slices = get_or<std::size_t>(j, "slices", m.slices);
      m.q = get_or<double>(j, "q", m.q);
      break;
    case MetricKind::wasserstein:
      reject_unknown_keys(j, {"name", "q", "max_samples"}, where);
      m.q = get_or<double>(j, "q", m.q);
      m.max_samples = get_or<std::size_t>(j, "max_samples", m.max_samples);
      break;
    case MetricKind::mmd:
    case MetricKind::kid: {
      reject_unknown_keys(j, {"name", "kernel", "bandwidth", "degree", "offset", "scale", "power"}, where);
      m.kernel = mmd::parse_kernel_family(
          get_or<std::string>(j, "kernel", m.kind == MetricKind::kid ? "polynomial" : "gaussian"));
      if (j.contains("bandwidth")) {
        const json& bw = j.at("bandwidth");
        if (bw.is_string()) {
          if (bw.get<std::string>() != "median") throw std::invalid_argument(where + ": bandwidth must be a number or \"median\"");
        } else {
          m.bandwidth = get_or<double>(j, "bandwidth", 1.0);
        }
      }
      m.degree = get_or<double>(j, "degree", m.degree);
      m.offset = get_or<double>(j, "offset", m.offset);
      if (j.contains("scale")) m.scale = get_or<double>(j, "scale", 1.0);
      m.power = get_or<double>(j, "power", m.power);
      break;
    }
    case MetricKind::c2st: {
      reject_unknown_keys(j,
                          {"name", "classifier", "k", "folds", "hidden", "epochs", "batch_size", "learning_rate", "l2"},
                          where);
      m.folds = get_or<std::size_t>(j, "folds", m.folds);
      const std::string kind = get_or<std::string>(j, "classifier", "mlp");
      if (kind == "knn") {
        m.classifier = c2st::KnnConfig{get_or<std::size_t>(j, "k", 5)};
      } else if (kind == "mlp") {
        c2st::MlpConfig c;
        c.hidden_sizes = get_or<std::vector<std::size_t>>(j, "hidden", c.hidden_sizes);
        c.epochs = get_or<std::size_t>(j, "epochs", c.epochs);
        c.batch_size = get_or<std::size_t>(j, "batch_size", c.batch_size);
        c.learning_rate = get_or<double>(j, "learning_rate", c.learning_rate);
        c.l2_penalty = get_or<double>(j, "l2", c.l2_penalty);
        m.classifier = c;
      } else {
        throw std::invalid_argument(where + ": classifier must be 'knn' or 'mlp'");
      }
      break;
    }
    case MetricKind::fid:
      reject_unknown_keys(j, {"name"}, where);
      break;
  }
  return m;
}

json metric_to_json(const MetricSpec& m) {
  json j = {{"name", m.name()}};
  switch (m.kind) {
    case MetricKind::swd:
      j["slices"] = m.slices;
      j["q"] = m.q;
      break;
    case MetricKind::wasserstein:
      j["q"] = m.q;
      j["max_samples"] = m.max_samples;
      break;
    case MetricKind::mmd:
    case MetricKind::kid:
      j["kernel"] = mmd::to_string(m.kernel);
      switch (m.kernel) {
        case mmd::KernelFamily::gaussian:
        case mmd::KernelFamily::laplacian:
          j["bandwidth"] = m.bandwidth ? json(*m.bandwidth) : json("median");
          break;
        case mmd::KernelFamily::polynomial:
          j["degree"] = m.degree;
          j["offset"] = m.offset;
          if (m.scale) j["scale"] = *m.scale;
          break;
        case mmd::KernelFamily::energy: j["power"] = m.power; break;
        case mmd::KernelFamily::linear: break;
      }
      break;
    case MetricKind::c2st:
      j["folds"] = m.folds;
      if (const auto* knn = std::get_if<c2st::KnnConfig>(&m.classifier)) {
        j["classifier"] = "knn";
        j["k"] = knn->k;
      } else {
        const auto& c = std::get<c2st::MlpConfig>(m.classifier);
        j["classifier"] = "mlp";
        j["hidden"] = c.hidden_sizes;
        j["epochs"] = c.epochs;
        j["batch_size"] = c.batch_size;
        j["learning_rate"] = c.learning_rate;
        j["l2"] = c.l2_penalty;
      }
      break;
    case MetricKind::fid: break;
  }
  return j;
}

SweepConfig config_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("sweep config must be a JSON object");
  reject_unknown_keys(j, {"experiment", "generator", "sample_sizes", "dims", "param_axis", "metrics", "repeats", "base_seed"},
                      "sweep config");
  SweepConfig c;
  c.experiment = get_or<std::string>(j, "experiment", "");
  if (j.contains("generator")) {
    const json& g = j.at("generator");
    if (g.is_string()) {
      c.generator.name = g.get<std::string>();
    } else {
      reject_unknown_keys(g, {"name", "shift"}, "generator");
      c.generator.name = get_or<std::string>(g, "name", c.generator.name);
      c.generator.shift = get_or<double>(g, "shift", c.generator.shift);
    }
  }
  c.sample_sizes = get_or<std::vector<std::size_t>>(j, "sample_sizes", {});
  c.dims = get_or<std::vector<std::size_t>>(j, "dims", {});
  if (j.contains("param_axis")) {
    const json& a = j.at("param_axis");
    reject_unknown_keys(a, {"name", "values", "relative"}, "param_axis");
    ParamAxis axis;
    const std::string name = get_or<std::string>(a, "name", "");
    if (name == "bandwidth") {
      axis.kind = ParamAxisKind::bandwidth;
    } else if (name == "slices") {
      axis.kind = ParamAxisKind::slices;
    } else {
      throw std::invalid_argument("param_axis name must be 'bandwidth' or 'slices'");
    }
    axis.values = get_or<std::vector<double>>(a, "values", {});
    axis.relative = get_or<bool>(a, "relative", false);
    c.param_axis = axis;
  }
  if (j.contains("metrics")) {
    if (!j.at("metrics").is_array()) throw std::invalid_argument("'metrics' must be an array");
    for (const json& m : j.at("metrics")) c.metrics.push_back(metric_from_json(m));
  }
  c.repeats = get_or<std::size_t>(j, "repeats", c.repeats);
  c.base_seed = get_or<std::uint64_t>(j, "base_seed", c.base_seed);
  return c;
}

}  // namespace

std::vector<SweepConfig> parse_sweep_configs(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("sweep config is not valid JSON: ") + e.what());
  }
  std::vector<SweepConfig> out;
  if (doc.is_array()) {
    for (const json& item : doc) out.push_back(config_from_json(item));
  } else {
    out.push_back(config_from_json(doc));
  }
  if (out.empty()) throw std::invalid_argument("sweep config array is empty");
  for (const auto& c : out) c.validate();
  return out;
}

std::string sweep_config_to_json(const SweepConfig& c) {
  json j = {{"experiment", c.experiment},
            {"generator", {{"name", c.generator.name}, {"shift", c.generator.shift}}},
            {"sample_sizes", c.sample_sizes},
            {"dims", c.dims},
            {"repeats", c.repeats},
            {"base_seed", c.base_seed}};
  if (c.param_axis) {
    j["param_axis"] = {{"name", c.param_axis->kind == ParamAxisKind::bandwidth ? "bandwidth" : "slices"},
                       {"values", c.param_axis->values},
                       {"relative", c.param_axis->relative}};
  }
  json metrics = json::array();
  for (const auto& m : c.metrics) metrics.push_back(metric_to_json(m));
  j["metrics"] = metrics;
  return j.dump(2);
}

void SweepConfig::validate() const {
  if (experiment.empty()) throw std::invalid_argument("sweep config: 'experiment' must be set");
  const std::string where = "sweep config '" + experiment + "': ";
  if (sample_sizes.empty()) throw std::invalid_argument(where + "'sample_sizes' must not be empty");
  if (dims.empty()) throw std::invalid_argument(where + "'dims' must not be empty");
  if (metrics.empty()) throw std::invalid_argument(where + "'metrics' must not be empty");
  if (repeats < 1) throw std::invalid_argument(where + "'repeats' must be >= 1");
  for (std::size_t n : sample_sizes) {
    if (n < 2) throw std::invalid_argument(where + "sample sizes must be >= 2");
  }
  for (std::size_t d : dims) {
    if (d < 1) throw std::invalid_argument(where + "dimensions must be >= 1");
    (void)make_generator(generator, d);
  }
  const std::size_t n_max = *std::max_element(sample_sizes.begin(), sample_sizes.end());
  const std::size_t n_min = *std::min_element(sample_sizes.begin(), sample_sizes.end());
  for (const auto& m : metrics) {
    switch (m.kind) {
      case MetricKind::swd:
        if (m.slices < 1) throw std::invalid_argument(where + "swd needs slices >= 1");
        if (!(m.q >= 1.0)) throw std::invalid_argument(where + "swd needs q >= 1");
        break;
      case MetricKind::wasserstein:
        if (!(m.q >= 1.0)) throw std::invalid_argument(where + "wasserstein needs q >= 1");
        if (n_max > m.max_samples) {
          throw std::invalid_argument(where + "exact wasserstein is capped at max_samples=" + std::to_string(m.max_samples) +
                                      " but the grid reaches n=" + std::to_string(n_max));
        }
        break;
      case MetricKind::mmd:
      case MetricKind::kid:
        if (m.bandwidth && !(*m.bandwidth > 0.0)) throw std::invalid_argument(where + "bandwidth must be positive");
        break;
      case MetricKind::c2st:
        if (m.folds < 2) throw std::invalid_argument(where + "c2st needs folds >= 2");
        if (n_min < m.folds) throw std::invalid_argument(where + "c2st needs n >= folds in every cell");
        if (const auto* c = std::get_if<c2st::MlpConfig>(&m.classifier)) c->validate();
        if (const auto* k = std::get_if<c2st::KnnConfig>(&m.classifier); k && k->k < 1) {
          throw std::invalid_argument(where + "knn needs k >= 1");
        }
        break;
      case MetricKind::fid: break;
    }
  }
  if (param_axis) {
    if (param_axis->values.empty()) throw std::invalid_argument(where + "param_axis needs values");
    for (double v : param_axis->values) {
      if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(where + "param_axis values must be positive");
      if (param_axis->kind == ParamAxisKind::slices && v != std::floor(v)) {
        throw std::invalid_argument(where + "slice counts must be integers");
      }
    }
    if (param_axis->relative && param_axis->kind != ParamAxisKind::bandwidth) {
      throw std::invalid_argument(where + "only bandwidth axes can be relative");
    }
    for (const auto& m : metrics) {
      const bool ok = param_axis->kind == ParamAxisKind::bandwidth
                          ? (m.kind == MetricKind::mmd || m.kind == MetricKind::kid) &&
                                (m.kernel == mmd::KernelFamily::gaussian || m.kernel == mmd::KernelFamily::laplacian)
                          : m.kind == MetricKind::swd;
      if (!ok) throw std::invalid_argument(where + "metric " + m.name() + " has no parameter matching param_axis");
    }
  }
}

std::size_t SweepConfig::cell_count() const {
  const std::size_t params = param_axis ? param_axis->values.size() : 1;
  return sample_sizes.size() * dims.size() * params * metrics.size();
}

// ---- metric evaluation -----------------------------------------------------

namespace {

mmd::KernelSpec build_kernel(const MetricSpec& m, const SampleSet& a, const SampleSet& b,
                             std::optional<double> bandwidth_override) {
  switch (m.kernel) {
    case mmd::KernelFamily::gaussian:
    case mmd::KernelFamily::laplacian: {
      const double sigma = bandwidth_override ? *bandwidth_override
                           : m.bandwidth    ? *m.bandwidth
                                            : mmd::median_heuristic(a, b);
      return m.kernel == mmd::KernelFamily::gaussian ? mmd::KernelSpec::gaussian(sigma) : mmd::KernelSpec::laplacian(sigma);
    }
    case mmd::KernelFamily::linear: return mmd::KernelSpec::linear();
    case mmd::KernelFamily::polynomial: {
      const double scale = m.scale ? *m.scale : (m.kind == MetricKind::kid ? 1.0 / static_cast<double>(a.d()) : 1.0);
      return mmd::KernelSpec::polynomial(m.degree, m.offset, scale);
    }
    case mmd::KernelFamily::energy: return mmd::KernelSpec::energy(m.power);
  }
  throw std::logic_error("unreachable");
}

}  // namespace

MetricValue evaluate_metric(const MetricSpec& metric, const SampleSet& a, const SampleSet& b, Rng& rng,
                            std::optional<double> bandwidth_override, std::optional<std::size_t> slices_override) {
  switch (metric.kind) {
    case MetricKind::swd:
      return {wasserstein::sliced_wasserstein(a, b, metric.q, slices_override.value_or(metric.slices), rng), {}};
    case MetricKind::wasserstein:
      return {wasserstein::exact_wasserstein(a, b, metric.q, metric.max_samples).distance, {}};
    case MetricKind::mmd:
    case MetricKind::kid:
      return {mmd::mmd2_unbiased(a, b, build_kernel(metric, a, b, bandwidth_override)).mmd_squared, {}};
    case MetricKind::c2st:
      return {c2st::c2st(a, b, metric.classifier, metric.folds, rng).accuracy, {}};
    case MetricKind::fid: {
      require_same_dimension(a, b, "fid");
      const auto ma = embedding::fit_moments(a);
      const auto mb = embedding::fit_moments(b);
      return {embedding::frechet_distance(ma, mb), embedding::moment_warning(ma, mb)};
    }
  }
  throw std::logic_error("unreachable");
}

std::uint64_t derive_seed(std::uint64_t base_seed, std::size_t nd_cell, std::size_t repeats, std::size_t repeat) {
  return base_seed ^ mix64(static_cast<std::uint64_t>(nd_cell) * repeats + repeat);
}

// ---- sweep execution -------------------------------------------------------

namespace {

struct NdCell {
  std::size_t n;
  std::size_t d;
};

// All reports of one (n, d) cell and one repeat.
std::vector<DistanceReport> run_job(const SweepConfig& config, std::size_t nd_index, const NdCell& cell,
                                    std::size_t repeat) {
  const std::uint64_t seed = derive_seed(config.base_seed, nd_index, config.repeats, repeat);
  const GeneratorPair gen = make_generator(config.generator, cell.d);
  Rng data_rng(seed, 0);
  const SampleSet truth_a = sample(gen.truth, cell.n, data_rng);
  const SampleSet truth_b = sample(gen.truth, cell.n, data_rng);
  const SampleSet model = sample(gen.model, cell.n, data_rng);
  const SampleSet* other[2] = {&truth_b, &model};

  const std::size_t n_params = config.param_axis ? config.param_axis->values.size() : 1;
  const std::size_t n_metrics = config.metrics.size();

  std::optional<double> median[2];
  std::vector<DistanceReport> out;
  out.reserve(n_params * n_metrics * 2);
  for (std::size_t p = 0; p < n_params; ++p) {
    for (std::size_t mi = 0; mi < n_metrics; ++mi) {
      const MetricSpec& metric = config.metrics[mi];
      const Rng metric_rng(seed, 100 + p * n_metrics + mi);
      for (int c = 0; c < 2; ++c) {
        DistanceReport r;
        r.experiment = config.experiment;
        r.metric = metric.name();
        r.comparison = c == 0 ? Comparison::true_vs_true : Comparison::true_vs_model;
        r.n = cell.n;
        r.d = cell.d;
        r.repeat = repeat;
        r.seed = seed;
        Rng rng = metric_rng.split(static_cast<std::uint64_t>(c));
        std::optional<double> bandwidth;
        std::optional<std::size_t> slices;
        const auto start = std::chrono::steady_clock::now();
        try {
          if (config.param_axis) {
            const double v = config.param_axis->values[p];
            r.param = v;
            if (config.param_axis->kind == ParamAxisKind::slices) {
              slices = static_cast<std::size_t>(v);
            } else if (config.param_axis->relative) {
              if (!median[c]) median[c] = mmd::median_heuristic(truth_a, *other[c]);
              bandwidth = v * *median[c];
            } else {
              bandwidth = v;
            }
          }
          const MetricValue mv = evaluate_metric(metric, truth_a, *other[c], rng, bandwidth, slices);
          r.value = mv.value;
          r.note = mv.note;
          if (!std::isfinite(r.value)) {
            r.note = "non-finite metric value";
            r.value = std::numeric_limits<double>::quiet_NaN();
          }
        } catch (const std::exception& e) {
          r.value = std::numeric_limits<double>::quiet_NaN();
          r.note = e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        out.push_back(std::move(r));
      }
    }
  }
  return out;
}

}  // namespace

void run_sweep(const SweepConfig& config, const ReportSink& sink, const SweepOptions& options) {
  config.validate();
  std::vector<NdCell> cells;
  for (std::size_t n : config.sample_sizes) {
    for (std::size_t d : config.dims) cells.push_back({n, d});
  }
  const std::size_t repeats = config.repeats;
  const std::size_t jobs = cells.size() * repeats;
  std::size_t threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, jobs);

  std::vector<std::vector<DistanceReport>> results(jobs);
  std::vector<char> done(jobs, 0);
  std::mutex mutex;
  std::condition_variable ready;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;

  auto worker = [&] {
    for (;;) {
      const std::size_t job = next.fetch_add(1);
      if (job >= jobs) return;
      std::vector<DistanceReport> reports;
      std::exception_ptr err;
      try {
        reports = run_job(config, job / repeats, cells[job / repeats], job % repeats);
      } catch (...) {
        err = std::current_exception();
      }
      {
        std::lock_guard<std::mutex> lock(mutex);
        results[job] = std::move(reports);
        done[job] = 1;
        if (err && !failure) failure = err;
      }
      ready.notify_all();
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);

  // Emit one (n, d) cell at a time, grouped by param, metric, repeat, comparison.
  std::exception_ptr sink_failure;
  const std::size_t per_job = results.empty() ? 0 : config.cell_count() / cells.size() * 2;
  for (std::size_t cell = 0; cell < cells.size() && !sink_failure; ++cell) {
    {
      std::unique_lock<std::mutex> lock(mutex);
      ready.wait(lock, [&] {
        for (std::size_t r = 0; r < repeats; ++r) {
          if (!done[cell * repeats + r]) return false;
        }
        return true;
      });
      if (failure) break;
    }
    try {
      for (std::size_t slot = 0; slot < per_job; slot += 2) {
        for (std::size_t r = 0; r < repeats; ++r) {
          const auto& rs = results[cell * repeats + r];
          sink(rs[slot]);
          sink(rs[slot + 1]);
        }
      }
    } catch (...) {
      sink_failure = std::current_exception();
      next.store(jobs);
    }
    for (std::size_t r = 0; r < repeats; ++r) std::vector<DistanceReport>().swap(results[cell * repeats + r]);
  }
  if (sink_failure || failure) next.store(jobs);
  for (auto& t : pool) t.join();
  if (sink_failure) std::rethrow_exception(sink_failure);
  if (failure) std::rethrow_exception(failure);
}

std::vector<DistanceReport> run_sweep(const SweepConfig& config, const SweepOptions& options) {
  std::vector<DistanceReport> out;
  out.reserve(config.report_count());
  run_sweep(config, [&](const DistanceReport& r) { out.push_back(r); }, options);
  return out;
}

// ---- output ----------------------------------------------------------------

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string number_or_nan(double v) { return std::isfinite(v) ? io::format_double(v) : "NaN"; }

json report_json_value(const DistanceReport& r) {
  return {{"experiment", r.experiment},
          {"metric", r.metric},
          {"comparison", to_string(r.comparison)},
          {"n", r.n},
          {"d", r.d},
          {"param", r.param ? json(*r.param) : json(nullptr)},
          {"repeat", r.repeat},
          {"seed", r.seed},
          {"value", std::isfinite(r.value) ? json(r.value) : json(nullptr)},
          {"seconds", r.seconds},
          {"note", r.note}};
}

}  // namespace

void write_csv_header(std::ostream& out) { out << "experiment,metric,comparison,n,d,param,repeat,seed,value,seconds,note\n"; }

void write_csv_row(std::ostream& out, const DistanceReport& r) {
  out << csv_field(r.experiment) << ',' << r.metric << ',' << to_string(r.comparison) << ',' << r.n << ',' << r.d << ','
      << (r.param ? io::format_double(*r.param) : std::string()) << ',' << r.repeat << ',' << r.seed << ','
      << number_or_nan(r.value) << ',' << io::format_double(r.seconds) << ',' << csv_field(r.note) << '\n';
}

std::string report_to_json(const DistanceReport& report) { return report_json_value(report).dump(2); }

std::string reports_to_json(const std::vector<DistanceReport>& reports) {
  json arr = json::array();
  for (const auto& r : reports) arr.push_back(report_json_value(r));
  return arr.dump(2);
}

}  // namespace sdist::harness
