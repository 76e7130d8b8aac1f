#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "criteria.hpp"
#include "oracles.hpp"
#include "sdist/generators.hpp"
#include "sdist/harness.hpp"
#include "sdist/mmd.hpp"
#include "sdist_cli/cli.hpp"

namespace sdist::acceptance {
namespace {

using harness::Comparison;
using testing::Summary;

struct Groups {
  std::map<std::string, std::vector<double>> tt, tm;
};

Groups group_reports(const std::vector<harness::DistanceReport>& reports, std::string& errors) {
  Groups g;
  for (const auto& r : reports) {
    if (!r.note.empty() && std::isnan(r.value)) errors += r.metric + ": " + r.note + "; ";
    (r.comparison == Comparison::true_vs_true ? g.tt : g.tm)[r.metric].push_back(r.value);
  }
  return g;
}

harness::SweepConfig builtin_single(const std::string& name, std::size_t n, std::size_t d) {
  auto config = harness::builtin_configs(name).at(0);
  config.sample_sizes = {n};
  config.dims = {d};
  return config;
}

Outcome fig5b_reproduction() {
  const auto config = builtin_single("fig5b", 4000, 10);
  std::string errors;
  const auto g = group_reports(harness::run_sweep(config), errors);
  bool ok = errors.empty();
  std::string detail;
  for (const auto& [metric, tt_values] : g.tt) {
    const Summary tt = testing::summarize(tt_values), tm = testing::summarize(g.tm.at(metric));
    const double sd = testing::pooled_sd(tt, tm);
    const double gap = (tm.mean - tt.mean) / sd;
    ok = ok && gap >= 3.0;
    detail += metric + " tt " + fmt(tt.mean, 4) + " tm " + fmt(tm.mean, 4) + " gap " + fmt(gap, 3) + " SD; ";
  }
  return {ok, detail + errors + "need >= 3 pooled SD"};
}

Outcome fig5c_reproduction() {
  const auto config = builtin_single("fig5c", 10000, 1000);
  std::string errors;
  const auto g = group_reports(harness::run_sweep(config), errors);
  bool ok = errors.empty();
  std::string detail;
  for (const auto& [metric, tt_values] : g.tt) {
    const Summary tt = testing::summarize(tt_values), tm = testing::summarize(g.tm.at(metric));
    const double gap = std::abs(tm.mean - tt.mean) / testing::pooled_sd(tt, tm);
    if (metric == "c2st") {
      ok = ok && tm.mean >= 0.9;
      detail += "c2st tm " + fmt(tm.mean, 4) + " (need >= 0.9); ";
    } else {
      ok = ok && gap <= 3.0;
      detail += metric + " tt " + fmt(tt.mean, 4) + " tm " + fmt(tm.mean, 4) + " gap " + fmt(gap, 3) +
                " SD (need <= 3); ";
    }
  }
  return {ok, detail + errors};
}

Outcome bandwidth_sensitivity() {
  const std::vector<double> grid{0.01, 0.03, 0.1, 0.3, 1, 3, 10, 30, 100};
  struct Case {
    std::string generator;
    std::size_t d;
  };
  bool ok = true;
  std::string detail;
  std::uint64_t seed = 614;
  for (const auto& c : {Case{"mog2d", 2}, Case{"shift-first", 10}, Case{"shift-first", 100}}) {
    harness::SweepConfig config;
    config.experiment = "bandwidth";
    config.generator = {c.generator, 1.0};
    config.sample_sizes = {2000};
    config.dims = {c.d};
    config.param_axis = harness::ParamAxis{harness::ParamAxisKind::bandwidth, grid, true};
    harness::MetricSpec m;
    m.kind = harness::MetricKind::mmd;
    config.metrics = {m};
    config.repeats = 5;
    config.base_seed = seed++;
    std::vector<std::vector<double>> by_param(grid.size());
    for (const auto& r : harness::run_sweep(config)) {
      if (r.comparison != Comparison::true_vs_model) continue;
      const auto idx = static_cast<std::size_t>(std::find(grid.begin(), grid.end(), *r.param) - grid.begin());
      by_param.at(idx).push_back(r.value);
    }
    std::vector<Summary> s;
    for (const auto& v : by_param) s.push_back(testing::summarize(v));
    std::size_t peak = 0;
    for (std::size_t i = 1; i < s.size(); ++i)
      if (s[i].mean > s[peak].mean) peak = i;
    std::size_t bumps = 0;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      const double noise = 3.0 * std::hypot(s[i].se(), s[i + 1].se());
      if (i < peak && s[i].mean > s[i + 1].mean + noise) ++bumps;
      if (i >= peak && s[i + 1].mean > s[i].mean + noise) ++bumps;
    }
    const double top = s[peak].mean;
    const double lo = s.front().mean / top, hi = s.back().mean / top;
    const bool case_ok = bumps == 0 && top > 0.0 && std::abs(lo) <= 0.05 && std::abs(hi) <= 0.05;
    ok = ok && case_ok;
    detail += c.generator + " d=" + std::to_string(c.d) + ": peak at " + fmt(grid[peak]) + "x median, ends " +
              fmt(lo, 3) + "/" + fmt(hi, 3) + " of peak, " + std::to_string(bumps) + " bumps; ";
  }
  return {ok, detail + "ends must be <= 5% of peak"};
}

struct CliRun {
  int code = 0;
  std::string out;
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "sdist");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str() + err.str()};
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Drops the wall-clock column from CSV reports and the "seconds" field from JSON reports.
std::string value_columns(const std::string& text) {
  if (!text.empty() && (text.front() == '{' || text.front() == '[')) {
    auto j = nlohmann::json::parse(text);
    auto strip = [](nlohmann::json& o) {
      if (o.is_object()) o.erase("seconds");
    };
    if (j.is_array())
      for (auto& o : j) strip(o);
    else
      strip(j);
    return j.dump();
  }
  std::istringstream in(text);
  std::string line, out;
  std::size_t seconds_col = std::string::npos;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (seconds_col == std::string::npos) {
      const auto it = std::find(cells.begin(), cells.end(), "seconds");
      if (it != cells.end()) seconds_col = static_cast<std::size_t>(it - cells.begin());
    }
    for (std::size_t i = 0; i < cells.size(); ++i)
      if (i != seconds_col) out += cells[i] + ",";
    out += "\n";
  }
  return out;
}

Outcome cli_determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("sdist_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const auto p = [&](const std::string& name) { return (dir / name).string(); };
  {
    std::ofstream cfg(p("sweep.json"));
    cfg << R"([{"experiment":"det-bw","generator":{"name":"shift-first"},"sample_sizes":[60,120],"dims":[2,5],)"
        << R"("param_axis":{"name":"bandwidth","values":[0.5,2],"relative":true},"metrics":[{"name":"mmd"}],)"
        << R"("repeats":2,"base_seed":9},)"
        << R"({"experiment":"det","generator":{"name":"mog2d"},"sample_sizes":[60],"dims":[2],)"
        << R"("metrics":[{"name":"swd","slices":20},{"name":"c2st","epochs":3,"hidden":[8]},)"
        << R"({"name":"c2st","classifier":"knn"},{"name":"fid"},{"name":"kid"}],"repeats":3,"base_seed":10}])";
  }
  cli({"--seed", "1", "--out", p("a.csv"), "gen", "--dist", "mog2d", "--n", "150"});
  cli({"--seed", "2", "--out", p("b.csv"), "gen", "--dist", "mog2d", "--side", "model", "--n", "150"});

  const std::vector<std::vector<std::string>> invocations{
      {"--seed", "7", "gen", "--dist", "shift-all", "--dim", "4", "--n", "30"},
      {"--seed", "7", "dist", "--metric", "swd", "--a", p("a.csv"), "--b", p("b.csv")},
      {"--seed", "7", "dist", "--metric", "wasserstein", "--a", p("a.csv"), "--b", p("b.csv")},
      {"--seed", "7", "dist", "--metric", "mmd", "--a", p("a.csv"), "--b", p("b.csv")},
      {"--seed", "7", "dist", "--metric", "c2st", "--classifier", "knn", "--a", p("a.csv"), "--b", p("b.csv")},
      {"--seed", "7", "dist", "--metric", "c2st", "--epochs", "5", "--a", p("a.csv"), "--b", p("b.csv")},
      {"--seed", "7", "--format", "json", "dist", "--metric", "fid", "--a", p("a.csv"), "--b", p("b.csv")},
      {"--seed", "7", "dist", "--metric", "kid", "--a", p("a.csv"), "--b", p("b.csv")},
      {"--seed", "7", "sweep", "--config", p("sweep.json"), "--threads", "2"},
      {"--seed", "7", "--format", "json", "sweep", "--config", p("sweep.json"), "--threads", "1"},
      {"--seed", "7", "fit", "--loss", "swd", "--target", p("a.csv"), "--epochs", "20", "--samples", "100"},
      {"--seed", "7", "fit", "--loss", "mmd", "--target", p("a.csv"), "--epochs", "10", "--samples", "100",
       "--mixture"},
  };
  std::size_t mismatches = 0, failures = 0;
  std::string detail;
  for (const auto& args : invocations) {
    const auto first = cli(args), second = cli(args);
    if (first.code != 0 || second.code != 0) {
      ++failures;
      detail += "exit " + std::to_string(first.code) + " for " + args[2] + "; ";
      continue;
    }
    if (value_columns(first.out) != value_columns(second.out) || first.out.empty()) {
      ++mismatches;
      detail += args[2] + " output differs; ";
    }
  }
  const std::string out_file_a = p("fit1.json"), out_file_b = p("fit2.json");
  cli({"--seed", "3", "--out", out_file_a, "fit", "--loss", "swd", "--target", p("b.csv"), "--epochs", "5"});
  cli({"--seed", "3", "--out", out_file_b, "fit", "--loss", "swd", "--target", p("b.csv"), "--epochs", "5"});
  if (read_file(out_file_a).empty() || read_file(out_file_a) != read_file(out_file_b)) {
    ++mismatches;
    detail += "fit --out files differ; ";
  }
  fs::remove_all(dir);
  return {mismatches == 0 && failures == 0,
          std::to_string(invocations.size() + 1) + " invocations, " + std::to_string(mismatches) + " mismatches, " +
              std::to_string(failures) + " failures; " + detail};
}

}  // namespace

std::vector<Criterion> experiment_criteria() {
  return {
      {"fig5b_reproduction", "shift-first d=10, n=4000: every metric separates model from baseline", fig5b_reproduction,
       300.0},
      {"fig5c_reproduction", "shift-first d=1000: C2ST >= 0.9 while SW and MMD stay near baseline", fig5c_reproduction,
       600.0},
      {"bandwidth_sensitivity", "MMD vs relative bandwidth is unimodal and vanishes at both ends",
       bandwidth_sensitivity},
      {"cli_determinism", "repeated CLI invocations with one seed give identical values", cli_determinism},
  };
}

}  // namespace sdist::acceptance
