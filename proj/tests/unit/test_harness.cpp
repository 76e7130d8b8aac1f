#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "sdist/generators.hpp"
#include "sdist/harness.hpp"

namespace sdist::harness {
namespace {

constexpr const char* kSmallConfig = R"({
  "experiment": "small",
  "generator": {"name": "shift-first", "shift": 1.0},
  "sample_sizes": [50, 80],
  "dims": [2, 3],
  "metrics": [{"name": "swd", "slices": 20}, {"name": "mmd", "kernel": "gaussian", "bandwidth": 1.0}],
  "repeats": 2,
  "base_seed": 12
})";

TEST(Generators, ShapesAndShifts) {
  const auto p = make_generator({"shift-first", 2.0}, 4);
  EXPECT_EQ(model_mean(p.truth), Vector::Zero(4));
  EXPECT_EQ(model_mean(p.model)(0), 2.0);
  EXPECT_EQ(model_mean(p.model)(1), 0.0);
  const auto all = make_generator({"shift-all", 1.0}, 3);
  EXPECT_EQ(model_mean(all.model), Vector::Ones(3));
  const auto var = make_generator({"var-all", 1.0}, 3);
  EXPECT_EQ(model_covariance(var.model), 2.0 * SquareMatrix::Identity(3, 3));
  const auto same = make_generator({"gauss", 1.0}, 3);
  EXPECT_EQ(model_mean(same.model), Vector::Zero(3));
  EXPECT_EQ(dim(make_generator({"mog2d", 1.0}, 2).truth), 2u);
  EXPECT_THROW(make_generator({"mog2d", 1.0}, 3), std::invalid_argument);
  EXPECT_THROW(make_generator({"swiss-roll", 1.0}, 3), std::invalid_argument);
}

TEST(Config, ParseAndCount) {
  const auto configs = parse_sweep_configs(kSmallConfig);
  ASSERT_EQ(configs.size(), 1u);
  const auto& c = configs[0];
  EXPECT_EQ(c.cell_count(), 2u * 2u * 2u);
  EXPECT_EQ(c.report_count(), 8u * 2u * 2u);
  EXPECT_EQ(c.metrics[1].bandwidth, 1.0);
  const auto again = parse_sweep_configs(sweep_config_to_json(c));
  EXPECT_EQ(sweep_config_to_json(again[0]), sweep_config_to_json(c));
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  auto j = nlohmann::json::parse(kSmallConfig);
  j["colour"] = "red";
  EXPECT_THROW(parse_sweep_configs(j.dump()), std::invalid_argument);
  j = nlohmann::json::parse(kSmallConfig);
  j["repeats"] = 0;
  EXPECT_THROW(parse_sweep_configs(j.dump()), std::invalid_argument);
  j = nlohmann::json::parse(kSmallConfig);
  j["metrics"][0]["name"] = "kl";
  EXPECT_THROW(parse_sweep_configs(j.dump()), std::invalid_argument);
  EXPECT_THROW(parse_sweep_configs("{not json"), std::invalid_argument);
}

TEST(Config, ArrayForm) {
  const std::string arr = std::string("[") + kSmallConfig + "," + kSmallConfig + "]";
  EXPECT_EQ(parse_sweep_configs(arr).size(), 2u);
}

TEST(Builtins, AllParseAndValidate) {
  for (const auto& name : builtin_config_names()) {
    const auto configs = builtin_configs(name);
    EXPECT_FALSE(configs.empty()) << name;
    for (const auto& c : configs) EXPECT_NO_THROW(c.validate()) << name;
  }
  EXPECT_THROW(builtin_config_json("fig9"), std::invalid_argument);
}

TEST(Builtins, CheckedInConfigFilesMatch) {
  for (const auto& name : builtin_config_names()) {
    const std::filesystem::path file = std::filesystem::path(SDIST_SOURCE_DIR) / "configs" / (name + ".json");
    std::ifstream in(file);
    ASSERT_TRUE(in) << file;
    std::stringstream text;
    text << in.rdbuf();
    EXPECT_EQ(nlohmann::json::parse(text.str()), nlohmann::json::parse(builtin_config_json(name))) << name;
  }
}

TEST(Sweep, SingleCellGivesTwoReports) {
  SweepConfig c;
  c.experiment = "one";
  c.generator = {"gauss", 1.0};
  c.sample_sizes = {30};
  c.dims = {2};
  c.metrics = {MetricSpec{}};
  c.repeats = 1;
  const auto reports = run_sweep(c);
  ASSERT_EQ(reports.size(), 2u);
  EXPECT_EQ(reports[0].comparison, Comparison::true_vs_true);
  EXPECT_EQ(reports[1].comparison, Comparison::true_vs_model);
}

TEST(Sweep, ThreadCountDoesNotChangeValues) {
  const auto c = parse_sweep_configs(kSmallConfig)[0];
  const auto a = run_sweep(c, SweepOptions{1});
  const auto b = run_sweep(c, SweepOptions{3});
  ASSERT_EQ(a.size(), c.report_count());
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].value, b[i].value);
    EXPECT_EQ(a[i].seed, b[i].seed);
    EXPECT_EQ(a[i].metric, b[i].metric);
  }
}

TEST(Sweep, ShiftSeparatesFromBaseline) {
  auto c = parse_sweep_configs(kSmallConfig)[0];
  c.sample_sizes = {400};
  c.dims = {2};
  c.repeats = 1;
  for (const auto& r : run_sweep(c)) {
    if (r.comparison == Comparison::true_vs_model) {
      EXPECT_GT(r.value, 0.01) << r.metric;
    }
  }
}

TEST(Sweep, MetricFailuresBecomeErrorRows) {
  SweepConfig c;
  c.experiment = "err";
  c.generator = {"gauss", 1.0};
  c.sample_sizes = {30};
  c.dims = {2};
  MetricSpec w;
  w.kind = MetricKind::c2st;
  c2st::MlpConfig exploding;
  exploding.epochs = 2;
  exploding.learning_rate = 1e200;
  w.classifier = exploding;
  c.metrics = {w, MetricSpec{}};
  c.repeats = 1;
  const auto reports = run_sweep(c);
  ASSERT_EQ(reports.size(), 4u);
  EXPECT_TRUE(std::isnan(reports[0].value));
  EXPECT_NE(reports[0].note.find("learning_rate"), std::string::npos);
  EXPECT_FALSE(std::isnan(reports[2].value));
}

TEST(Sweep, RelativeBandwidthAxis) {
  SweepConfig c;
  c.experiment = "bw";
  c.generator = {"shift-first", 1.0};
  c.sample_sizes = {100};
  c.dims = {2};
  c.param_axis = ParamAxis{ParamAxisKind::bandwidth, {0.5, 1.0, 2.0}, true};
  MetricSpec m;
  m.kind = MetricKind::mmd;
  c.metrics = {m};
  c.repeats = 1;
  const auto reports = run_sweep(c);
  ASSERT_EQ(reports.size(), 6u);
  EXPECT_EQ(reports[0].param, 0.5);
  EXPECT_EQ(reports[0].seed, reports[5].seed);
}

TEST(Output, CsvSchema) {
  std::ostringstream out;
  write_csv_header(out);
  EXPECT_EQ(out.str(), "experiment,metric,comparison,n,d,param,repeat,seed,value,seconds,note\n");
  DistanceReport r;
  r.experiment = "e";
  r.metric = "swd";
  r.n = 10;
  r.d = 2;
  r.value = NAN;
  r.note = "boom";
  std::ostringstream row;
  write_csv_row(row, r);
  EXPECT_NE(row.str().find("NaN"), std::string::npos);
  const auto j = nlohmann::json::parse(reports_to_json({r}));
  EXPECT_TRUE(j[0]["value"].is_null());
}

TEST(Evaluate, AllMetricKinds) {
  Rng rng(3);
  const SampleSet a(standard_normal_matrix(60, 3, rng)), b(standard_normal_matrix(60, 3, rng));
  for (auto kind : {MetricKind::swd, MetricKind::wasserstein, MetricKind::mmd, MetricKind::c2st, MetricKind::fid,
                    MetricKind::kid}) {
    MetricSpec m;
    m.kind = kind;
    m.classifier = c2st::KnnConfig{};
    const auto v = evaluate_metric(m, a, b, rng);
    EXPECT_TRUE(std::isfinite(v.value)) << to_string(kind);
  }
}

}  // namespace
}  // namespace sdist::harness
