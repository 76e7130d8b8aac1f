#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "sdist_cli/cli.hpp"

namespace sdist::cli {
namespace {

namespace fs = std::filesystem;

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "sdist");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("sdist_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

TEST_F(CliTest, GenIsDeterministic) {
  ASSERT_EQ(run({"--seed", "7", "--out", path("a.csv"), "gen", "--dist", "gauss", "--dim", "10", "--n", "100"}).code,
            kExitOk);
  ASSERT_EQ(run({"--seed", "7", "--out", path("b.csv"), "gen", "--dist", "gauss", "--dim", "10", "--n", "100"}).code,
            kExitOk);
  const auto a = slurp(path("a.csv"));
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(path("b.csv")));
  run({"--seed", "8", "--out", path("c.csv"), "gen", "--dist", "gauss", "--dim", "10", "--n", "100"});
  EXPECT_NE(a, slurp(path("c.csv")));
}

TEST_F(CliTest, GenFromModelJson) {
  {
    std::ofstream m(path("m.json"));
    m << R"({"type":"gaussian","means":[[5,5]],"covariances":[[[1,0],[0,1]]]})";
  }
  const auto r = run({"--seed", "1", "gen", "--dist", path("m.json"), "--n", "5"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 5);
}

TEST_F(CliTest, DistOfIdenticalFilesIsZero) {
  run({"--seed", "3", "--out", path("a.csv"), "gen", "--dist", "gauss", "--dim", "4", "--n", "60"});
  const auto r = run({"--format", "json", "dist", "--metric", "swd", "--a", path("a.csv"), "--b", path("a.csv")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(nlohmann::json::parse(r.out).at("value").get<double>(), 0.0);
}

TEST_F(CliTest, DistMetricsRun) {
  run({"--seed", "3", "--out", path("a.csv"), "gen", "--dist", "gauss", "--dim", "2", "--n", "40"});
  run({"--seed", "4", "--out", path("b.csv"), "gen", "--dist", "shift-all", "--side", "model", "--dim", "2", "--n",
       "40"});
  for (const std::vector<std::string>& extra :
       {std::vector<std::string>{"--metric", "wasserstein"}, {"--metric", "mmd", "--kernel", "laplacian"},
        {"--metric", "mmd", "--kernel", "energy"}, {"--metric", "c2st", "--classifier", "knn", "--k", "3"},
        {"--metric", "c2st", "--epochs", "5", "--hidden", "8,8"}, {"--metric", "fid"}, {"--metric", "kid"}}) {
    std::vector<std::string> args{"--seed", "5", "dist", "--a", path("a.csv"), "--b", path("b.csv")};
    args.insert(args.end(), extra.begin(), extra.end());
    const auto r = run(args);
    EXPECT_EQ(r.code, kExitOk) << extra[1] << ": " << r.err;
  }
}

TEST_F(CliTest, UsageErrorsExitOne) {
  run({"--seed", "3", "--out", path("a.csv"), "gen", "--dist", "gauss", "--dim", "2", "--n", "10"});
  EXPECT_EQ(run({"dist", "--metric", "kl", "--a", path("a.csv"), "--b", path("a.csv")}).code, kExitUsage);
  EXPECT_EQ(run({"gen", "--bogus"}).code, kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(run({"--format", "xml", "gen"}).code, kExitUsage);
}

TEST_F(CliTest, RuntimeErrorsExitTwo) {
  const auto r = run({"dist", "--metric", "swd", "--a", path("missing.csv"), "--b", path("missing.csv")});
  EXPECT_EQ(r.code, kExitRuntime);
  EXPECT_FALSE(r.err.empty());
  {
    std::ofstream bad(path("bad.csv"));
    bad << "1,2\n3\n";
  }
  EXPECT_EQ(run({"dist", "--metric", "swd", "--a", path("bad.csv"), "--b", path("bad.csv")}).code, kExitRuntime);
}

TEST_F(CliTest, SweepRowCountMatchesConfig) {
  {
    std::ofstream cfg(path("small.json"));
    cfg << R"({"experiment":"small","generator":{"name":"mog2d"},"sample_sizes":[20,40],"dims":[2],)"
        << R"("metrics":[{"name":"swd","slices":10},{"name":"mmd","bandwidth":1.0},{"name":"c2st","classifier":"knn"}],)"
        << R"("repeats":2,"base_seed":4})";
  }
  const auto r = run({"--out", path("r.csv"), "sweep", "--config", path("small.json"), "--threads", "1"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto text = slurp(path("r.csv"));
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1 + 2 * 2 * 3 * 2);
}

TEST_F(CliTest, PrintBuiltinConfig) {
  const auto r = run({"sweep", "--config", "fig5b", "--print-config"});
  ASSERT_EQ(r.code, kExitOk);
  EXPECT_EQ(nlohmann::json::parse(r.out).at("experiment"), "fig5b");
}

TEST_F(CliTest, FitWritesTrace) {
  run({"--seed", "3", "--out", path("t.csv"), "gen", "--dist", "shift-all", "--side", "model", "--dim", "2", "--n",
       "200"});
  const auto r = run({"--seed", "2", "fit", "--loss", "swd", "--target", path("t.csv"), "--epochs", "5", "--samples",
                      "50", "--slices", "5"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("records").size(), 6u);
  EXPECT_EQ(run({"fit", "--loss", "c2st", "--target", path("t.csv"), "--epochs", "2"}).code, kExitRuntime);
}

}  // namespace
}  // namespace sdist::cli
