#include "commands.hpp"
#include "config.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace exactdpp;
using namespace exactdpp::cli;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "exactdpp");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("exactdpp_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

}  // namespace

TEST_F(Cli, SampleIsByteIdenticalForEqualSeeds) {
  const std::vector<std::string> base{"sample", "--dim", "2", "--num", "30", "--lengthscale", "0.1"};
  auto a = base, b = base, c = base;
  a.insert(a.end(), {"--seed", "5", "--out", path("a.csv")});
  b.insert(b.end(), {"--seed", "5", "--out", path("b.csv")});
  c.insert(c.end(), {"--seed", "6", "--out", path("c.csv")});
  ASSERT_EQ(run_cli(a).code, kExitOk);
  ASSERT_EQ(run_cli(b).code, kExitOk);
  ASSERT_EQ(run_cli(c).code, kExitOk);
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
  EXPECT_NE(slurp(path("a.csv")), slurp(path("c.csv")));
  std::ifstream is(path("a.csv"));
  const auto rows = read_csv(is);
  EXPECT_EQ(rows.rows(), 30);
  EXPECT_EQ(rows.cols(), 2);
}

TEST_F(Cli, ZeroPointsIsAUsageErrorAndWritesNothing) {
  const auto r = run_cli({"sample", "--num", "0", "--out", path("none.csv")});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_FALSE(fs::exists(path("none.csv")));
  EXPECT_NE(r.err.find("--num"), std::string::npos);
}

TEST_F(Cli, BadInputsAreUsageErrors) {
  EXPECT_EQ(run_cli({"sample", "--lengthscale", "-1", "--out", path("x.csv")}).code, kExitUsage);
  EXPECT_EQ(run_cli({"sample", "--kernel", "matern", "--out", path("x.csv")}).code, kExitUsage);
  EXPECT_EQ(run_cli({"sample", "--dim", "2", "--lengthscale", "0.1,0.2,0.3", "--out", path("x.csv")}).code,
            kExitUsage);
  EXPECT_EQ(run_cli({"sample", "--domain", "1,0", "--out", path("x.csv")}).code, kExitUsage);
  EXPECT_EQ(run_cli({"sample", "--method", "nystrom", "--rank", "0", "--out", path("x.csv")}).code, kExitUsage);
  EXPECT_EQ(run_cli({"sample", "--bogus"}).code, kExitUsage);
  EXPECT_EQ(run_cli({}).code, kExitUsage);
  EXPECT_FALSE(fs::exists(path("x.csv")));
  EXPECT_EQ(run_cli({"--help"}).code, kExitOk);
}

TEST_F(Cli, BoxDomainKeepsPointsInside) {
  ASSERT_EQ(run_cli({"sample", "--dim", "2", "--num", "40", "--domain", "2,4x-1,0", "--out", path("box.csv")}).code,
            kExitOk);
  std::ifstream is(path("box.csv"));
  const auto rows = read_csv(is);
  ASSERT_EQ(rows.rows(), 40);
  EXPECT_GE(rows.col(0).minCoeff(), 2.0);
  EXPECT_LE(rows.col(0).maxCoeff(), 4.0);
  EXPECT_GE(rows.col(1).minCoeff(), -1.0);
  EXPECT_LE(rows.col(1).maxCoeff(), 0.0);
}

TEST_F(Cli, CsvAndJsonCarryTheSamePoints) {
  for (const std::string method : {"exact", "spectral", "uniform"}) {
    const std::vector<std::string> base{"sample", "--num", "25", "--seed", "3", "--method", method, "--rank", "9"};
    auto a = base, b = base;
    a.insert(a.end(), {"--out", path("p.csv")});
    b.insert(b.end(), {"--out", path("p.json")});
    ASSERT_EQ(run_cli(a).code, kExitOk) << method;
    ASSERT_EQ(run_cli(b).code, kExitOk) << method;
    std::ifstream c(path("p.csv")), j(path("p.json"));
    const auto from_csv = read_csv(c);
    const auto from_json = read_points_json(j);
    ASSERT_EQ(from_csv.rows(), 25);
    EXPECT_LE((from_csv - from_json).cwiseAbs().maxCoeff(), 1e-15) << method;
    const auto doc = nlohmann::json::parse(slurp(path("p.json")));
    EXPECT_EQ(doc.at("schema"), "exactdpp.points");
    EXPECT_EQ(doc.at("metadata").at("method"), method);
    EXPECT_EQ(doc.at("metadata").at("seed"), 3);
  }
}

TEST_F(Cli, StdoutOutput) {
  const auto r = run_cli({"sample", "--num", "3", "--out", "-"});
  ASSERT_EQ(r.code, kExitOk);
  std::istringstream is(r.out);
  EXPECT_EQ(read_csv(is).rows(), 3);
}

TEST_F(Cli, EnvironmentSelectsTheOutputDirectory) {
  ::setenv(kOutputDirEnv, dir_.c_str(), 1);
  const auto r = run_cli({"sample", "--num", "4"});
  ::unsetenv(kOutputDirEnv);
  ASSERT_EQ(r.code, kExitOk);
  EXPECT_TRUE(fs::exists(path("samples.csv")));
}

TEST_F(Cli, SaturatedRequestFailsWithExitOne) {
  const auto r = run_cli({"sample", "--num", "60", "--lengthscale", "0.5", "--out", path("sat.csv")});
  EXPECT_EQ(r.code, kExitFailure);
  EXPECT_NE(r.err.find("error"), std::string::npos);
}

TEST(CliConfig, JsonRoundTrip) {
  RunConfig c;
  c.command = Command::Compare;
  c.kernel = KernelFamily::Exponential;
  c.dim = 2;
  c.lengthscales = {0.1, 0.25};
  c.domain = parse_domain("0,1x-3,2.5", 2);
  c.method = SampleMethod::Spectral;
  c.ranks = {5, 10};
  c.seed = 18446744073709551615ull;
  c.noise = 1e-5;
  c.out = "dir";
  const RunConfig back = config_from_json(nlohmann::json::parse(to_json(c).dump()));
  EXPECT_EQ(to_json(back), to_json(c));
  EXPECT_EQ(back.seed, c.seed);
  EXPECT_EQ(back.domain[1].lo, -3.0);
}

TEST(CliConfig, Parsers) {
  EXPECT_EQ(parse_real_list("0.1, 0.2"), (std::vector<double>{0.1, 0.2}));
  EXPECT_TRUE(parse_int_list("").empty());
  EXPECT_EQ(parse_int_list("5,10"), (std::vector<int>{5, 10}));
  EXPECT_THROW(parse_int_list("5,x"), UsageError);
  EXPECT_EQ(parse_domain("0,2", 3).size(), 3u);
  EXPECT_THROW(parse_domain("0,1x0,1", 3), UsageError);
  EXPECT_EQ(format_domain(parse_domain("0,2x1,3", 2)), "0,2x1,3");
  RunConfig c;
  c.dim = 3;
  resolve(c);
  EXPECT_EQ(c.lengthscales.size(), 3u);
}

TEST_F(Cli, CompareRequiresRanks) {
  EXPECT_EQ(run_cli({"compare", "--method", "nystrom", "--ranks", "", "--out", path("cmp")}).code, kExitUsage);
  EXPECT_EQ(run_cli({"compare", "--method", "nystrom", "--out", path("cmp")}).code, kExitUsage);
  EXPECT_EQ(run_cli({"compare", "--method", "exact", "--ranks", "5", "--out", path("cmp")}).code, kExitUsage);
}

TEST_F(Cli, CompareWritesItsArtifacts) {
  const auto r = run_cli({"compare", "--method", "spectral", "--ranks", "5,10", "--replicates", "2", "--num", "30",
                          "--lengthscale", "0.02", "--grid", "200", "--out", path("cmp")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  for (const char* f : {"deviation.csv", "density.csv", "samples.csv", "summary.json"}) {
    EXPECT_TRUE(fs::exists(dir_ / "cmp" / f)) << f;
  }
  const auto summary = nlohmann::json::parse(slurp(dir_ / "cmp" / "summary.json"));
  EXPECT_EQ(summary.at("schema"), "exactdpp.compare");
  EXPECT_EQ(summary.at("deviation").size(), 2u);
}

TEST_F(Cli, ValidateWritesAReport) {
  const auto r = run_cli({"validate", "--scale", "0.02", "--out", path("report.json")});
  EXPECT_TRUE(r.code == kExitOk || r.code == kExitFailure);
  const auto report = nlohmann::json::parse(slurp(path("report.json")));
  EXPECT_EQ(report.at("schema"), "exactdpp.validation");
  EXPECT_EQ(report.at("schema_version"), kReportSchemaVersion);
  EXPECT_EQ(report.at("passed").get<bool>(), r.code == kExitOk);
  ASSERT_GE(report.at("checks").size(), 10u);
  for (const auto& c : report.at("checks")) {
    EXPECT_TRUE(c.contains("name") && c.contains("observed") && c.contains("tolerance") && c.contains("passed"));
  }
}
