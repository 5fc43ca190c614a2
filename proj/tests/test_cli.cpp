#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "bellcert/cli.hpp"

namespace fs = std::filesystem;
using bellcert::cli::run;
using Json = nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "bellcert_cli_test";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  fs::remove(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json without_timestamp(Json j) {
  j.erase("timestamp");
  return j;
}

const std::vector<std::string> kSmallGrid{"--x-max", "2", "--x-step", "0.5", "--t-count", "4"};

std::vector<std::string> with_grid(std::vector<std::string> a) {
  a.insert(a.end(), kSmallGrid.begin(), kSmallGrid.end());
  return a;
}

}  // namespace

TEST(Cli, VerifyBellmanSmall) {
  const Result r = call({"verify-bellman", "--q", "2", "--samples", "50", "--aux-grid", "10"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j["config_echo"]["subcommand"], "verify-bellman");
  EXPECT_EQ(j["results"]["runs"][0]["verdicts"].size(), 50u);
}

TEST(Cli, Deterministic) {
  const std::vector<std::string> args{"verify-bellman", "--q", "1,10", "--samples", "30",
                                      "--seed", "7", "--aux-grid", "0"};
  const Result a = call(args);
  const Result b = call(args);
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(without_timestamp(Json::parse(a.out)), without_timestamp(Json::parse(b.out)));
}

TEST(Cli, UsageErrors) {
  const fs::path out = scratch("bad.json");
  EXPECT_EQ(call({"verify-bellman", "--q", "0.5", "--out", out.string()}).code, 2);
  EXPECT_FALSE(fs::exists(out));
  EXPECT_EQ(call(with_grid({"a2", "--weight", "exp:a=3", "--out", out.string()})).code, 2);
  EXPECT_FALSE(fs::exists(out));
  EXPECT_EQ(call({}).code, 2);
  EXPECT_EQ(call({"no-such-command"}).code, 2);
  EXPECT_EQ(call({"repr-check", "--format", "xml"}).code, 2);
  EXPECT_EQ(call({"repr-check", "--out", "/nonexistent/dir/r.json"}).code, 2);
}

TEST(Cli, WritesFileAtomically) {
  const fs::path out = scratch("repr.json");
  const Result r = call({"repr-check", "--n", "1,2", "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  const Json j = Json::parse(slurp(out));
  EXPECT_TRUE(j["checks"].is_array());
  EXPECT_FALSE(fs::exists(out.string() + ".partial"));
}

TEST(Cli, ConfigFileAndPrecedence) {
  const fs::path cfg = scratch("cfg.toml");
  {
    std::ofstream f(cfg);
    f << "[repr-check]\nn = [3]\nt-max = 15.0\n";
  }
  Result r = call({"--config", cfg.string(), "repr-check"});
  ASSERT_EQ(r.code, 0) << r.err;
  Json j = Json::parse(r.out);
  EXPECT_EQ(j["config_echo"]["parameters"]["n"], Json::array({3}));
  EXPECT_EQ(j["config_echo"]["parameters"]["t_max"], 15.0);

  r = call({"--config", cfg.string(), "repr-check", "--n", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
  j = Json::parse(r.out);
  EXPECT_EQ(j["config_echo"]["parameters"]["n"], Json::array({4}));

  {
    std::ofstream f(cfg);
    f << "[repr-check]\nbogus = 1\n";
  }
  EXPECT_EQ(call({"--config", cfg.string(), "repr-check"}).code, 2);
}

TEST(Cli, A2AndRiesz) {
  Result r = call(with_grid({"a2", "--weight", "const:c=2"}));
  ASSERT_EQ(r.code, 0) << r.err;
  Json j = Json::parse(r.out);
  EXPECT_NEAR(j["results"]["q2_lower"].get<double>(), 1.0, 1e-12);

  r = call(with_grid({"riesz-norm", "--weight", "exp:a=0.5", "--n", "8"}));
  ASSERT_EQ(r.code, 0) << r.err;
  j = Json::parse(r.out);
  EXPECT_GT(j["results"]["weighted_norm"].get<double>(), 1.0);
}

TEST(Cli, EmbeddingRejectsMean) {
  EXPECT_EQ(call(with_grid({"embedding", "--f", "1,1"})).code, 2);
  EXPECT_EQ(call(with_grid({"embedding", "--f", "0,1", "--g", "1"})).code, 0);
}

TEST(Cli, SweepCsv) {
  const Result r = call(with_grid({"sweep", "--params", "0,0.5", "--n", "6", "--ladder", "2,4",
                                   "--format", "csv"}));
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "param,q2_lower,weighted_norm,bound_ratio,trunc_n,q2_trunc");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 4);
}

TEST(Cli, ChecksCsv) {
  const Result r = call({"repr-check", "--n", "1", "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("name,count,failures,skipped,worst_margin,informational\n", 0), 0u);
}
