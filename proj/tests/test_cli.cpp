#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "lsg/cli.hpp"

using namespace lsg;
using namespace lsg::cli;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path temp_path(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "lsg_cli_tests";
  fs::create_directories(dir);
  return dir / name;
}

const std::string kA1 = "0.5,-1,-1,4,1,3";

}  // namespace

TEST(Cli, ClassifyWitness) {
  const CliRun r = run_cli({"classify", "--matrix", kA1});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["quadrant"], "PP");
  EXPECT_EQ(j["mu_sg"].get<double>(), 8.0);
  EXPECT_FALSE(j["degenerate_sg"].get<bool>());
}

TEST(Cli, ClassifyIdentityIsDegenerate) {
  const CliRun r = run_cli({"classify", "--matrix", "1,0,0,1,0,1"});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(json::parse(r.out)["regime_sg"], "degenerate");
}

TEST(Cli, NonSpdInputNamesMinor) {
  const CliRun r = run_cli({"classify", "--matrix", "1,2,0,1,0,1"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("minor 2"), std::string::npos);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run_cli({}).code, 1);
  EXPECT_EQ(run_cli({"classify"}).code, 1);
  EXPECT_EQ(run_cli({"classify", "--matrix", "1,0,0"}).code, 1);
  EXPECT_EQ(run_cli({"classify", "--matrix", kA1, "--format", "xml"}).code, 1);
  EXPECT_EQ(run_cli({"planewave", "--matrix", kA1}).code, 1);
  EXPECT_EQ(run_cli({"--help"}).code, 0);
}

TEST(Cli, MatrixFile) {
  const fs::path p = temp_path("a3.json");
  std::ofstream(p) << R"({"a": 0.5, "b": -1, "c": -1, "d": 3, "e": 3, "f": 3.5})";
  const CliRun r = run_cli({"classify", "--matrix-file", p.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out)["quadrant"], "MP");
  std::ofstream(p) << R"({"a": 0.5, "q": 1})";
  EXPECT_EQ(run_cli({"classify", "--matrix-file", p.string()}).code, 1);
  EXPECT_EQ(run_cli({"classify", "--matrix-file", p.string(), "--matrix", kA1}).code, 1);
}

TEST(Cli, ConfigRoundTrip) {
  const std::vector<std::string> args{"planewave", "--matrix",  kA1,      "--times",       "0,0.1,0.30000000000000004",
                                      "--seed",    "123",       "--model", "qg",           "--bv-frequency",
                                      "1.7",       "--box-length", "12.345678901234567", "--oracle"};
  std::ostringstream o, e;
  const ParseOutcome first = parse_args(args, o, e);
  ASSERT_FALSE(first.exit);
  const std::string text = effective_config(first.config);
  const fs::path p = temp_path("roundtrip.toml");
  std::ofstream(p) << text;
  const ParseOutcome second = parse_args({"planewave", "--config", p.string()}, o, e);
  ASSERT_FALSE(second.exit) << e.str();
  EXPECT_EQ(second.config, first.config);
  EXPECT_EQ(effective_config(second.config), text);
}

TEST(Cli, FlagOverridesConfigFile) {
  const fs::path p = temp_path("override.toml");
  std::ofstream(p) << "matrix = [0.5, -1, -1, 4, 1, 3]\nseed = 5\ncount = 7\n";
  std::ostringstream o, e;
  const ParseOutcome r = parse_args({"scan", "--config", p.string(), "--seed", "9"}, o, e);
  ASSERT_FALSE(r.exit);
  EXPECT_EQ(r.config.seed, 9u);
  EXPECT_EQ(r.config.count, 7u);
}

TEST(Cli, UnknownConfigKeyRejected) {
  const fs::path p = temp_path("unknown.toml");
  std::ofstream(p) << "matrix = [0.5, -1, -1, 4, 1, 3]\nnot-a-key = 1\n";
  EXPECT_EQ(run_cli({"classify", "--config", p.string()}).code, 1);
}

TEST(Cli, PlanewaveWitnessCsv) {
  const CliRun r = run_cli({"planewave", "--matrix", kA1, "--times", "0,1,2", "--witness", "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream is(r.out);
  std::string header, row0, row1, row2;
  std::getline(is, header);
  std::getline(is, row0);
  std::getline(is, row1);
  std::getline(is, row2);
  EXPECT_EQ(header, "t,a_t,k1,k2,k3,sup_norm");
  auto sup = [](const std::string& row) { return std::stod(row.substr(row.rfind(',') + 1)); };
  EXPECT_NEAR(sup(row2) / sup(row0), std::exp(8.0), 1e-8 * std::exp(8.0));
  EXPECT_NE(r.out.find("# verdict,unstable"), std::string::npos);
}

TEST(Cli, PlanewaveDegenerateExit) {
  EXPECT_EQ(run_cli({"planewave", "--matrix", "1,0,0,1,0,1", "--times", "1"}).code, 2);
}

TEST(Cli, ScanIsDeterministic) {
  const CliRun a = run_cli({"scan", "--count", "500", "--seed", "42"});
  const CliRun b = run_cli({"scan", "--count", "500", "--seed", "42"});
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  const CliRun c = run_cli({"scan", "--count", "0", "--format", "csv"});
  EXPECT_EQ(c.out, "quadrant,count\nMM,0\nMP,0\nPM,0\nPP,0\n");
  const json z = json::parse(run_cli({"scan", "--count", "0"}).out);
  EXPECT_EQ(z["pinned"].size(), 4u);
  EXPECT_TRUE(z["witnesses"].empty());
}

TEST(Cli, ScanCsvWritesWitnessFile) {
  const fs::path p = temp_path("scan.csv");
  const CliRun r = run_cli({"scan", "--count", "2000", "--format", "csv", "--out", p.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream w(p.string() + ".witnesses.json");
  ASSERT_TRUE(w.good());
  EXPECT_EQ(json::parse(w)["count"], 2000);
}

TEST(Cli, QgCompare) {
  const CliRun r = run_cli({"qg-compare", "--matrix", "2,0,-1,2,0,0.75"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["report"]["quadrant"], "PM");
  EXPECT_EQ(j["sg"]["stability"]["verdict"], "unstable");
  EXPECT_EQ(j["qg"]["stability"]["verdict"], "stable");
}

TEST(Cli, EvolveClampExit) {
  const CliRun r = run_cli({"evolve", "--matrix", kA1, "--times", "1", "--grid-n", "32"});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("Nyquist"), std::string::npos);
  EXPECT_EQ(run_cli({"evolve", "--matrix", kA1, "--times", "20", "--grid-n", "32"}).code, 3);
}

TEST(Cli, EvolveWritesFieldAndDiagnostics) {
  const fs::path prefix = temp_path("evolved");
  const CliRun r = run_cli({"evolve", "--matrix", "0.6,-0.2,0.05,0.35,0,1", "--times", "0.5", "--field-out",
                         prefix.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  const auto& step = j["steps"][0];
  EXPECT_LT(step["curl_ratio"].get<double>(), 1e-6);
  const GridField f = load_field(step["field_file"].get<std::string>());
  EXPECT_EQ(f.spec().n, 64);
  EXPECT_NEAR(f.l2_norm(), step["l2_norm"].get<double>(), 1e-12 * f.l2_norm());
}
