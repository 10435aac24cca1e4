#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "cli.hpp"

namespace {

using nlohmann::json;

const std::string kData = QNEWTON_DATA_DIR;

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "qnewton-lab");
  std::ostringstream out;
  std::ostringstream err;
  Outcome o;
  o.code = qnewton::cli::run(args, out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

TEST(Cli, RegressExactOnIdentity) {
  const Outcome o = run({"regress", kData + "/identity.csv"});
  ASSERT_EQ(o.code, 0) << o.err;
  const json j = json::parse(o.out);
  EXPECT_EQ(j.at("coefficients"), json({1.0, 1.0}));
  EXPECT_EQ(j.at("mode"), "exact");
}

TEST(Cli, InjectPassesVerifier) {
  for (const char* pattern : {"adversarial", "random"}) {
    const Outcome o = run({"regress", kData + "/four_point.csv", "--mode", "inject", "--pattern",
                           pattern, "--eps", "0.05"});
    ASSERT_EQ(o.code, 0) << o.err;
    const json j = json::parse(o.out);
    EXPECT_TRUE(j.at("verifier").at("pass").get<bool>()) << pattern;
    EXPECT_TRUE(j.at("inputs_conservative").get<bool>());
  }
}

TEST(Cli, QaeModeReportsQueries) {
  const Outcome o = run({"regress", kData + "/four_point.csv", "--mode", "qae", "--eps", "0.05",
                         "--seed", "3"});
  ASSERT_EQ(o.code, 0) << o.err;
  const json j = json::parse(o.out);
  EXPECT_GT(j.at("queries").at("P_x").get<std::uint64_t>(), 0u);
  EXPECT_TRUE(j.at("verifier").at("pass").get<bool>());
}

TEST(Cli, BoundsSidecarRescalesRawData) {
  const Outcome o = run({"regress", kData + "/raw_prices.csv", "--bounds",
                         kData + "/raw_prices_bounds.json"});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(json::parse(o.out).at("coefficients").size(), 2u);
  const Outcome raw = run({"regress", kData + "/raw_prices.csv"});
  EXPECT_EQ(raw.code, 1);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run({}).code, 2);
  const Outcome o = run({"frobnicate"});
  EXPECT_EQ(o.code, 2);
  EXPECT_EQ(json::parse(o.err).at("error"), "UsageError");
  EXPECT_EQ(run({"regress"}).code, 2);
  EXPECT_EQ(run({"regress", kData + "/identity.csv", "--mode", "psychic"}).code, 2);
}

TEST(Cli, MissingFileIsLibraryError) {
  const Outcome o = run({"regress", kData + "/does_not_exist.csv"});
  EXPECT_EQ(o.code, 1);
  const json e = json::parse(o.err);
  EXPECT_EQ(e.at("error"), "IoError");
  EXPECT_FALSE(e.at("message").get<std::string>().empty());
  EXPECT_TRUE(o.out.empty());
}

TEST(Cli, OutputIsByteIdenticalAcrossRuns) {
  const std::vector<std::string> args{"regress", kData + "/four_point.csv", "--mode", "qae",
                                      "--eps", "0.05", "--seed", "9"};
  EXPECT_EQ(run(args).out, run(args).out);
  const std::vector<std::string> nwt{"newton", kData + "/newton_logistic.json"};
  EXPECT_EQ(run(nwt).out, run(nwt).out);
}

TEST(Cli, NewtonProblems) {
  for (const char* name : {"newton_quadratic.json", "newton_least_squares.json",
                           "newton_logistic.json"}) {
    const Outcome o = run({"newton", kData + "/" + name});
    ASSERT_EQ(o.code, 0) << name << o.err;
    const json j = json::parse(o.out);
    EXPECT_TRUE(j.at("lemma2").at("pass").get<bool>()) << name;
    const auto n_it = j.at("tolerances").at("n_it").get<std::size_t>();
    EXPECT_EQ(j.at("iterates").size(), n_it + 1) << name;
  }
}

TEST(Cli, QaeCalibrate) {
  const Outcome o = run({"qae-calibrate", "--amplitudes", "0.2,0.7", "--grids", "16,64",
                         "--runs", "200", "--seed", "1"});
  ASSERT_EQ(o.code, 0) << o.err;
  std::istringstream in(o.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "# qnewton-lab schema v1");
  std::getline(in, line);
  EXPECT_EQ(line.rfind("amplitude,grid_size", 0), 0u);
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 4);
  EXPECT_EQ(run({"qae-calibrate", "--grids", "12"}).code, 1);
}

TEST(Cli, SweepWritesCsvFile) {
  const auto path = std::filesystem::temp_directory_path() / "qnewton_cli_sweep.csv";
  const Outcome o = run({"sweep", kData + "/sweep_regression_eps.json", "-o", path.string()});
  ASSERT_EQ(o.code, 0) << o.err;
  std::ifstream f(path);
  std::string line;
  int lines = 0;
  while (std::getline(f, line)) ++lines;
  EXPECT_EQ(lines, 2 + 4 * 3);
  std::filesystem::remove(path);
}

TEST(Cli, LsmDemo) {
  const Outcome o = run({"lsm-demo", kData + "/lsm_demo.json"});
  ASSERT_EQ(o.code, 0) << o.err;
  const json j = json::parse(o.out);
  EXPECT_TRUE(j.at("all_within_eps").get<bool>());
  EXPECT_EQ(j.at("qae_seed"), 910);
}

}  // namespace
