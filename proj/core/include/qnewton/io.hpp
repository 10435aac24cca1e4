#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qnewton/dataset.hpp"
#include "qnewton/lsm.hpp"
#include "qnewton/newton.hpp"
#include "qnewton/objective.hpp"
#include "qnewton/sweep.hpp"

namespace qnewton {

// Raw numeric table from a CSV with a header row. Lines starting with '#' and
// blank lines are skipped.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::filesystem::path& path);

// Header x1, ..., xd, y. Values must already lie in [0, 1] unless bounds are
// applied through split_regression_table + rescale.
struct RegressionTable {
  Matrix x;
  Vector y;
};

RegressionTable split_regression_table(const CsvTable& table);

struct BoundsSidecar {
  std::vector<ScaleBounds> x;
  ScaleBounds y;
};

// {"L": [...], "U": [...], "L_y": v, "U_y": v}
BoundsSidecar parse_bounds(const nlohmann::json& j);

nlohmann::json read_json_file(const std::filesystem::path& path);

enum class NewtonEngine { kQae, kExact, kCmc };

struct NewtonProblem {
  std::unique_ptr<SumObjective> objective;
  ConvexityCertificate cert;
  std::vector<double> a0;
  NewtonOptions options;
  NewtonEngine engine = NewtonEngine::kQae;
};

// See docs/formats.md. Relative "data_csv" paths resolve against base_dir.
NewtonProblem parse_newton_problem(const nlohmann::json& j,
                                   const std::filesystem::path& base_dir = {});

SweepSpec parse_sweep_spec(const nlohmann::json& j);

struct LsmDemoSpec {
  LsmSpec lsm;
  double eps = 0.01;
  double gamma = 0.01;
  std::uint64_t seed = 0;
};

LsmDemoSpec parse_lsm_spec(const nlohmann::json& j);

}  // namespace qnewton
