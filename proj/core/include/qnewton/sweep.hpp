#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace qnewton {

enum class SweepMode { kRegression, kQaeNewton, kCmcNewton };
enum class SweepAxis { kEps, kD, kKappa, kNData };

std::string_view sweep_mode_name(SweepMode m);
std::string_view sweep_axis_name(SweepAxis a);
SweepMode parse_sweep_mode(std::string_view s);
SweepAxis parse_sweep_axis(std::string_view s);

// Parameters not on the swept axis.
struct SweepFixed {
  double eps = 0.01;
  std::size_t d = 2;
  double kappa = 2.0;
  std::size_t n_data = 64;
  double gamma = 0.01;
  double noise = 0.0;
  // Newton modes: quadratic test problem with certified mu, M and delta0.
  double mu = 1.0;
  double m_lip = 1.0;
  double delta0 = 0.3;
  double region_radius = 2.0;
};

struct SweepSpec {
  SweepMode mode = SweepMode::kRegression;
  SweepAxis axis = SweepAxis::kEps;
  std::vector<double> values;
  SweepFixed fixed;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  std::size_t workers = 0;  // 0: hardware concurrency
  bool record_wall_time = true;
};

void validate(const SweepSpec& spec);

struct SweepRow {
  std::string mode;
  std::string axis;
  double value = 0.0;
  std::size_t point = 0;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::size_t d = 0;
  std::size_t n_data = 0;
  double kappa = 0.0;
  double c = 0.0;
  double eps = 0.0;
  double eps_prime = 0.0;  // regression eps', Newton eps_g
  double eps_h = 0.0;
  std::uint64_t grid_size = 0;
  std::uint64_t grid_size_h = 0;
  std::uint64_t repeats = 0;
  std::uint64_t n_it = 0;
  std::uint64_t samples_g = 0;
  std::uint64_t samples_h = 0;
  std::uint64_t q_px = 0;
  std::uint64_t q_py = 0;
  std::uint64_t q_pc = 0;
  std::uint64_t q_pi = 0;
  std::uint64_t q_pij = 0;
  double achieved_error = 0.0;
  std::string status = "ok";
  double wall_time_ms = 0.0;
};

// One row per (grid value, trial), in grid order then trial order regardless
// of how the worker pool scheduled them. Module errors land in `status`.
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

inline constexpr std::string_view kSweepSchemaLine = "# qnewton-lab schema v1";

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

// Re-derives the row's query counts from the closed-form accounting of the
// amplitude-estimation engine (or the CMC sample counts).
bool row_queries_consistent(const SweepRow& row);

// Shortest decimal text that parses back to v.
std::string format_number(double v);

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace qnewton
