#include "qnewton/qae.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "qnewton/error.hpp"

namespace qnewton {

namespace {

constexpr double kPi = std::numbers::pi;

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) {
    throw Error(ErrorCode::kOverflow, "query count exceeds 64-bit range");
  }
  return a * b;
}

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  if (b > std::numeric_limits<std::uint64_t>::max() - a) {
    throw Error(ErrorCode::kOverflow, "query count exceeds 64-bit range");
  }
  return a + b;
}

void require_grid(std::uint64_t m) {
  if (m < 4 || !std::has_single_bit(m) || m > kMaxGridSize) {
    throw Error(ErrorCode::kInvalidArgument,
                "grid size must be a power of two in [4, 2^40], got " + std::to_string(m));
  }
}

void require_amplitude(double a) {
  if (!(a >= 0.0 && a <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "amplitude must lie in [0, 1]");
  }
}

// Fejer kernel K(x) with the removable singularity at integers filled in.
double fejer(double x, double m) {
  const double r = x - std::nearbyint(x);
  const double s = std::sin(kPi * r);
  if (s == 0.0) return 1.0;
  // m is a power of two, so m * r is exact. sin^2 has period pi, so only the
  // fractional part matters; this keeps the argument small for large grids.
  const double mr = m * r;
  const double f = mr - std::nearbyint(mr);
  if (f == 0.0) return 0.0;
  const double num = std::sin(kPi * f);
  return (num * num) / (m * m * s * s);
}

// Phase of the positive branch in grid units: theta/pi in [0, 1/2].
double branch_phase(double a) { return std::asin(std::sqrt(a)) / kPi; }

}  // namespace

void merge_queries(QueryTally& into, const QueryTally& from) {
  for (const auto& [name, count] : from) into[name] = checked_add(into[name], count);
}

void validate(const AmplitudeOracle& oracle) { require_amplitude(oracle.true_amplitude); }

void validate(const QaeConfig& cfg) {
  require_grid(cfg.grid_size);
  if (cfg.repeats == 0 || cfg.repeats % 2 == 0) {
    throw Error(ErrorCode::kInvalidArgument, "repeats must be a positive odd integer");
  }
}

double single_run_error_bound(std::uint64_t grid_size) {
  const double m = static_cast<double>(grid_size);
  return kPi / m + kPi * kPi / (m * m);
}

std::uint64_t grid_for_error(double eps_prime) {
  if (!(eps_prime > 0.0 && eps_prime <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "eps_prime must lie in (0, 1]");
  }
  std::uint64_t m = 4;
  while (single_run_error_bound(m) > eps_prime) {
    if (m >= kMaxGridSize) {
      throw Error(ErrorCode::kOverflow,
                  "required QAE grid exceeds 2^40 for eps_prime = " + std::to_string(eps_prime));
    }
    m <<= 1;
  }
  return m;
}

std::uint64_t repeats_for_confidence(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "gamma must lie in (0, 1)");
  }
  const double raw = std::ceil(24.0 * std::log(1.0 / gamma));
  auto r = static_cast<std::uint64_t>(std::max(1.0, raw));
  if (r % 2 == 0) ++r;
  return r;
}

std::uint64_t applications_per_run(std::uint64_t grid_size) {
  require_grid(grid_size);
  return 2 * (grid_size - 1) + 1;
}

QueryTally expected_queries(const QueryTally& base_cost, std::uint64_t grid_size,
                            std::uint64_t repeats) {
  const std::uint64_t per_cost = checked_mul(repeats, applications_per_run(grid_size));
  QueryTally out;
  for (const auto& [name, cost] : base_cost) out[name] = checked_mul(per_cost, cost);
  return out;
}

std::vector<double> qae_outcome_distribution(double a, std::uint64_t grid_size) {
  require_amplitude(a);
  require_grid(grid_size);
  if (grid_size > kMaxTableGridSize) {
    throw Error(ErrorCode::kOverflow, "outcome table limited to 2^24 grid points");
  }
  const double m = static_cast<double>(grid_size);
  const double w = branch_phase(a);
  std::vector<double> p(grid_size);
  for (std::uint64_t y = 0; y < grid_size; ++y) {
    const double x = static_cast<double>(y) / m;
    p[y] = 0.5 * (fejer(x - w, m) + fejer(x + w, m));
  }
  return p;
}

double qae_outcome_probability(double a, std::uint64_t grid_size, std::uint64_t y) {
  require_amplitude(a);
  require_grid(grid_size);
  const double m = static_cast<double>(grid_size);
  const double x = static_cast<double>(y % grid_size) / m;
  const double w = branch_phase(a);
  return 0.5 * (fejer(x - w, m) + fejer(x + w, m));
}

std::uint64_t sample_qae_outcome(double a, std::uint64_t grid_size, CounterRng& rng) {
  require_amplitude(a);
  require_grid(grid_size);
  const double m = static_cast<double>(grid_size);
  const bool negative_branch = rng.uniform() < 0.5;
  // Branch centre in grid units, reduced to [0, M).
  double centre = m * branch_phase(a);
  if (negative_branch) centre = m - centre;
  double base = std::floor(centre);
  double frac = centre - base;
  if (base >= m) base -= m;
  const auto j = static_cast<std::uint64_t>(base);

  if (frac == 0.0) return j % grid_size;

  // Walk offsets t = 0, 1, -1, 2, -2, ..., M/2 accumulating
  //   P(t) = sin^2(pi f) / (M^2 sin^2(pi (t - f) / M)).
  const double sf = std::sin(kPi * frac);
  const double numer = sf * sf / (m * m);
  const double u = rng.uniform();
  double cumulative = 0.0;
  const auto half = static_cast<std::int64_t>(grid_size / 2);
  std::int64_t t = 0;
  for (std::uint64_t visited = 0; visited < grid_size; ++visited) {
    const double s = std::sin(kPi * (static_cast<double>(t) - frac) / m);
    cumulative += numer / (s * s);
    if (cumulative > u) break;
    // Next offset in the alternating order.
    if (t > 0) {
      t = (t == half) ? t : -t;
    } else {
      t = -t + 1;
    }
  }
  const auto mod = static_cast<std::int64_t>(grid_size);
  std::int64_t y = (static_cast<std::int64_t>(j) + t) % mod;
  if (y < 0) y += mod;
  return static_cast<std::uint64_t>(y);
}

double decode_outcome(std::uint64_t y, std::uint64_t grid_size) {
  const double s = std::sin(kPi * static_cast<double>(y) / static_cast<double>(grid_size));
  return s * s;
}

EstimatorReport qae_estimate(const AmplitudeOracle& oracle, const QaeConfig& cfg) {
  validate(oracle);
  validate(cfg);
  CounterRng rng(cfg.rng_seed);
  std::vector<double> estimates(cfg.repeats);
  for (double& e : estimates) {
    e = decode_outcome(sample_qae_outcome(oracle.true_amplitude, cfg.grid_size, rng),
                       cfg.grid_size);
  }
  const auto mid = estimates.begin() + static_cast<std::ptrdiff_t>(cfg.repeats / 2);
  std::nth_element(estimates.begin(), mid, estimates.end());

  EstimatorReport report;
  report.estimate = *mid;
  report.error_bound = single_run_error_bound(cfg.grid_size);
  report.target_error = report.error_bound;
  report.grid_size = cfg.grid_size;
  report.repeats = cfg.repeats;
  report.queries = expected_queries(oracle.base_query_cost, cfg.grid_size, cfg.repeats);
  return report;
}

namespace {

QaeConfig config_for(double target_error, double confidence, std::uint64_t seed) {
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "confidence must lie in (0, 1)");
  }
  return QaeConfig{grid_for_error(target_error), repeats_for_confidence(1.0 - confidence), seed};
}

}  // namespace

EstimatorReport SimulatedQae::estimate(const AmplitudeOracle& oracle, double target_error,
                                       double confidence, std::uint64_t seed) const {
  EstimatorReport report = qae_estimate(oracle, config_for(target_error, confidence, seed));
  report.target_error = target_error;
  report.confidence = confidence;
  return report;
}

EstimatorReport ExactAmplitudeEstimator::estimate(const AmplitudeOracle& oracle,
                                                  double target_error, double confidence,
                                                  std::uint64_t seed) const {
  validate(oracle);
  const QaeConfig cfg = config_for(target_error, confidence, seed);
  EstimatorReport report;
  report.estimate = oracle.true_amplitude;
  report.target_error = target_error;
  report.error_bound = single_run_error_bound(cfg.grid_size);
  report.confidence = confidence;
  report.grid_size = cfg.grid_size;
  report.repeats = cfg.repeats;
  report.queries = expected_queries(oracle.base_query_cost, cfg.grid_size, cfg.repeats);
  return report;
}

}  // namespace qnewton
