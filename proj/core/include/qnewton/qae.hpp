#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "qnewton/rng.hpp"

namespace qnewton {

// Oracle name -> number of calls. Ordered so serialized output is stable.
using QueryTally = std::map<std::string, std::uint64_t>;

void merge_queries(QueryTally& into, const QueryTally& from);

// A state-preparation operator A with A|0> = sqrt(a)|good> + sqrt(1-a)|bad>,
// described by its marked-state probability and by how many calls to each
// data oracle one application of A makes.
struct AmplitudeOracle {
  double true_amplitude = 0.0;
  QueryTally base_query_cost;
};

void validate(const AmplitudeOracle& oracle);

struct QaeConfig {
  std::uint64_t grid_size = 8;  // M_eval, a power of two >= 4
  std::uint64_t repeats = 1;    // odd
  std::uint64_t rng_seed = 0;
};

void validate(const QaeConfig& cfg);

struct EstimatorReport {
  double estimate = 0.0;
  double target_error = 0.0;  // requested additive error
  double error_bound = 0.0;   // pi/M + pi^2/M^2 for the grid actually used
  double confidence = 0.0;    // requested success probability
  std::uint64_t grid_size = 0;
  std::uint64_t repeats = 0;
  QueryTally queries;
};

inline constexpr std::uint64_t kMaxGridSize = std::uint64_t{1} << 40;
inline constexpr std::uint64_t kMaxTableGridSize = std::uint64_t{1} << 24;

// Single-run additive error bound of phase-estimation QAE on an M-point grid.
double single_run_error_bound(std::uint64_t grid_size);

// Smallest power of two M >= 4 with pi/M + pi^2/M^2 <= eps_prime, eps_prime in (0, 1].
// Throws Overflow when M would exceed 2^40.
std::uint64_t grid_for_error(double eps_prime);

// Smallest odd r >= ceil(24 ln(1/gamma)), at least 1.
std::uint64_t repeats_for_confidence(double gamma);

// Applications of A in one run: one initial A plus M-1 uses of Q at two each.
std::uint64_t applications_per_run(std::uint64_t grid_size);

// r * (2(M-1)+1) * cost for every oracle in the cost map. Throws Overflow on
// 64-bit overflow.
QueryTally expected_queries(const QueryTally& base_cost, std::uint64_t grid_size,
                            std::uint64_t repeats);

// P(y) for y in [0, M): the two-branch Fejer kernel
//   P(y) = (K(y/M - theta/pi) + K(y/M + theta/pi)) / 2,  theta = asin(sqrt(a)),
//   K(x) = sin^2(M pi x) / (M^2 sin^2(pi x)),  K(integer) = 1.
std::vector<double> qae_outcome_distribution(double a, std::uint64_t grid_size);
double qae_outcome_probability(double a, std::uint64_t grid_size, std::uint64_t y);

// Draws one grid outcome from the distribution above without building the
// table, so it works for grids up to 2^40.
std::uint64_t sample_qae_outcome(double a, std::uint64_t grid_size, CounterRng& rng);

// sin^2(pi y / M).
double decode_outcome(std::uint64_t y, std::uint64_t grid_size);

// Median of cfg.repeats decoded outcomes; queries follow expected_queries.
EstimatorReport qae_estimate(const AmplitudeOracle& oracle, const QaeConfig& cfg);

// Engine seam used by the regression and Newton drivers.
class AmplitudeEstimator {
 public:
  virtual ~AmplitudeEstimator() = default;

  // Estimates oracle.true_amplitude to additive error target_error with
  // probability >= confidence. seed selects an independent RNG stream.
  virtual EstimatorReport estimate(const AmplitudeOracle& oracle, double target_error,
                                   double confidence, std::uint64_t seed) const = 0;

  virtual std::string_view name() const = 0;
};

// Grid from grid_for_error, repeats from repeats_for_confidence, sampling from
// the analytic outcome distribution.
class SimulatedQae final : public AmplitudeEstimator {
 public:
  EstimatorReport estimate(const AmplitudeOracle& oracle, double target_error,
                           double confidence, std::uint64_t seed) const override;
  std::string_view name() const override { return "qae"; }
};

// Returns the true amplitude with the same grid/repeat/query accounting as
// SimulatedQae. Used for reduction checks.
class ExactAmplitudeEstimator final : public AmplitudeEstimator {
 public:
  EstimatorReport estimate(const AmplitudeOracle& oracle, double target_error,
                           double confidence, std::uint64_t seed) const override;
  std::string_view name() const override { return "exact"; }
};

}  // namespace qnewton
