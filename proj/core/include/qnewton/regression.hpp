#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#include "qnewton/dataset.hpp"
#include "qnewton/numerics.hpp"
#include "qnewton/qae.hpp"

namespace qnewton {

// W a = z with W = X^T X / N_D and z = X^T y / N_D.
struct NormalEquations {
  Matrix w;
  Vector z;
  double c = 0.0;      // every diagonal entry of W exceeds c
  double kappa = 1.0;  // condition number of X
};

// Margin subtracted from min w_ii when deriving c from data.
inline constexpr double kDiagonalFloorMargin = 1e-12;

// Throws RankDeficient if X is not of full column rank or a diagonal entry of
// W is zero.
NormalEquations compute_normal_equations_exact(const Dataset& data);

enum class RegressionMode { kExact, kQae, kInject };

std::string_view mode_name(RegressionMode mode);
RegressionMode parse_mode(std::string_view name);

// Totals over all element estimations of one regression or Newton iteration.
struct EngineSummary {
  std::size_t n_estimates = 0;
  std::uint64_t grid_size = 0;
  std::uint64_t repeats = 0;
  double per_estimate_confidence = 0.0;
  QueryTally queries;
};

struct RegressionResult {
  Vector coefficients;
  RegressionMode mode = RegressionMode::kExact;
  double eps_target = 0.0;
  double eps_prime_used = 0.0;
  Matrix w_used;  // system actually solved
  Vector z_used;
  std::optional<EngineSummary> report;  // absent in exact mode
  std::uint64_t classical_ops = 0;      // multiply-adds spent forming W and z classically
};

// Direct O(d^2 N_D) summation followed by solve_symmetric.
RegressionResult naive_regress(const Dataset& data);

// min{c / (d kappa^2), c^2 eps / (2 d^{3/2} kappa^4)}.
double lemma1_tolerance(std::size_t d, double kappa, double c, double eps);

// c / (21 d kappa^2). Keeps d eps' kappa^2 / c <= 1/21 so the first-order
// error bound times 1.05 is a true upper bound.
double invertibility_cap(std::size_t d, double kappa, double c);

// 2 d^{3/2} kappa^4 eps' / c^2.
double lemma1_error_bound(std::size_t d, double kappa, double c, double eps_prime);

inline constexpr double kBoundSlack = 0.05;

struct EstimatedSystem {
  Matrix w;
  Vector z;
  EngineSummary summary;
};

// One QAE estimation per upper-triangle w_ij and per z_i, each at additive
// error eps_prime and confidence 1 - gamma / d^2. W is mirrored from the upper
// triangle. Element streams come from derive_stream(seed, kind, i, j).
EstimatedSystem estimate_normal_equations_qae(const Dataset& data, double eps_prime,
                                              double gamma, const AmplitudeEstimator& engine,
                                              std::uint64_t seed);

struct HybridOptions {
  double eps = 0.01;
  double kappa = 1.0;  // caller-certified upper bound on cond(X)
  double c = 0.5;      // caller-certified lower bound on the diagonal of W
  double gamma = 0.01;
  std::uint64_t seed = 0;
};

void validate(const HybridOptions& opts, std::size_t d);

// eps' used by the hybrid solver: min(lemma1_tolerance, invertibility_cap).
double hybrid_eps_prime(const HybridOptions& opts, std::size_t d);

RegressionResult hybrid_regress(const Dataset& data, const HybridOptions& opts,
                                const AmplitudeEstimator& engine);

enum class InjectionPattern {
  kAdversarial,  // dW_ij = -eps' sign(v_i v_j), v the eigenvector of lambda_min(W)
  kRandomSigns,
};

// Replaces the QAE step by a deterministic shift of every estimated element by
// exactly +-eps'. z shifts use seeded random signs in both patterns.
RegressionResult injected_regress(const Dataset& data, const HybridOptions& opts,
                                  InjectionPattern pattern);

// Same, with an explicit eps' instead of the one derived from opts.
RegressionResult injected_regress(const Dataset& data, double eps_prime, InjectionPattern pattern,
                                  std::uint64_t seed);

struct BoundVerdict {
  bool pass = false;
  double error_2 = 0.0;    // ||a_hat - a||
  double error_inf = 0.0;  // ||a_hat - a||_inf
  double bound = 0.0;      // 2 d^{3/2} kappa^4 eps' / c^2 * 1.05
  double margin = 0.0;     // bound - error_2
};

// Passes iff error_2 < bound and error_inf <= error_2.
BoundVerdict verify_error_bound(const Vector& a_hat, const Vector& a_true, double eps_prime,
                                std::size_t d, double kappa, double c);

}  // namespace qnewton
