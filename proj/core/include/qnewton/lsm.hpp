#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "qnewton/dataset.hpp"
#include "qnewton/qae.hpp"
#include "qnewton/regression.hpp"

namespace qnewton {

// American put on one asset under geometric Brownian motion.
struct LsmSpec {
  std::size_t n_paths = 10000;
  std::size_t n_steps = 10;
  double spot = 36.0;
  double volatility = 0.2;
  double rate = 0.06;
  double strike = 40.0;
  double maturity = 1.0;
  int basis_degree = 2;  // basis 1, u, ..., u^degree
  std::uint64_t seed = 0;
};

void validate(const LsmSpec& spec);

enum class LsmDateStatus { kOk, kNoItmPaths, kRankDeficient };

std::string_view status_name(LsmDateStatus s);

// One exercise date. Explanatory values are powers of the in-the-money price
// rescaled by its simulated range; the objective is the discounted realised
// cashflow rescaled by [0, strike].
struct LsmDate {
  std::size_t step = 0;
  double time = 0.0;
  LsmDateStatus status = LsmDateStatus::kOk;
  std::size_t n_itm = 0;
  ScaleBounds price_bounds;
  std::optional<Dataset> data;  // present for kOk
  std::optional<Vector> classical_coefficients;
};

struct LsmData {
  std::vector<LsmDate> dates;  // latest date first, matching backward induction
  double price = 0.0;          // classical LSM estimate of the option value
};

// Simulates paths and runs classical backward induction. The exercise
// decisions, and hence every date's dataset, come from the classical fits.
LsmData generate_lsm(const LsmSpec& spec);

struct LsmComparison {
  std::size_t step = 0;
  LsmDateStatus status = LsmDateStatus::kOk;
  std::size_t n_itm = 0;
  double kappa = 0.0;
  double c = 0.0;
  double eps_prime = 0.0;
  std::optional<Vector> classical;
  std::optional<Vector> hybrid;
  double gap_inf = 0.0;
  bool within_eps = false;
  QueryTally queries;
};

struct LsmDemoResult {
  LsmSpec spec;
  double eps = 0.0;
  double gamma = 0.0;
  double price = 0.0;
  std::vector<LsmComparison> dates;
  bool all_within_eps() const;
};

// Hybrid regression at every kOk date with kappa and c measured from the
// date's data, compared to the classical coefficients.
LsmDemoResult run_lsm_demo(const LsmSpec& spec, double eps, double gamma, std::uint64_t seed,
                           const AmplitudeEstimator& engine);

}  // namespace qnewton
