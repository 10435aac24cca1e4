#pragma once

#include <cstddef>
#include <cstdint>

#include "qnewton/dataset.hpp"
#include "qnewton/numerics.hpp"

namespace qnewton {

struct SyntheticSpec {
  std::size_t d = 2;
  std::size_t n_data = 64;
  double target_kappa = 1.0;
  double noise_level = 0.0;  // standard deviation of additive noise on y
  std::uint64_t seed = 0;
};

struct SyntheticData {
  Dataset data;
  Vector a_star;         // nonnegative, sums to at most 1, so X a* lies in [0, 1]
  double kappa = 1.0;    // realised cond(X)
  double c = 0.0;        // realised min w_ii minus the floor margin
  double mix = 0.0;      // blend parameter t of the row construction
};

// Minimum diagonal floor every generated dataset satisfies.
inline constexpr double kSyntheticMinFloor = 0.1;

// Rows are x = (1 - t) e_g + t 1 for a group g, with a small seeded jitter, so
// every column has w_ii >= 1/d-ish and t tunes cond(X) from 1 upwards. t is
// found by bisection so the realised kappa is within 10% of the target.
// Throws InfeasibleSpec if d > N_D, target_kappa < 1, the floor would drop
// below 0.1, or the target cannot be reached.
SyntheticData generate_synthetic(const SyntheticSpec& spec);

}  // namespace qnewton
