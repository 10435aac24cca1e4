#pragma once

#include <complex>
#include <cstddef>
#include <limits>
#include <vector>

#include "qnewton/dataset.hpp"
#include "qnewton/qae.hpp"

namespace qnewton {

// Column index that selects the objective vector y instead of a feature.
inline constexpr std::size_t kObjectiveColumn = std::numeric_limits<std::size_t>::max();

inline constexpr std::size_t kMaxEncodingData = 64;
inline constexpr std::size_t kMaxEncodingQubits = 22;

// Statevector over |k>|u_i>|u_j>|flag>. Each value register holds b+1 qubits
// in fixed point 1.b, so u encodes u / 2^b and 1.0 is representable.
// Basis index: ((k * 2^w + u_i) * 2^w + u_j) * 2 + flag with w = b + 1.
struct EncodingState {
  std::vector<std::complex<double>> amplitudes;
  std::size_t n_data = 0;
  int value_bits = 0;
  std::size_t index_qubits = 0;
  QueryTally oracle_calls;  // data-oracle applications made during preparation
};

// Oracle calls one application of the preparation makes: two P_x loads for
// w_ij (also when i == j), one P_x and one P_y load for z_i.
QueryTally encoding_query_cost(std::size_t j);

// Steps: uniform superposition over k, load x_k^(i) and x_k^(j) (or y_k) into
// the value registers, then a controlled Ry on the flag so that the flag-1
// amplitude of branch k is sqrt(x_k^(i) x_k^(j)). i, j are zero-based.
// Throws NotRepresentable if a value is not a multiple of 2^-b.
EncodingState build_encoding_state(const Dataset& data, std::size_t i, std::size_t j,
                                   int value_bits);

double flag_probability(const EncodingState& state);
double state_norm(const EncodingState& state);

}  // namespace qnewton
