#include "qnewton/encoding.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "qnewton/error.hpp"

namespace qnewton {

QueryTally encoding_query_cost(std::size_t j) {
  if (j == kObjectiveColumn) return {{"P_x", 1}, {"P_y", 1}};
  return {{"P_x", 2}};
}

namespace {

using Amplitudes = std::vector<std::complex<double>>;

struct Layout {
  std::size_t width;  // qubits per value register
  std::size_t reg_dim;

  std::size_t index(std::size_t k, std::size_t ui, std::size_t uj, std::size_t flag) const {
    return ((k * reg_dim + ui) * reg_dim + uj) * 2 + flag;
  }
};

std::vector<std::size_t> fixed_point_codes(const Dataset& data, std::size_t column, int bits) {
  const double scale = std::ldexp(1.0, bits);
  std::vector<std::size_t> codes(data.n_data());
  for (std::size_t k = 0; k < data.n_data(); ++k) {
    const double v =
        column == kObjectiveColumn ? data.target(k) : data.feature(k, column);
    const double q = v * scale;
    if (q != std::floor(q)) {
      throw Error(ErrorCode::kNotRepresentable,
                  "value " + std::to_string(v) + " needs more than " + std::to_string(bits) +
                      " fractional bits");
    }
    codes[k] = static_cast<std::size_t>(q);
  }
  return codes;
}

// |k>|u> -> |k>|u xor code_k> on one value register. A permutation, so it is
// applied by scattering amplitudes.
void apply_load(Amplitudes& psi, const Layout& lay, std::size_t n_index,
                const std::vector<std::size_t>& codes, bool second_register) {
  Amplitudes out(psi.size());
  for (std::size_t k = 0; k < n_index; ++k) {
    const std::size_t code = k < codes.size() ? codes[k] : 0;
    for (std::size_t ui = 0; ui < lay.reg_dim; ++ui) {
      for (std::size_t uj = 0; uj < lay.reg_dim; ++uj) {
        for (std::size_t f = 0; f < 2; ++f) {
          const std::size_t ti = second_register ? ui : (ui ^ code);
          const std::size_t tj = second_register ? (uj ^ code) : uj;
          out[lay.index(k, ti, tj, f)] = psi[lay.index(k, ui, uj, f)];
        }
      }
    }
  }
  psi.swap(out);
}

// Ry on the flag controlled by both value registers:
// cos(t)|0> + sin(t)|1> with sin^2(t) = (u_i / 2^b)(u_j / 2^b).
void apply_controlled_rotation(Amplitudes& psi, const Layout& lay, std::size_t n_index,
                               int bits) {
  const double scale = std::ldexp(1.0, bits);
  for (std::size_t k = 0; k < n_index; ++k) {
    for (std::size_t ui = 0; ui < lay.reg_dim; ++ui) {
      for (std::size_t uj = 0; uj < lay.reg_dim; ++uj) {
        const double p = (static_cast<double>(ui) / scale) * (static_cast<double>(uj) / scale);
        if (p > 1.0) continue;  // unreachable codes above 1.0
        const double s = std::sqrt(p);
        const double c = std::sqrt(1.0 - p);
        auto& a0 = psi[lay.index(k, ui, uj, 0)];
        auto& a1 = psi[lay.index(k, ui, uj, 1)];
        const auto n0 = c * a0 - s * a1;
        const auto n1 = s * a0 + c * a1;
        a0 = n0;
        a1 = n1;
      }
    }
  }
}

}  // namespace

EncodingState build_encoding_state(const Dataset& data, std::size_t i, std::size_t j,
                                   int value_bits) {
  const std::size_t n = data.n_data();
  if (n > kMaxEncodingData) {
    throw Error(ErrorCode::kInvalidArgument, "statevector verifier supports at most 64 data points");
  }
  if (value_bits < 0 || value_bits > 8) {
    throw Error(ErrorCode::kInvalidArgument, "value_bits must lie in [0, 8]");
  }
  if (i >= data.dim() || (j >= data.dim() && j != kObjectiveColumn)) {
    throw Error(ErrorCode::kInvalidArgument, "column index out of range");
  }
  const std::size_t index_qubits = std::max<std::size_t>(1, std::bit_width(n - 1));
  const Layout lay{static_cast<std::size_t>(value_bits) + 1,
                   std::size_t{1} << (value_bits + 1)};
  const std::size_t qubits = index_qubits + 2 * lay.width + 1;
  if (qubits > kMaxEncodingQubits) {
    throw Error(ErrorCode::kInvalidArgument,
                "encoding needs " + std::to_string(qubits) + " qubits, limit is 22");
  }

  const auto codes_i = fixed_point_codes(data, i, value_bits);
  const auto codes_j = fixed_point_codes(data, j, value_bits);

  const std::size_t n_index = std::size_t{1} << index_qubits;
  EncodingState st;
  st.amplitudes.assign(std::size_t{1} << qubits, {0.0, 0.0});
  st.n_data = n;
  st.value_bits = value_bits;
  st.index_qubits = index_qubits;

  // Step (ii): equiprobable superposition over the N_D data indices.
  const double amp = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t k = 0; k < n; ++k) st.amplitudes[lay.index(k, 0, 0, 0)] = amp;

  // Step (iii): data loads.
  apply_load(st.amplitudes, lay, n_index, codes_i, false);
  st.oracle_calls["P_x"] += 1;
  apply_load(st.amplitudes, lay, n_index, codes_j, true);
  st.oracle_calls[j == kObjectiveColumn ? "P_y" : "P_x"] += 1;

  // Step (iv): amplitude encoding of the product on the flag.
  apply_controlled_rotation(st.amplitudes, lay, n_index, value_bits);
  return st;
}

double flag_probability(const EncodingState& state) {
  double p = 0.0;
  for (std::size_t idx = 1; idx < state.amplitudes.size(); idx += 2) {
    p += std::norm(state.amplitudes[idx]);
  }
  return p;
}

double state_norm(const EncodingState& state) {
  double s = 0.0;
  for (const auto& a : state.amplitudes) s += std::norm(a);
  return std::sqrt(s);
}

}  // namespace qnewton
