#pragma once

#include <cstdint>
#include <limits>

namespace qnewton {

// SplitMix64 finalizer. Bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Derives the seed of an independent stream from a master seed and a stream
// identifier. Streams are addressed by id, never by draw order, so results do
// not depend on how work is scheduled across threads.
std::uint64_t derive_stream(std::uint64_t master, std::uint64_t stream_id) noexcept;

// Convenience for multi-component ids such as (iteration, kind, i, j).
std::uint64_t derive_stream(std::uint64_t master, std::uint64_t a, std::uint64_t b,
                            std::uint64_t c = 0, std::uint64_t d = 0) noexcept;

// Counter-based generator: the n-th output is mix64(key + n * golden_gamma).
// Models UniformRandomBitGenerator, but the distributions below are used
// instead of <random> ones so outputs are identical across standard libraries.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept;

  // Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  // Uniform integer on [0, n). n must be positive.
  std::uint64_t uniform_index(std::uint64_t n) noexcept;
  // Standard normal via Box-Muller (no cached second variate).
  double normal() noexcept;

  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace qnewton
