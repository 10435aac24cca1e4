#include "qnewton/rng.hpp"

#include <cmath>
#include <numbers>

namespace qnewton {

namespace {
constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;
}  // namespace

std::uint64_t mix64(std::uint64_t x) noexcept {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

std::uint64_t derive_stream(std::uint64_t master, std::uint64_t stream_id) noexcept {
  return mix64(master ^ mix64(stream_id + kGoldenGamma));
}

std::uint64_t derive_stream(std::uint64_t master, std::uint64_t a, std::uint64_t b,
                            std::uint64_t c, std::uint64_t d) noexcept {
  std::uint64_t s = derive_stream(master, a);
  s = derive_stream(s, b);
  s = derive_stream(s, c);
  return derive_stream(s, d);
}

CounterRng::result_type CounterRng::operator()() noexcept {
  ++counter_;
  return mix64(key_ + counter_ * kGoldenGamma);
}

double CounterRng::uniform() noexcept {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

__extension__ typedef unsigned __int128 Wide;

std::uint64_t CounterRng::uniform_index(std::uint64_t n) noexcept {
  // Lemire's multiply-shift with rejection; exact for every n.
  const std::uint64_t threshold = (0 - n) % n;
  while (true) {
    const Wide m = static_cast<Wide>((*this)()) * n;
    if (static_cast<std::uint64_t>(m) >= threshold) {
      return static_cast<std::uint64_t>(m >> 64);
    }
  }
}

double CounterRng::normal() noexcept {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace qnewton
