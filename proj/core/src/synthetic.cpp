#include "qnewton/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "qnewton/error.hpp"
#include "qnewton/regression.hpp"
#include "qnewton/rng.hpp"

namespace qnewton {

namespace {

constexpr double kJitter = 0.02;
constexpr double kKappaTolerance = 1.1;
constexpr double kMaxMix = 0.999;

struct Layout {
  std::vector<std::size_t> group;  // per row
  std::vector<double> jitter;      // per entry, in [0, 1)
};

Matrix build_rows(const Layout& lay, std::size_t d, double t) {
  const std::size_t n = lay.group.size();
  std::vector<double> x(n * d);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < d; ++i) {
      const double base = (i == lay.group[k] ? 1.0 : t);
      x[k * d + i] = base * (1.0 - kJitter * lay.jitter[k * d + i]);
    }
  }
  return Matrix(n, d, std::move(x));
}

[[noreturn]] void infeasible(const std::string& why) {
  throw Error(ErrorCode::kInfeasibleSpec, why);
}

}  // namespace

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  const std::size_t d = spec.d;
  const std::size_t n = spec.n_data;
  if (d == 0) infeasible("d must be >= 1");
  if (d > n) infeasible("d = " + std::to_string(d) + " exceeds N_D = " + std::to_string(n));
  if (!(spec.target_kappa >= 1.0)) infeasible("target kappa must be >= 1");
  if (!(spec.noise_level >= 0.0)) infeasible("noise level must be >= 0");

  CounterRng rng(derive_stream(spec.seed, 0x5947));
  Layout lay;
  lay.group.resize(n);
  for (std::size_t k = 0; k < n; ++k) lay.group[k] = k % d;
  for (std::size_t k = n; k > 1; --k) {
    std::swap(lay.group[k - 1], lay.group[rng.uniform_index(k)]);
  }
  lay.jitter.resize(n * d);
  for (double& j : lay.jitter) j = rng.uniform();

  auto kappa_at = [&](double t) { return condition_number(build_rows(lay, d, t)); };

  double lo = 0.0;
  double hi = kMaxMix;
  const double k_lo = kappa_at(lo);
  if (k_lo > spec.target_kappa * kKappaTolerance) {
    infeasible("smallest reachable kappa " + std::to_string(k_lo) + " exceeds target");
  }
  double t = 0.0;
  if (k_lo < spec.target_kappa) {
    if (kappa_at(hi) < spec.target_kappa) infeasible("target kappa is not reachable");
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      (kappa_at(mid) < spec.target_kappa ? lo : hi) = mid;
    }
    t = 0.5 * (lo + hi);
  }

  Matrix x = build_rows(lay, d, t);
  std::vector<double> a(d);
  double sum = 0.0;
  for (double& v : a) {
    v = 0.05 + rng.uniform();
    sum += v;
  }
  const double total = 0.5 + 0.5 * rng.uniform();
  for (double& v : a) v *= total / sum;
  Vector a_star(std::move(a));

  const Vector fitted = x * a_star;
  std::vector<double> y(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double noise = spec.noise_level > 0.0 ? spec.noise_level * rng.normal() : 0.0;
    y[k] = std::clamp(fitted[k] + noise, 0.0, 1.0);
  }

  Dataset data(std::move(x), Vector(std::move(y)));
  const NormalEquations ne = compute_normal_equations_exact(data);
  if (ne.c < kSyntheticMinFloor) {
    infeasible("diagonal floor " + std::to_string(ne.c) + " is below 0.1");
  }
  if (ne.kappa > spec.target_kappa * kKappaTolerance ||
      ne.kappa < spec.target_kappa / kKappaTolerance) {
    infeasible("realised kappa " + std::to_string(ne.kappa) + " misses the target");
  }
  return SyntheticData{std::move(data), std::move(a_star), ne.kappa, ne.c, t};
}

}  // namespace qnewton
