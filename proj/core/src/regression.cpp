#include "qnewton/regression.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "qnewton/encoding.hpp"
#include "qnewton/error.hpp"
#include "qnewton/rng.hpp"

namespace qnewton {

namespace {

constexpr std::uint64_t kStreamW = 1;
constexpr std::uint64_t kStreamZ = 2;
constexpr std::uint64_t kStreamInject = 3;

struct ExactSums {
  std::vector<double> w;  // d x d row-major
  std::vector<double> z;
};

ExactSums exact_sums(const Dataset& data) {
  const std::size_t n = data.n_data();
  const std::size_t d = data.dim();
  ExactSums s{std::vector<double>(d * d, 0.0), std::vector<double>(d, 0.0)};
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += data.feature(k, i) * data.feature(k, j);
      s.w[i * d + j] = s.w[j * d + i] = acc / static_cast<double>(n);
    }
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) acc += data.feature(k, i) * data.target(k);
    s.z[i] = acc / static_cast<double>(n);
  }
  return s;
}

Matrix mirror_upper(std::size_t d, const std::vector<double>& upper) {
  std::vector<double> full(d * d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) full[i * d + j] = full[j * d + i] = upper[i * d + j];
  }
  return Matrix(d, d, std::move(full));
}

std::uint64_t classical_op_count(std::size_t d, std::size_t n) {
  return static_cast<std::uint64_t>(d * (d + 1) / 2 + d) * n;
}

double sign_of(double v) { return v < 0.0 ? -1.0 : 1.0; }

}  // namespace

NormalEquations compute_normal_equations_exact(const Dataset& data) {
  const std::size_t d = data.dim();
  ExactSums s = exact_sums(data);
  double min_diag = 1.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double wii = s.w[i * d + i];
    if (wii <= 0.0) {
      throw Error(ErrorCode::kRankDeficient,
                  "column " + std::to_string(i + 1) +
                      " is identically zero: X is rank deficient and w_ii = 0 leaves no "
                      "positive diagonal floor");
    }
    min_diag = std::min(min_diag, wii);
  }
  const double kappa = condition_number(data.x());
  return NormalEquations{Matrix(d, d, std::move(s.w)), Vector(std::move(s.z)),
                         min_diag - kDiagonalFloorMargin, kappa};
}

std::string_view mode_name(RegressionMode mode) {
  switch (mode) {
    case RegressionMode::kExact: return "exact";
    case RegressionMode::kQae: return "qae";
    case RegressionMode::kInject: return "inject";
  }
  return "exact";
}

RegressionMode parse_mode(std::string_view name) {
  if (name == "exact") return RegressionMode::kExact;
  if (name == "qae") return RegressionMode::kQae;
  if (name == "inject") return RegressionMode::kInject;
  throw Error(ErrorCode::kInvalidArgument, "unknown mode '" + std::string(name) + "'");
}

RegressionResult naive_regress(const Dataset& data) {
  const std::size_t d = data.dim();
  ExactSums s = exact_sums(data);
  Matrix w(d, d, std::move(s.w));
  Vector z(std::move(s.z));
  Vector a = solve_symmetric(w, z);
  return RegressionResult{std::move(a),
                          RegressionMode::kExact,
                          0.0,
                          0.0,
                          std::move(w),
                          std::move(z),
                          std::nullopt,
                          classical_op_count(d, data.n_data())};
}

double lemma1_tolerance(std::size_t d, double kappa, double c, double eps) {
  if (d == 0 || !(kappa >= 1.0) || !(c > 0.0 && c <= 1.0) || !(eps > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "need d >= 1, kappa >= 1, 0 < c <= 1 and eps > 0");
  }
  const double dd = static_cast<double>(d);
  const double k2 = kappa * kappa;
  const double first = c / (dd * k2);
  const double second = c * c * eps / (2.0 * std::pow(dd, 1.5) * k2 * k2);
  return std::min(first, second);
}

double invertibility_cap(std::size_t d, double kappa, double c) {
  return c / (21.0 * static_cast<double>(d) * kappa * kappa);
}

double lemma1_error_bound(std::size_t d, double kappa, double c, double eps_prime) {
  const double dd = static_cast<double>(d);
  const double k2 = kappa * kappa;
  return 2.0 * std::pow(dd, 1.5) * k2 * k2 * eps_prime / (c * c);
}

EstimatedSystem estimate_normal_equations_qae(const Dataset& data, double eps_prime,
                                              double gamma, const AmplitudeEstimator& engine,
                                              std::uint64_t seed) {
  if (!(eps_prime > 0.0)) throw Error(ErrorCode::kInvalidArgument, "eps_prime must be positive");
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "gamma must lie in (0, 1)");
  }
  const std::size_t d = data.dim();
  const double dd = static_cast<double>(d);
  const double confidence = 1.0 - gamma / (dd * dd);
  ExactSums truth = exact_sums(data);

  EngineSummary summary;
  summary.per_estimate_confidence = confidence;
  auto run = [&](double amplitude, std::size_t column, std::uint64_t stream) {
    AmplitudeOracle oracle{std::clamp(amplitude, 0.0, 1.0), encoding_query_cost(column)};
    EstimatorReport rep = engine.estimate(oracle, eps_prime, confidence, stream);
    merge_queries(summary.queries, rep.queries);
    summary.grid_size = rep.grid_size;
    summary.repeats = rep.repeats;
    ++summary.n_estimates;
    return rep.estimate;
  };

  std::vector<double> w_hat(d * d, 0.0);
  std::vector<double> z_hat(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      w_hat[i * d + j] = run(truth.w[i * d + j], j, derive_stream(seed, kStreamW, i, j));
    }
  }
  for (std::size_t i = 0; i < d; ++i) {
    z_hat[i] = run(truth.z[i], kObjectiveColumn, derive_stream(seed, kStreamZ, i));
  }
  return EstimatedSystem{mirror_upper(d, w_hat), Vector(std::move(z_hat)), std::move(summary)};
}

void validate(const HybridOptions& opts, std::size_t d) {
  if (d == 0) throw Error(ErrorCode::kInvalidArgument, "dataset has no columns");
  if (!(opts.eps > 0.0)) throw Error(ErrorCode::kInvalidArgument, "eps must be positive");
  if (!(opts.kappa >= 1.0)) throw Error(ErrorCode::kInvalidArgument, "kappa must be >= 1");
  if (!(opts.c > 0.0 && opts.c <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "c must lie in (0, 1]");
  }
  if (!(opts.gamma > 0.0 && opts.gamma < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "gamma must lie in (0, 1)");
  }
}

double hybrid_eps_prime(const HybridOptions& opts, std::size_t d) {
  validate(opts, d);
  return std::min(lemma1_tolerance(d, opts.kappa, opts.c, opts.eps),
                  invertibility_cap(d, opts.kappa, opts.c));
}

RegressionResult hybrid_regress(const Dataset& data, const HybridOptions& opts,
                                const AmplitudeEstimator& engine) {
  const double eps_prime = hybrid_eps_prime(opts, data.dim());
  EstimatedSystem est =
      estimate_normal_equations_qae(data, eps_prime, opts.gamma, engine, opts.seed);
  Vector a = solve_symmetric(est.w, est.z);
  return RegressionResult{std::move(a),          RegressionMode::kQae, opts.eps,
                          eps_prime,             std::move(est.w),     std::move(est.z),
                          std::move(est.summary), 0};
}

RegressionResult injected_regress(const Dataset& data, double eps_prime, InjectionPattern pattern,
                                  std::uint64_t seed) {
  if (!(eps_prime > 0.0)) throw Error(ErrorCode::kInvalidArgument, "eps_prime must be positive");
  const std::size_t d = data.dim();
  ExactSums s = exact_sums(data);
  CounterRng rng(derive_stream(seed, kStreamInject));

  std::vector<double> w_hat = s.w;
  if (pattern == InjectionPattern::kAdversarial) {
    const SymmetricEigen eig = symmetric_eigen(Matrix(d, d, s.w));
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = i; j < d; ++j) {
        const double sgn = sign_of(eig.vectors(i, 0)) * sign_of(eig.vectors(j, 0));
        w_hat[i * d + j] -= eps_prime * sgn;
      }
    }
  } else {
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = i; j < d; ++j) {
        w_hat[i * d + j] += rng.uniform() < 0.5 ? -eps_prime : eps_prime;
      }
    }
  }
  std::vector<double> z_hat = s.z;
  for (double& v : z_hat) v += rng.uniform() < 0.5 ? -eps_prime : eps_prime;

  Matrix w = mirror_upper(d, w_hat);
  Vector z(std::move(z_hat));
  Vector a = solve_symmetric(w, z);
  return RegressionResult{std::move(a), RegressionMode::kInject, 0.0, eps_prime, std::move(w),
                          std::move(z), std::nullopt,            0};
}

RegressionResult injected_regress(const Dataset& data, const HybridOptions& opts,
                                  InjectionPattern pattern) {
  const double eps_prime = hybrid_eps_prime(opts, data.dim());
  RegressionResult r = injected_regress(data, eps_prime, pattern, opts.seed);
  r.eps_target = opts.eps;
  return r;
}

BoundVerdict verify_error_bound(const Vector& a_hat, const Vector& a_true, double eps_prime,
                                std::size_t d, double kappa, double c) {
  if (a_hat.size() != a_true.size()) {
    throw Error(ErrorCode::kInvalidArgument, "coefficient vectors differ in length");
  }
  const Vector diff = a_hat - a_true;
  BoundVerdict v;
  v.error_2 = euclidean_norm(diff);
  v.error_inf = max_norm(diff);
  v.bound = lemma1_error_bound(d, kappa, c, eps_prime) * (1.0 + kBoundSlack);
  v.margin = v.bound - v.error_2;
  v.pass = v.error_2 < v.bound && v.error_inf <= v.error_2;
  return v;
}

}  // namespace qnewton
