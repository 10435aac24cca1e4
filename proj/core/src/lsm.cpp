#include "qnewton/lsm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qnewton/error.hpp"
#include "qnewton/rng.hpp"

namespace qnewton {

void validate(const LsmSpec& spec) {
  if (spec.n_paths == 0 || spec.n_steps < 2) {
    throw Error(ErrorCode::kInvalidArgument, "need n_paths >= 1 and n_steps >= 2");
  }
  if (!(spec.spot > 0.0) || !(spec.strike > 0.0) || !(spec.maturity > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "spot, strike and maturity must be positive");
  }
  if (!(spec.volatility >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "volatility must be >= 0");
  if (spec.basis_degree < 1 || spec.basis_degree > 4) {
    throw Error(ErrorCode::kInvalidArgument, "basis degree must lie in [1, 4]");
  }
}

std::string_view status_name(LsmDateStatus s) {
  switch (s) {
    case LsmDateStatus::kOk: return "ok";
    case LsmDateStatus::kNoItmPaths: return "no_itm_paths";
    case LsmDateStatus::kRankDeficient: return "rank_deficient";
  }
  return "ok";
}

namespace {

// Relative price spread below which the basis columns are indistinguishable.
constexpr double kMinPriceSpread = 1e-9;

std::vector<double> basis_row(double u, int degree) {
  std::vector<double> row(static_cast<std::size_t>(degree) + 1);
  double p = 1.0;
  for (double& v : row) {
    v = p;
    p *= u;
  }
  return row;
}

}  // namespace

LsmData generate_lsm(const LsmSpec& spec) {
  validate(spec);
  const std::size_t n_paths = spec.n_paths;
  const std::size_t n_steps = spec.n_steps;
  const double dt = spec.maturity / static_cast<double>(n_steps);
  const double drift = (spec.rate - 0.5 * spec.volatility * spec.volatility) * dt;
  const double vol = spec.volatility * std::sqrt(dt);

  // prices[p * (n_steps + 1) + n]
  std::vector<double> prices(n_paths * (n_steps + 1));
  for (std::size_t p = 0; p < n_paths; ++p) {
    CounterRng rng(derive_stream(spec.seed, p));
    double s = spec.spot;
    prices[p * (n_steps + 1)] = s;
    for (std::size_t n = 1; n <= n_steps; ++n) {
      s *= std::exp(drift + vol * rng.normal());
      prices[p * (n_steps + 1) + n] = s;
    }
  }

  std::vector<double> cashflow(n_paths);
  std::vector<std::size_t> exercise_step(n_paths, n_steps);
  for (std::size_t p = 0; p < n_paths; ++p) {
    cashflow[p] = std::max(spec.strike - prices[p * (n_steps + 1) + n_steps], 0.0);
  }

  LsmData out;
  const int degree = spec.basis_degree;
  const std::size_t width = static_cast<std::size_t>(degree) + 1;
  for (std::size_t n = n_steps - 1; n >= 1; --n) {
    LsmDate date;
    date.step = n;
    date.time = static_cast<double>(n) * dt;

    std::vector<std::size_t> itm;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t p = 0; p < n_paths; ++p) {
      const double s = prices[p * (n_steps + 1) + n];
      if (spec.strike - s > 0.0) {
        itm.push_back(p);
        lo = std::min(lo, s);
        hi = std::max(hi, s);
      }
    }
    date.n_itm = itm.size();
    if (itm.empty()) {
      date.status = LsmDateStatus::kNoItmPaths;
      out.dates.push_back(std::move(date));
      continue;
    }
    date.price_bounds = ScaleBounds{lo, hi};
    if (itm.size() < width || hi - lo <= kMinPriceSpread * spec.strike) {
      date.status = LsmDateStatus::kRankDeficient;
      out.dates.push_back(std::move(date));
      continue;
    }

    std::vector<double> x;
    x.reserve(itm.size() * width);
    std::vector<double> y;
    y.reserve(itm.size());
    for (std::size_t p : itm) {
      const double u = (prices[p * (n_steps + 1) + n] - lo) / (hi - lo);
      const auto row = basis_row(u, degree);
      x.insert(x.end(), row.begin(), row.end());
      const double disc =
          std::exp(-spec.rate * static_cast<double>(exercise_step[p] - n) * dt) * cashflow[p];
      y.push_back(std::clamp(disc / spec.strike, 0.0, 1.0));
    }
    Dataset data(Matrix(itm.size(), width, std::move(x)), Vector(std::move(y)));
    RegressionResult fit = [&]() -> RegressionResult {
      try {
        (void)condition_number(data.x());
        return naive_regress(data);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kRankDeficient && e.code() != ErrorCode::kSingularSystem) throw;
        date.status = LsmDateStatus::kRankDeficient;
        return RegressionResult{Vector{0.0}, RegressionMode::kExact, 0.0, 0.0,
                                Matrix{{0.0}}, Vector{0.0}, std::nullopt, 0};
      }
    }();
    if (date.status == LsmDateStatus::kRankDeficient) {
      out.dates.push_back(std::move(date));
      continue;
    }

    // Exercise where the payoff beats the fitted continuation value.
    for (std::size_t r = 0; r < itm.size(); ++r) {
      const std::size_t p = itm[r];
      const double s = prices[p * (n_steps + 1) + n];
      double cont = 0.0;
      for (std::size_t j = 0; j < width; ++j) cont += data.feature(r, j) * fit.coefficients[j];
      cont *= spec.strike;
      const double payoff = spec.strike - s;
      if (payoff > cont) {
        cashflow[p] = payoff;
        exercise_step[p] = n;
      }
    }
    date.classical_coefficients = fit.coefficients;
    date.data = std::move(data);
    out.dates.push_back(std::move(date));
  }

  double value = 0.0;
  for (std::size_t p = 0; p < n_paths; ++p) {
    value += std::exp(-spec.rate * static_cast<double>(exercise_step[p]) * dt) * cashflow[p];
  }
  value /= static_cast<double>(n_paths);
  out.price = std::max(value, spec.strike - spec.spot);
  return out;
}

bool LsmDemoResult::all_within_eps() const {
  return std::all_of(dates.begin(), dates.end(), [](const LsmComparison& c) {
    return c.status != LsmDateStatus::kOk || c.within_eps;
  });
}

LsmDemoResult run_lsm_demo(const LsmSpec& spec, double eps, double gamma, std::uint64_t seed,
                           const AmplitudeEstimator& engine) {
  LsmData lsm = generate_lsm(spec);
  LsmDemoResult out;
  out.spec = spec;
  out.eps = eps;
  out.gamma = gamma;
  out.price = lsm.price;
  for (const LsmDate& date : lsm.dates) {
    LsmComparison cmp;
    cmp.step = date.step;
    cmp.status = date.status;
    cmp.n_itm = date.n_itm;
    if (date.status == LsmDateStatus::kOk) {
      const NormalEquations ne = compute_normal_equations_exact(*date.data);
      cmp.kappa = ne.kappa;
      cmp.c = std::min(ne.c, 1.0);
      const HybridOptions opts{eps, ne.kappa, cmp.c, gamma, derive_stream(seed, date.step)};
      RegressionResult hybrid = hybrid_regress(*date.data, opts, engine);
      cmp.eps_prime = hybrid.eps_prime_used;
      cmp.classical = date.classical_coefficients;
      cmp.gap_inf = max_norm(hybrid.coefficients - *date.classical_coefficients);
      cmp.within_eps = cmp.gap_inf <= eps;
      cmp.queries = hybrid.report->queries;
      cmp.hybrid = std::move(hybrid.coefficients);
    }
    out.dates.push_back(std::move(cmp));
  }
  return out;
}

}  // namespace qnewton
