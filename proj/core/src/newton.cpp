#include "qnewton/newton.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qnewton/error.hpp"
#include "qnewton/rng.hpp"

namespace qnewton {

namespace {

constexpr double kRoundingAllowance = 1e-12;
constexpr std::uint64_t kStreamGrad = 11;
constexpr std::uint64_t kStreamHess = 12;

// Upper bound on target error accepted by the grid sizing.
constexpr double kMaxAmplitudeTolerance = 0.5;

void require_eps(double eps) {
  if (!(eps > 0.0)) throw Error(ErrorCode::kInvalidArgument, "eps must be positive");
}

double checked_amplitude(double v, ScaleBounds b) {
  const double width = b.upper - b.lower;
  const double slack = kRoundingAllowance * std::max(1.0, width);
  if (v < b.lower - slack || v > b.upper + slack) {
    throw Error(ErrorCode::kBoundViolation,
                "derivative value " + std::to_string(v) + " outside [" + std::to_string(b.lower) +
                    ", " + std::to_string(b.upper) + "]");
  }
  return std::clamp((v - b.lower) / width, 0.0, 1.0);
}

double per_entry_confidence(const EstimationContext& ctx, std::size_t d) {
  if (!(ctx.gamma > 0.0 && ctx.gamma < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "gamma must lie in (0, 1)");
  }
  const double dd = static_cast<double>(d);
  return 1.0 - ctx.gamma / (static_cast<double>(std::max<std::uint64_t>(1, ctx.n_it)) * dd * dd);
}

// Estimates one derivative entry whose classical value is `truth`.
double estimate_entry(double truth, ScaleBounds b, double eps, const std::string& oracle,
                      double confidence, std::uint64_t stream, const AmplitudeEstimator& engine,
                      EngineSummary& summary) {
  const double width = b.upper - b.lower;
  AmplitudeOracle amp{checked_amplitude(truth, b), {{"P_c", 1}, {oracle, 1}}};
  const double target = std::min(eps / width, kMaxAmplitudeTolerance);
  EstimatorReport rep = engine.estimate(amp, target, confidence, stream);
  merge_queries(summary.queries, rep.queries);
  summary.grid_size = rep.grid_size;
  summary.repeats = rep.repeats;
  summary.per_estimate_confidence = confidence;
  ++summary.n_estimates;
  return b.lower + width * rep.estimate;
}

Matrix mirror(std::size_t d, std::vector<double> upper) {
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < i; ++j) upper[i * d + j] = upper[j * d + i];
  }
  return Matrix(d, d, std::move(upper));
}

QueryTally add(QueryTally a, const QueryTally& b) {
  merge_queries(a, b);
  return a;
}

}  // namespace

void validate(const ConvexityCertificate& cert) {
  if (!(cert.mu > 0.0) || !(cert.m_lip > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "mu and M must be positive");
  }
}

std::pair<double, double> delta_pm(double mu, double m_lip, double eps) {
  validate(ConvexityCertificate{mu, m_lip});
  require_eps(eps);
  const double q = 2.0 * m_lip * eps / mu;
  if (q >= kEpsilonConditionLimit) {
    throw Error(ErrorCode::kEpsilonTooLarge,
                "(2M/mu) eps = " + std::to_string(q) + " must be below 0.99");
  }
  const double root = std::sqrt(1.0 - q);
  const double scale = mu / m_lip;
  // delta_- = scale (1 - root) written without cancellation.
  return {scale * q / (1.0 + root), scale * (1.0 + root)};
}

double error_map(double delta, const ConvexityCertificate& cert, double eps) {
  return cert.m_lip / (2.0 * cert.mu) * delta * delta + eps;
}

NewtonTolerances tolerances(double mu, double m_lip, double eps, std::size_t d, double delta0) {
  if (d == 0) throw Error(ErrorCode::kInvalidArgument, "dimension must be >= 1");
  if (!(delta0 >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "delta0 must be >= 0");
  const auto [dm, dp] = delta_pm(mu, m_lip, eps);
  if (delta0 >= mu / m_lip) {
    throw Error(ErrorCode::kInitialPointTooFar,
                "delta0 = " + std::to_string(delta0) + " must be below mu/M = " +
                    std::to_string(mu / m_lip));
  }
  NewtonTolerances t;
  t.eps = eps;
  t.delta_minus = dm;
  t.delta_plus = dp;
  t.delta0 = delta0;
  t.delta_tilde0 = std::max(delta0, dm);
  const double dd = static_cast<double>(d);
  t.eps_g = mu * eps / (2.0 * std::sqrt(dd));
  t.eps_h = mu * eps / (4.0 * t.delta_tilde0 * dd);
  if (delta0 == 0.0) {
    t.n_it = 1;
  } else {
    const double ratio = std::log(2.0 * m_lip * eps / mu) / (2.0 * std::log(m_lip * delta0 / mu));
    const double n = std::ceil(std::log2(ratio)) + 1.0;
    t.n_it = n < 1.0 ? 1 : static_cast<std::uint64_t>(n);
  }
  return t;
}

Vector exact_gradient(const SumObjective& obj, const Vector& a) {
  const std::size_t d = obj.dim();
  std::vector<double> g(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t k = 0; k < obj.n_terms(); ++k) g[i] += obj.term_grad(a, k, i);
    g[i] /= static_cast<double>(obj.n_terms());
  }
  return Vector(std::move(g));
}

Matrix exact_hessian(const SumObjective& obj, const Vector& a) {
  const std::size_t d = obj.dim();
  std::vector<double> h(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < obj.n_terms(); ++k) acc += obj.term_hess(a, k, i, j);
      h[i * d + j] = acc / static_cast<double>(obj.n_terms());
    }
  }
  return mirror(d, std::move(h));
}

GradientEstimate qae_gradient(const SumObjective& obj, const Vector& a, double eps_g,
                              const EstimationContext& ctx, const AmplitudeEstimator& engine) {
  require_eps(eps_g);
  const std::size_t d = obj.dim();
  const double confidence = per_entry_confidence(ctx, d);
  const Vector truth = exact_gradient(obj, a);
  EngineSummary summary;
  std::vector<double> g(d);
  for (std::size_t i = 0; i < d; ++i) {
    g[i] = estimate_entry(truth[i], obj.bounds().gradient, eps_g, "P_i", confidence,
                          derive_stream(ctx.seed, kStreamGrad, ctx.iteration, i), engine,
                          summary);
  }
  return GradientEstimate{Vector(std::move(g)), std::move(summary)};
}

HessianEstimate qae_hessian(const SumObjective& obj, const Vector& a, double eps_h,
                            const EstimationContext& ctx, const AmplitudeEstimator& engine) {
  require_eps(eps_h);
  const std::size_t d = obj.dim();
  const double confidence = per_entry_confidence(ctx, d);
  const Matrix truth = exact_hessian(obj, a);
  EngineSummary summary;
  std::vector<double> h(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      h[i * d + j] = estimate_entry(truth(i, j), obj.bounds().hessian, eps_h, "P_ij", confidence,
                                    derive_stream(ctx.seed, kStreamHess, ctx.iteration, i, j),
                                    engine, summary);
    }
  }
  return HessianEstimate{mirror(d, std::move(h)), std::move(summary)};
}

std::uint64_t cmc_samples_for(double t, double range, double gamma) {
  if (!(t > 0.0) || !(range > 0.0) || !(gamma > 0.0 && gamma < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "need t > 0, range > 0, 0 < gamma < 1");
  }
  const double n = std::ceil(range * range * std::log(2.0 / gamma) / (2.0 * t * t));
  if (n > 1e18) throw Error(ErrorCode::kOverflow, "CMC sample count exceeds 1e18");
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(n));
}

namespace {

template <typename TermFn>
double cmc_mean(const SumObjective& obj, std::uint64_t n_samp, CmcSampling mode,
                CounterRng& rng, TermFn term, std::uint64_t& samples_used) {
  double acc = 0.0;
  if (mode == CmcSampling::kExhaustive) {
    for (std::size_t k = 0; k < obj.n_terms(); ++k) acc += term(k);
    samples_used = obj.n_terms();
    return acc / static_cast<double>(obj.n_terms());
  }
  for (std::uint64_t s = 0; s < n_samp; ++s) acc += term(rng.uniform_index(obj.n_terms()));
  samples_used = n_samp;
  return acc / static_cast<double>(n_samp);
}

void require_samples(std::uint64_t n_samp, CmcSampling mode) {
  if (mode == CmcSampling::kWithReplacement && n_samp == 0) {
    throw Error(ErrorCode::kInvalidArgument, "n_samp must be >= 1");
  }
}

}  // namespace

GradientEstimate cmc_gradient(const SumObjective& obj, const Vector& a, std::uint64_t n_samp,
                              std::uint64_t seed, CmcSampling mode) {
  require_samples(n_samp, mode);
  const std::size_t d = obj.dim();
  EngineSummary summary;
  std::vector<double> g(d);
  for (std::size_t i = 0; i < d; ++i) {
    CounterRng rng(derive_stream(seed, kStreamGrad, i));
    std::uint64_t used = 0;
    g[i] = cmc_mean(obj, n_samp, mode, rng,
                    [&](std::size_t k) { return obj.term_grad(a, k, i); }, used);
    summary.queries["P_c"] += used;
    summary.queries["P_i"] += used;
    ++summary.n_estimates;
  }
  return GradientEstimate{Vector(std::move(g)), std::move(summary)};
}

HessianEstimate cmc_hessian(const SumObjective& obj, const Vector& a, std::uint64_t n_samp,
                            std::uint64_t seed, CmcSampling mode) {
  require_samples(n_samp, mode);
  const std::size_t d = obj.dim();
  EngineSummary summary;
  std::vector<double> h(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      CounterRng rng(derive_stream(seed, kStreamHess, i, j));
      std::uint64_t used = 0;
      h[i * d + j] = cmc_mean(obj, n_samp, mode, rng,
                              [&](std::size_t k) { return obj.term_hess(a, k, i, j); }, used);
      summary.queries["P_c"] += used;
      summary.queries["P_ij"] += used;
      ++summary.n_estimates;
    }
  }
  return HessianEstimate{mirror(d, std::move(h)), std::move(summary)};
}

Vector newton_step(const Vector& a, const Vector& g_hat, const Matrix& h_hat) {
  if (!is_positive_definite(h_hat)) {
    throw Error(ErrorCode::kHessianNotPD, "estimated Hessian is not positive definite");
  }
  return a - solve_symmetric(h_hat, g_hat);
}

double update_error(const SumObjective& obj, const Vector& a, const Vector& g_hat,
                    const Matrix& h_hat) {
  const Matrix h = exact_hessian(obj, a);
  if (!is_positive_definite(h_hat) || !is_positive_definite(h)) {
    throw Error(ErrorCode::kHessianNotPD, "update error needs positive definite Hessians");
  }
  const Vector g = exact_gradient(obj, a);
  return euclidean_norm(solve_symmetric(h_hat, g_hat) - solve_symmetric(h, g));
}

const QueryTally& IterationTrace::total_queries() const {
  static const QueryTally kEmpty;
  return cumulative_queries.empty() ? kEmpty : cumulative_queries.back();
}

namespace {

template <typename StepFn>
IterationTrace run_schedule(const SumObjective& obj, const ConvexityCertificate& cert,
                            const Vector& a0, const NewtonOptions& opts, StepFn estimate) {
  validate(cert);
  if (a0.size() != obj.dim()) throw Error(ErrorCode::kInvalidArgument, "a0 has wrong dimension");
  IterationTrace trace;
  trace.tol = tolerances(cert.mu, cert.m_lip, opts.eps, obj.dim(), opts.delta0);
  trace.iterates.push_back(a0);
  if (opts.a_star) trace.deltas.push_back(euclidean_norm(a0 - *opts.a_star));

  const std::uint64_t steps = trace.tol.n_it + opts.extra_iterations;
  QueryTally total;
  for (std::uint64_t n = 0; n < steps; ++n) {
    const Vector& a = trace.iterates.back();
    auto [g_hat, h_hat, queries] = estimate(a, trace.tol, n, trace);
    trace.update_error_norms.push_back(update_error(obj, a, g_hat, h_hat));
    Vector next = newton_step(a, g_hat, h_hat);
    total = add(std::move(total), queries);
    trace.step_queries.push_back(std::move(queries));
    trace.cumulative_queries.push_back(total);
    if (opts.a_star) trace.deltas.push_back(euclidean_norm(next - *opts.a_star));
    trace.iterates.push_back(std::move(next));
  }
  return trace;
}

struct StepEstimate {
  Vector g;
  Matrix h;
  QueryTally queries;
};

}  // namespace

IterationTrace run_qae_newton(const SumObjective& obj, const ConvexityCertificate& cert,
                              const Vector& a0, const NewtonOptions& opts,
                              const AmplitudeEstimator& engine) {
  return run_schedule(obj, cert, a0, opts,
                      [&](const Vector& a, const NewtonTolerances& tol, std::uint64_t n,
                          IterationTrace&) {
                        const EstimationContext ctx{opts.gamma, tol.n_it, opts.seed, n};
                        GradientEstimate g = qae_gradient(obj, a, tol.eps_g, ctx, engine);
                        HessianEstimate h = qae_hessian(obj, a, tol.eps_h, ctx, engine);
                        return StepEstimate{std::move(g.value), std::move(h.value),
                                            add(g.summary.queries, h.summary.queries)};
                      });
}

IterationTrace run_cmc_newton(const SumObjective& obj, const ConvexityCertificate& cert,
                              const Vector& a0, const NewtonOptions& opts) {
  return run_schedule(
      obj, cert, a0, opts,
      [&](const Vector& a, const NewtonTolerances& tol, std::uint64_t n, IterationTrace& trace) {
        const double dd = static_cast<double>(obj.dim());
        const double gamma_entry = opts.gamma / (static_cast<double>(tol.n_it) * dd * dd);
        const DerivativeBounds& b = obj.bounds();
        trace.grad_samples =
            cmc_samples_for(tol.eps_g, b.gradient.upper - b.gradient.lower, gamma_entry);
        trace.hess_samples =
            cmc_samples_for(tol.eps_h, b.hessian.upper - b.hessian.lower, gamma_entry);
        GradientEstimate g =
            cmc_gradient(obj, a, trace.grad_samples, derive_stream(opts.seed, kStreamGrad, n));
        HessianEstimate h =
            cmc_hessian(obj, a, trace.hess_samples, derive_stream(opts.seed, kStreamHess, n));
        return StepEstimate{std::move(g.value), std::move(h.value),
                            add(g.summary.queries, h.summary.queries)};
      });
}

Lemma2Verdict lemma2_check(const IterationTrace& trace, const ConvexityCertificate& cert,
                           double eps) {
  Lemma2Verdict v;
  if (trace.deltas.size() != trace.iterates.size()) {
    throw Error(ErrorCode::kInvalidArgument, "lemma2_check needs a trace with known a*");
  }
  const auto [dm, dp] = delta_pm(cert.mu, cert.m_lip, eps);
  const double tol = kRoundingAllowance;
  bool trapped = false;
  for (std::size_t n = 0; n + 1 < trace.deltas.size(); ++n) {
    StepVerdict s;
    s.step = n;
    s.delta = trace.deltas[n];
    s.delta_next = trace.deltas[n + 1];
    s.update_error = trace.update_error_norms[n];
    s.applicable = s.update_error <= eps;
    s.bound = error_map(s.delta, cert, eps);
    if (s.applicable) {
      s.inequality_holds = s.delta_next <= s.bound + tol;
      if (s.delta <= dm) {
        s.region_holds = s.delta_next <= dm + tol;
      } else if (s.delta < dp) {
        s.region_holds = s.delta_next < s.delta + tol;
      }
    }
    v.per_step_holds = v.per_step_holds && s.inequality_holds && s.region_holds;
    if (trapped && s.delta > 2.0 * eps + tol) v.trap_holds = false;
    if (s.delta <= 2.0 * eps) trapped = true;
    v.steps.push_back(s);
  }
  if (trapped && trace.deltas.back() > 2.0 * eps + tol) v.trap_holds = false;
  const std::size_t terminal = std::min<std::size_t>(trace.tol.n_it, trace.deltas.size() - 1);
  for (std::size_t n = terminal; n < trace.deltas.size(); ++n) {
    if (trace.deltas[n] > 2.0 * eps + tol) v.terminal_holds = false;
  }
  return v;
}

CertificateCheck spot_check_certificate(const SumObjective& obj, const ConvexityCertificate& cert,
                                        const Vector& centre, double radius,
                                        std::size_t n_probes, std::uint64_t seed) {
  const std::size_t d = obj.dim();
  CounterRng rng(seed);
  auto probe = [&] {
    std::vector<double> p(d);
    for (std::size_t i = 0; i < d; ++i) p[i] = centre[i] + radius * (2.0 * rng.uniform() - 1.0);
    return Vector(std::move(p));
  };
  CertificateCheck out;
  out.min_eigenvalue = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < n_probes; ++s) {
    out.min_eigenvalue = std::min(out.min_eigenvalue, min_eigenvalue_symmetric(exact_hessian(obj, probe())));
  }
  for (std::size_t s = 0; s < n_probes; ++s) {
    const Vector p = probe();
    const Vector q = probe();
    const double dist = euclidean_norm(p - q);
    if (dist == 0.0) continue;
    const double ratio = spectral_norm(exact_hessian(obj, p) - exact_hessian(obj, q)) / dist;
    out.max_lipschitz_ratio = std::max(out.max_lipschitz_ratio, ratio);
  }
  out.mu_holds = out.min_eigenvalue >= cert.mu - kRoundingAllowance;
  out.lipschitz_holds = out.max_lipschitz_ratio <= cert.m_lip + kRoundingAllowance;
  return out;
}

Vector exact_minimizer(const SumObjective& obj, const Vector& a0, double tol,
                       std::size_t max_iterations) {
  Vector a = a0;
  for (std::size_t it = 0; it < max_iterations; ++it) {
    const Vector g = exact_gradient(obj, a);
    if (euclidean_norm(g) <= tol) return a;
    const Vector step = solve_symmetric(exact_hessian(obj, a), g);
    const double f0 = objective_value(obj, a);
    double t = 1.0;
    Vector next = a - step;
    while (objective_value(obj, next) > f0 && t > 1e-8) {
      t *= 0.5;
      next = a - t * step;
    }
    if (euclidean_norm(next - a) == 0.0) return a;
    a = next;
  }
  return a;
}

}  // namespace qnewton
