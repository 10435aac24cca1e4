#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "qnewton/numerics.hpp"
#include "qnewton/objective.hpp"
#include "qnewton/qae.hpp"
#include "qnewton/regression.hpp"

namespace qnewton {

struct ConvexityCertificate {
  double mu = 1.0;     // lambda_min(H_F) >= mu everywhere
  double m_lip = 1.0;  // ||H_F(a) - H_F(b)|| <= m_lip ||a - b||
};

void validate(const ConvexityCertificate& cert);

// (2 M / mu) eps at or above this is rejected as numerically fragile.
inline constexpr double kEpsilonConditionLimit = 0.99;

struct NewtonTolerances {
  double eps = 0.0;
  double eps_g = 0.0;  // per-entry gradient tolerance
  double eps_h = 0.0;  // per-entry Hessian tolerance
  double delta_minus = 0.0;
  double delta_plus = 0.0;
  double delta0 = 0.0;
  double delta_tilde0 = 0.0;  // max(delta0, delta_minus)
  std::uint64_t n_it = 1;
};

// delta_pm = (mu / M)(1 +- sqrt(1 - 2 M eps / mu)), the fixed points of
// delta -> (M / 2 mu) delta^2 + eps. Throws EpsilonTooLarge.
std::pair<double, double> delta_pm(double mu, double m_lip, double eps);

// (M / 2 mu) delta^2 + eps.
double error_map(double delta, const ConvexityCertificate& cert, double eps);

// eps_g = mu eps / (2 sqrt d), eps_h = mu eps / (4 delta_tilde0 d),
// n_it = max{ceil(log2(ln(2 M eps / mu) / (2 ln(M delta0 / mu)))) + 1, 1}.
// delta0 is a certified upper bound on ||a0 - a*||; delta0 = 0 gives n_it = 1.
// Throws EpsilonTooLarge when (2 M / mu) eps >= 0.99, InitialPointTooFar when
// delta0 >= mu / M.
NewtonTolerances tolerances(double mu, double m_lip, double eps, std::size_t d, double delta0);

Vector exact_gradient(const SumObjective& obj, const Vector& a);
Matrix exact_hessian(const SumObjective& obj, const Vector& a);

struct GradientEstimate {
  Vector value;
  EngineSummary summary;
};

struct HessianEstimate {
  Matrix value;
  EngineSummary summary;
};

// Settings shared by the entry estimations of one derivative.
struct EstimationContext {
  double gamma = 0.01;
  std::uint64_t n_it = 1;      // per-entry confidence is 1 - gamma / (n_it d^2)
  std::uint64_t seed = 0;      // master seed of the estimation
  std::uint64_t iteration = 0;  // mixed into element streams
};

// Each entry v is mapped to amplitude (v - L) / (U - L), estimated to
// eps / (U - L) and mapped back. One application of A makes one P_c call and
// one P_i (gradient) or P_ij (Hessian) call. Hessian uses the upper triangle
// and mirrors it. Throws BoundViolation if a true entry leaves [L, U].
GradientEstimate qae_gradient(const SumObjective& obj, const Vector& a, double eps_g,
                              const EstimationContext& ctx, const AmplitudeEstimator& engine);
HessianEstimate qae_hessian(const SumObjective& obj, const Vector& a, double eps_h,
                            const EstimationContext& ctx, const AmplitudeEstimator& engine);

// Hoeffding sample count for additive error t at confidence 1 - gamma on
// values in an interval of width `range`: ceil(range^2 ln(2 / gamma) / (2 t^2)).
std::uint64_t cmc_samples_for(double t, double range, double gamma);

enum class CmcSampling {
  kWithReplacement,  // n_samp uniform draws of k for every entry
  kExhaustive,       // every k once; n_samp ignored
};

// Sample mean of term derivatives. Each sample costs one P_c and one P_i (or
// P_ij) call.
GradientEstimate cmc_gradient(const SumObjective& obj, const Vector& a, std::uint64_t n_samp,
                              std::uint64_t seed, CmcSampling mode = CmcSampling::kWithReplacement);
HessianEstimate cmc_hessian(const SumObjective& obj, const Vector& a, std::uint64_t n_samp,
                            std::uint64_t seed, CmcSampling mode = CmcSampling::kWithReplacement);

// a - H_hat^{-1} g_hat. Throws HessianNotPD.
Vector newton_step(const Vector& a, const Vector& g_hat, const Matrix& h_hat);

// || H_hat^{-1} g_hat - H^{-1} g || with exact g, H at a. Throws HessianNotPD.
double update_error(const SumObjective& obj, const Vector& a, const Vector& g_hat,
                    const Matrix& h_hat);

struct NewtonOptions {
  double eps = 0.01;
  double gamma = 0.01;
  double delta0 = 0.0;  // certified bound on ||a0 - a*||
  std::uint64_t seed = 0;
  std::optional<Vector> a_star;  // enables delta tracking
  std::uint64_t extra_iterations = 0;  // steps beyond n_it, for trap checks
};

struct IterationTrace {
  NewtonTolerances tol;
  std::vector<Vector> iterates;             // a_0 .. a_n
  std::vector<double> deltas;               // ||a_n - a*||, empty without a*
  std::vector<double> update_error_norms;   // ||Delta_F(a_n)||, one per step
  std::vector<QueryTally> step_queries;     // per step
  std::vector<QueryTally> cumulative_queries;
  std::uint64_t grad_samples = 0;  // CMC only: samples per gradient entry
  std::uint64_t hess_samples = 0;  // CMC only: samples per Hessian entry
  const QueryTally& total_queries() const;
};

// Exactly n_it (+ extra_iterations) updates with qae_gradient / qae_hessian at
// (eps_g, eps_h).
IterationTrace run_qae_newton(const SumObjective& obj, const ConvexityCertificate& cert,
                              const Vector& a0, const NewtonOptions& opts,
                              const AmplitudeEstimator& engine);

// Same schedule with derivatives from cmc_gradient / cmc_hessian, sample
// counts from cmc_samples_for at the same per-entry tolerance and confidence.
IterationTrace run_cmc_newton(const SumObjective& obj, const ConvexityCertificate& cert,
                              const Vector& a0, const NewtonOptions& opts);

struct StepVerdict {
  std::size_t step = 0;
  double delta = 0.0;
  double delta_next = 0.0;
  double update_error = 0.0;
  bool applicable = false;        // update_error <= eps
  double bound = 0.0;             // error_map(delta)
  bool inequality_holds = true;   // delta_next <= bound
  bool region_holds = true;       // contraction inside (delta_-, delta_+), capture below delta_-
};

struct Lemma2Verdict {
  std::vector<StepVerdict> steps;
  bool per_step_holds = true;
  bool trap_holds = true;  // once delta <= 2 eps it stays there
  bool terminal_holds = true;  // delta after n_it steps <= 2 eps
  bool pass() const { return per_step_holds && trap_holds && terminal_holds; }
};

// Comparisons allow an absolute 1e-12 for rounding.
Lemma2Verdict lemma2_check(const IterationTrace& trace, const ConvexityCertificate& cert,
                           double eps);

struct CertificateCheck {
  double min_eigenvalue = 0.0;   // over probes
  double max_lipschitz_ratio = 0.0;
  bool mu_holds = false;
  bool lipschitz_holds = false;
};

// lambda_min(H_F) >= mu at n_probes random points, and the Hessian Lipschitz
// ratio <= m_lip on n_probes random pairs, all within `radius` of centre.
CertificateCheck spot_check_certificate(const SumObjective& obj, const ConvexityCertificate& cert,
                                        const Vector& centre, double radius,
                                        std::size_t n_probes, std::uint64_t seed);

// Damped exact Newton to ||gradient|| <= tol. Test oracle for a*.
Vector exact_minimizer(const SumObjective& obj, const Vector& a0, double tol = 1e-13,
                       std::size_t max_iterations = 200);

}  // namespace qnewton
