#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "expect_error.hpp"
#include "oracles.hpp"
#include "qnewton/dataset.hpp"
#include "qnewton/qae.hpp"
#include "qnewton/regression.hpp"
#include "qnewton/rng.hpp"
#include "qnewton/synthetic.hpp"

namespace {

using namespace qnewton;
namespace qt = qnewton::testing;

Dataset four_point() {
  return Dataset(Matrix{{0.25, 1.0}, {0.5, 0.75}, {0.75, 0.5}, {1.0, 0.25}},
                 Vector{0, 0.5, 0.5, 1});
}

Dataset random_dataset(CounterRng& rng, std::size_t n, std::size_t d) {
  std::vector<double> x(n * d);
  for (double& v : x) v = rng.uniform();
  std::vector<double> y(n);
  for (double& v : y) v = rng.uniform();
  return Dataset(Matrix(n, d, x), Vector(y));
}

TEST(DatasetType, ValidatesRangeAndShape) {
  EXPECT_QN_ERROR(Dataset(Matrix{{1.5}}, Vector{0.5}), ErrorCode::kInvalidArgument);
  EXPECT_QN_ERROR(Dataset(Matrix{{0.5}}, Vector{-0.1}), ErrorCode::kInvalidArgument);
  EXPECT_QN_ERROR(Dataset(Matrix{{0.5}, {0.5}}, Vector{0.5}), ErrorCode::kInvalidArgument);
}

TEST(Rescale, Examples) {
  const ScaleBounds b{-1, 1};
  const Dataset d = rescale(Matrix{{-1}, {0}, {1}}, Vector{-1, 0, 1}, std::vector{b}, b);
  EXPECT_DOUBLE_EQ(d.feature(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(d.feature(1, 0), 0.5);
  EXPECT_DOUBLE_EQ(d.feature(2, 0), 1.0);
  EXPECT_DOUBLE_EQ(rescale_value(5.0, ScaleBounds{0, 1}), 1.0);
  EXPECT_DOUBLE_EQ(rescale_value(-5.0, ScaleBounds{0, 1}), 0.0);
  EXPECT_QN_ERROR(rescale_value(0.0, ScaleBounds{0, 0}), ErrorCode::kDegenerateBounds);
  EXPECT_QN_ERROR(rescale(Matrix{{1}}, Vector{1}, std::vector{ScaleBounds{0, 0}}, ScaleBounds{}),
                  ErrorCode::kDegenerateBounds);
  EXPECT_QN_ERROR(rescale(Matrix{{1}}, Vector{1}, std::vector{ScaleBounds{0, 2}}, ScaleBounds{3, 1}),
                  ErrorCode::kDegenerateBounds);
}

TEST(Rescale, BoundsCountMustMatchColumns) {
  EXPECT_QN_ERROR(rescale(Matrix{{1, 2}}, Vector{1}, std::vector{ScaleBounds{0, 2}}, ScaleBounds{}),
                  ErrorCode::kInvalidArgument);
}

TEST(NormalEquations, IdentityExample) {
  const NormalEquations ne = compute_normal_equations_exact(Dataset(Matrix{{1, 0}, {0, 1}}, Vector{1, 1}));
  EXPECT_EQ(ne.w, Matrix::diagonal({0.5, 0.5}));
  EXPECT_EQ(ne.z, (Vector{0.5, 0.5}));
  EXPECT_NEAR(ne.c, 0.5 - kDiagonalFloorMargin, 1e-16);
  EXPECT_NEAR(ne.kappa, 1.0, 1e-14);
}

TEST(NormalEquations, ZeroColumnIsRankDeficient) {
  try {
    compute_normal_equations_exact(Dataset(Matrix{{0, 1}, {0, 0.5}}, Vector{1, 1}));
    FAIL() << "expected RankDeficient";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kRankDeficient);
    EXPECT_NE(std::string(e.what()).find("diagonal"), std::string::npos) << e.what();
  }
}

TEST(NormalEquations, CollinearColumnsAreRankDeficient) {
  EXPECT_QN_ERROR(compute_normal_equations_exact(
                      Dataset(Matrix{{0.2, 0.4}, {0.3, 0.6}, {0.1, 0.2}}, Vector{1, 1, 1})),
                  ErrorCode::kRankDeficient);
}

TEST(NormalEquations, FourPointExample) {
  const NormalEquations ne = compute_normal_equations_exact(four_point());
  EXPECT_DOUBLE_EQ(ne.w(0, 0), 0.46875);
  EXPECT_DOUBLE_EQ(ne.w(0, 1), 0.3125);
  EXPECT_DOUBLE_EQ(ne.w(1, 0), 0.3125);
  EXPECT_DOUBLE_EQ(ne.z[0], 0.40625);
}

TEST(NormalEquations, MatchBruteForceSums) {
  CounterRng rng(derive_stream(4, 1));
  for (int t = 0; t < 100; ++t) {
    const std::size_t d = 1 + rng.uniform_index(5);
    const Dataset data = random_dataset(rng, d + 3 + rng.uniform_index(20), d);
    const NormalEquations ne = compute_normal_equations_exact(data);
    EXPECT_TRUE(ne.w.is_symmetric());
    for (std::size_t i = 0; i < d; ++i) {
      EXPECT_NEAR(ne.z[i], qt::brute_z(data, i), 1e-15);
      for (std::size_t j = 0; j < d; ++j) EXPECT_NEAR(ne.w(i, j), qt::brute_w(data, i, j), 1e-15);
      EXPECT_GT(ne.w(i, i), ne.c);
      EXPECT_LE(ne.w(i, i), 1.0);
    }
    EXPECT_NEAR(ne.kappa, condition_number(data.x()), 1e-12 * ne.kappa);
  }
}

TEST(NaiveRegress, Examples) {
  const RegressionResult r = naive_regress(Dataset(Matrix{{1, 0}, {0, 1}}, Vector{1, 1}));
  EXPECT_NEAR(r.coefficients[0], 1.0, 1e-15);
  EXPECT_NEAR(r.coefficients[1], 1.0, 1e-15);
  EXPECT_EQ(r.mode, RegressionMode::kExact);
  EXPECT_FALSE(r.report.has_value());

  const Matrix x{{0.2, 0.1}, {0.5, 0.9}, {1.0, 0.3}, {0.7, 0.7}};
  const Vector y = x * Vector{0.3, 0.4};
  const RegressionResult c = naive_regress(Dataset(x, y));
  EXPECT_NEAR(c.coefficients[0], 0.3, 1e-10);
  EXPECT_NEAR(c.coefficients[1], 0.4, 1e-10);
}

TEST(NaiveRegress, FourPointMatchesRowReduction) {
  const RegressionResult r = naive_regress(four_point());
  const NormalEquations ne = compute_normal_equations_exact(four_point());
  const auto ref = qt::gauss_jordan_solve(qt::to_rows(ne.w), ne.z.to_std());
  EXPECT_NEAR(r.coefficients[0], ref[0], 1e-12);
  EXPECT_NEAR(r.coefficients[1], ref[1], 1e-12);
  // d(d+1)/2 + d sums of N_D products each.
  EXPECT_EQ(r.classical_ops, (3u + 2u) * 4u);
}

TEST(EntryTolerance, Examples) {
  EXPECT_NEAR(lemma1_tolerance(2, 1, 0.5, 0.01), 4.4194e-4, 1e-4 * 4.4194e-4);
  EXPECT_DOUBLE_EQ(lemma1_tolerance(1, 1, 1, 2), 1.0);
  EXPECT_NEAR(lemma1_tolerance(4, 2, 0.5, 0.1), 9.7656e-5, 1e-4 * 9.7656e-5);
}

TEST(EntryTolerance, ClosedForm) {
  CounterRng rng(derive_stream(4, 2));
  for (int t = 0; t < 200; ++t) {
    const std::size_t d = 1 + rng.uniform_index(10);
    const double k = 1 + 20 * rng.uniform();
    const double c = 0.01 + 0.99 * rng.uniform();
    const double e = std::pow(10.0, -4.0 * rng.uniform());
    const double dd = static_cast<double>(d);
    const double want = std::min(c / (dd * k * k), c * c * e / (2 * std::pow(dd, 1.5) * std::pow(k, 4)));
    EXPECT_NEAR(lemma1_tolerance(d, k, c, e), want, 1e-15 * want);
    // The error bound at the lemma1 tolerance never exceeds eps.
    EXPECT_LE(lemma1_error_bound(d, k, c, lemma1_tolerance(d, k, c, e)), e * (1 + 1e-12));
  }
}

TEST(HybridEpsPrime, CapOnlyBindsForLargeEps) {
  const HybridOptions small{0.01, 2.0, 0.5, 0.01, 0};
  EXPECT_DOUBLE_EQ(hybrid_eps_prime(small, 3), lemma1_tolerance(3, 2.0, 0.5, 0.01));
  const HybridOptions large{10.0, 1.0, 1.0, 0.01, 0};
  EXPECT_DOUBLE_EQ(hybrid_eps_prime(large, 1), invertibility_cap(1, 1.0, 1.0));
  EXPECT_DOUBLE_EQ(invertibility_cap(2, 2.0, 0.5), 0.5 / (21.0 * 2 * 4));
}

TEST(HybridOptionsValidation, RejectsBadInputs) {
  EXPECT_QN_ERROR(validate(HybridOptions{0.0, 1, 0.5, 0.01, 0}, 2), ErrorCode::kInvalidArgument);
  EXPECT_QN_ERROR(validate(HybridOptions{0.01, 0.5, 0.5, 0.01, 0}, 2), ErrorCode::kInvalidArgument);
  EXPECT_QN_ERROR(validate(HybridOptions{0.01, 1, 1.5, 0.01, 0}, 2), ErrorCode::kInvalidArgument);
  EXPECT_QN_ERROR(validate(HybridOptions{0.01, 1, 0.5, 1.0, 0}, 2), ErrorCode::kInvalidArgument);
}

TEST(EstimateNormalEquations, ExactEngineReproducesSystem) {
  const ExactAmplitudeEstimator exact;
  const EstimatedSystem s = estimate_normal_equations_qae(four_point(), 0.01, 0.01, exact, 1);
  const NormalEquations ne = compute_normal_equations_exact(four_point());
  EXPECT_EQ(s.w, ne.w);
  EXPECT_EQ(s.z, ne.z);
}

TEST(EstimateNormalEquations, QueryReportForTwoDimensions) {
  const SimulatedQae engine;
  const double eps_prime = 0.01;
  const double gamma = 0.01;
  const EstimatedSystem s = estimate_normal_equations_qae(four_point(), eps_prime, gamma, engine, 3);
  const std::uint64_t m = grid_for_error(eps_prime);
  const std::uint64_t r = repeats_for_confidence(gamma / 4.0);
  const std::uint64_t per_run = 2 * (m - 1) + 1;
  EXPECT_EQ(s.summary.n_estimates, 5u);
  EXPECT_EQ(s.summary.grid_size, m);
  EXPECT_EQ(s.summary.repeats, r);
  EXPECT_DOUBLE_EQ(s.summary.per_estimate_confidence, 1.0 - gamma / 4.0);
  EXPECT_EQ(s.summary.queries.at("P_x"), 3 * r * per_run * 2 + 2 * r * per_run * 1);
  EXPECT_EQ(s.summary.queries.at("P_y"), 2 * r * per_run);
  EXPECT_TRUE(s.w.is_symmetric());
}

TEST(EstimateNormalEquations, ElementErrorsWithinTolerance) {
  const SimulatedQae engine;
  const Dataset data = four_point();
  const NormalEquations ne = compute_normal_equations_exact(data);
  const double eps_prime = 0.01;
  const double gamma = 0.05;
  int ok = 0;
  const int trials = 400;
  for (int t = 0; t < trials; ++t) {
    const EstimatedSystem s = estimate_normal_equations_qae(data, eps_prime, gamma, engine, t);
    bool all = true;
    for (std::size_t i = 0; i < 2; ++i) {
      all = all && std::abs(s.z[i] - ne.z[i]) <= eps_prime;
      for (std::size_t j = 0; j < 2; ++j) all = all && std::abs(s.w(i, j) - ne.w(i, j)) <= eps_prime;
    }
    if (all) ++ok;
  }
  EXPECT_GE(ok, static_cast<int>((1.0 - gamma) * trials));
}

TEST(HybridRegress, ZeroErrorEngineEqualsNaive) {
  const ExactAmplitudeEstimator exact;
  for (std::uint64_t t = 0; t < 100; ++t) {
    CounterRng rng(derive_stream(4, 3, t));
    SyntheticSpec spec;
    spec.d = 1 + rng.uniform_index(5);
    spec.n_data = 10 + rng.uniform_index(50);
    spec.target_kappa = spec.d == 1 ? 1.0 : 1.0 + 5.0 * rng.uniform();
    spec.noise_level = 0.1;
    spec.seed = t;
    const SyntheticData s = generate_synthetic(spec);
    const RegressionResult h = hybrid_regress(s.data, HybridOptions{0.01, s.kappa, s.c, 0.01, t}, exact);
    const RegressionResult n = naive_regress(s.data);
    ASSERT_LE(max_norm(h.coefficients - n.coefficients), 1e-10) << "trial " << t;
    EXPECT_EQ(h.mode, RegressionMode::kQae);
    ASSERT_TRUE(h.report.has_value());
  }
}

TEST(HybridRegress, SimulatedEngineMeetsBound) {
  const SimulatedQae engine;
  const Dataset data = four_point();
  const NormalEquations ne = compute_normal_equations_exact(data);
  const RegressionResult exact = naive_regress(data);
  int pass = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const HybridOptions opts{0.01, ne.kappa, ne.c, 0.01, seed};
    const RegressionResult h = hybrid_regress(data, opts, engine);
    EXPECT_DOUBLE_EQ(h.eps_prime_used, hybrid_eps_prime(opts, 2));
    const BoundVerdict v = verify_error_bound(h.coefficients, exact.coefficients, h.eps_prime_used,
                                              2, ne.kappa, ne.c);
    if (v.pass) ++pass;
  }
  EXPECT_GE(pass, 49);
}

TEST(HybridRegress, ConfidenceIsPerElement) {
  const SimulatedQae engine;
  const HybridOptions opts{0.05, 2.0, 0.3, 0.02, 1};
  const RegressionResult h = hybrid_regress(four_point(), opts, engine);
  EXPECT_DOUBLE_EQ(h.report->per_estimate_confidence, 1.0 - 0.02 / 4.0);
}

TEST(Injection, ShiftsEveryElementByExactlyEpsPrime) {
  const Dataset data = four_point();
  const NormalEquations ne = compute_normal_equations_exact(data);
  for (InjectionPattern p : {InjectionPattern::kAdversarial, InjectionPattern::kRandomSigns}) {
    const RegressionResult r = injected_regress(data, 1e-3, p, 5);
    EXPECT_EQ(r.mode, RegressionMode::kInject);
    EXPECT_TRUE(r.w_used.is_symmetric());
    for (std::size_t i = 0; i < 2; ++i) {
      EXPECT_NEAR(std::abs(r.z_used[i] - ne.z[i]), 1e-3, 1e-15);
      for (std::size_t j = 0; j < 2; ++j) {
        EXPECT_NEAR(std::abs(r.w_used(i, j) - ne.w(i, j)), 1e-3, 1e-15);
      }
    }
  }
}

TEST(Injection, AdversarialPatternLowersSmallestEigenvalue) {
  const Dataset data = four_point();
  const NormalEquations ne = compute_normal_equations_exact(data);
  const double e = 1e-3;
  const RegressionResult r = injected_regress(data, e, InjectionPattern::kAdversarial, 0);
  const double drop = min_eigenvalue_symmetric(ne.w) - min_eigenvalue_symmetric(r.w_used);
  EXPECT_GT(drop, 0.0);
  EXPECT_LE(drop, 2 * e + 1e-15);
}

TEST(PerturbedSolve, InvertibilityUnderWorstCaseSigns) {
  CounterRng rng(derive_stream(4, 4));
  for (int t = 0; t < 300; ++t) {
    const std::size_t d = 1 + rng.uniform_index(5);
    const Dataset data = random_dataset(rng, d + 2 + rng.uniform_index(20), d);
    const NormalEquations ne = compute_normal_equations_exact(data);
    const double cap = ne.c / (static_cast<double>(d) * ne.kappa * ne.kappa) * (1.0 - 1e-9);
    const RegressionResult r = injected_regress(data, cap, InjectionPattern::kAdversarial, t);
    ASSERT_GT(min_eigenvalue_symmetric(r.w_used), 0.0) << "trial " << t;
    // Every sign pattern for d <= 3.
    if (d <= 3) {
      const std::size_t n_upper = d * (d + 1) / 2;
      for (std::size_t mask = 0; mask < (std::size_t{1} << n_upper); ++mask) {
        std::vector<double> e(d * d);
        std::size_t bit = 0;
        for (std::size_t i = 0; i < d; ++i) {
          for (std::size_t j = i; j < d; ++j, ++bit) {
            e[i * d + j] = e[j * d + i] = ((mask >> bit) & 1) ? cap : -cap;
          }
        }
        ASSERT_GT(min_eigenvalue_symmetric(ne.w + Matrix(d, d, e)), 0.0);
      }
    }
  }
}

TEST(PerturbedSolve, ErrorChainInequalities) {
  CounterRng rng(derive_stream(4, 5));
  for (int t = 0; t < 1000; ++t) {
    const std::size_t d = 1 + rng.uniform_index(5);
    const Dataset data = random_dataset(rng, d + 2 + rng.uniform_index(30), d);
    const NormalEquations ne = compute_normal_equations_exact(data);
    const double dd = static_cast<double>(d);
    ASSERT_GT(spectral_norm(ne.w), ne.c);
    ASSERT_GT(min_eigenvalue_symmetric(ne.w), ne.c / (ne.kappa * ne.kappa));
    ASSERT_LE(euclidean_norm(ne.z), std::sqrt(dd));
    const double ep = lemma1_tolerance(d, ne.kappa, ne.c, 0.05) * (1.0 - 1e-9);
    std::vector<double> e(d * d);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = i; j < d; ++j) e[i * d + j] = e[j * d + i] = ep * (2 * rng.uniform() - 1);
    }
    const Matrix dw(d, d, e);
    ASSERT_LE(spectral_norm(dw), frobenius_norm(dw) * (1 + 1e-12));
    ASSERT_LT(frobenius_norm(dw), dd * ep / (1.0 - 1e-9));
  }
}

TEST(PerturbedSolve, RandomPerturbedSystemsWithinBound) {
  for (std::uint64_t t = 0; t < 100; ++t) {
    CounterRng rng(derive_stream(4, 6, t));
    SyntheticSpec spec;
    spec.d = 1 + rng.uniform_index(5);
    spec.n_data = 20 + rng.uniform_index(40);
    spec.target_kappa = spec.d == 1 ? 1.0 : 1.0 + 9.0 * rng.uniform();
    spec.noise_level = 0.05;
    spec.seed = t;
    const SyntheticData s = generate_synthetic(spec);
    const double ep = lemma1_tolerance(spec.d, s.kappa, s.c, 0.05);
    const RegressionResult exact = naive_regress(s.data);
    for (InjectionPattern p : {InjectionPattern::kAdversarial, InjectionPattern::kRandomSigns}) {
      const RegressionResult r = injected_regress(s.data, ep, p, t);
      const BoundVerdict v = verify_error_bound(r.coefficients, exact.coefficients, ep, spec.d,
                                                s.kappa, s.c);
      ASSERT_TRUE(v.pass) << "trial " << t << " error " << v.error_2 << " bound " << v.bound;
      ASSERT_LE(v.error_inf, 1.05 * 0.05);
    }
  }
}

TEST(VerifyErrorBound, EqualVectorsPassWithFullMargin) {
  const Vector a{0.1, 0.2};
  const BoundVerdict v = verify_error_bound(a, a, 1e-3, 2, 1.5, 0.4);
  EXPECT_TRUE(v.pass);
  EXPECT_DOUBLE_EQ(v.margin, v.bound);
  EXPECT_NEAR(v.bound, lemma1_error_bound(2, 1.5, 0.4, 1e-3) * (1.0 + kBoundSlack), 1e-15);
}

TEST(VerifyErrorBound, PerturbationAtBoundFails) {
  const double bound = lemma1_error_bound(2, 1.0, 0.5, 1e-3) * (1.0 + kBoundSlack);
  const Vector a{0.1, 0.2};
  const BoundVerdict at = verify_error_bound(a + Vector{bound, 0.0}, a, 1e-3, 2, 1.0, 0.5);
  EXPECT_FALSE(at.pass);
  const BoundVerdict below = verify_error_bound(a + Vector{0.999 * bound, 0.0}, a, 1e-3, 2, 1.0, 0.5);
  EXPECT_TRUE(below.pass);
}

TEST(Modes, NamesRoundTrip) {
  for (RegressionMode m : {RegressionMode::kExact, RegressionMode::kQae, RegressionMode::kInject}) {
    EXPECT_EQ(parse_mode(mode_name(m)), m);
  }
  EXPECT_QN_ERROR(parse_mode("bogus"), ErrorCode::kInvalidArgument);
}

}  // namespace
