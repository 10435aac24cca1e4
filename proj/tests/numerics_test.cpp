#include <algorithm>
#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "expect_error.hpp"
#include "oracles.hpp"
#include "qnewton/error.hpp"
#include "qnewton/numerics.hpp"
#include "qnewton/rng.hpp"

namespace {

using namespace qnewton;
namespace qt = qnewton::testing;

TEST(Vector, RejectsEmptyAndNonFinite) {
  EXPECT_QN_ERROR(Vector(std::vector<double>{}), ErrorCode::kInvalidArgument);
  EXPECT_QN_ERROR((Vector{1.0, std::numeric_limits<double>::quiet_NaN()}),
                  ErrorCode::kInvalidArgument);
  EXPECT_QN_ERROR(Vector{std::numeric_limits<double>::infinity()}, ErrorCode::kInvalidArgument);
}

TEST(Matrix, RejectsBadShape) {
  EXPECT_QN_ERROR(Matrix(2, 2, {1.0, 2.0, 3.0}), ErrorCode::kInvalidArgument);
  EXPECT_QN_ERROR(Matrix(0, 1, {}), ErrorCode::kInvalidArgument);
}

TEST(Norms, EuclideanExamples) {
  EXPECT_DOUBLE_EQ(euclidean_norm(Vector{3, 4}), 5.0);
  EXPECT_DOUBLE_EQ(euclidean_norm(Vector{0, 0, 0}), 0.0);
  EXPECT_DOUBLE_EQ(euclidean_norm(Vector{1, 1, 1, 1}), 2.0);
}

TEST(Norms, EuclideanAvoidsOverflow) {
  EXPECT_DOUBLE_EQ(euclidean_norm(Vector{3e200, 4e200}), 5e200);
}

TEST(Norms, MaxExamples) {
  EXPECT_DOUBLE_EQ(max_norm(Vector{3, -4}), 4.0);
  EXPECT_DOUBLE_EQ(max_norm(Vector{0, 0}), 0.0);
  EXPECT_DOUBLE_EQ(max_norm(Vector{0.5, 0.5, 0.5}), 0.5);
}

TEST(SpectralNorm, Examples) {
  EXPECT_NEAR(spectral_norm(Matrix::identity(2)), 1.0, 1e-14);
  EXPECT_NEAR(spectral_norm(Matrix::diagonal({3, 1})), 3.0, 1e-14);
  EXPECT_NEAR(spectral_norm(Matrix{{0, 1}, {0, 0}}), 1.0, 1e-14);
}

TEST(SpectralNorm, RectangularMatchesKnownSingularValues) {
  // [[3, 0], [0, 4], [0, 0]] has singular values 4, 3.
  const auto s = singular_values(Matrix{{3, 0}, {0, 4}, {0, 0}});
  ASSERT_EQ(s.size(), 2u);
  EXPECT_NEAR(s[0], 4.0, 1e-14);
  EXPECT_NEAR(s[1], 3.0, 1e-14);
}

TEST(SpectralNorm, BoundedByFrobeniusOnRandomMatrices) {
  CounterRng rng(derive_stream(1, 1));
  for (int t = 0; t < 1000; ++t) {
    const std::size_t r = 1 + rng.uniform_index(8);
    const std::size_t c = 1 + rng.uniform_index(8);
    const Matrix a = qt::random_matrix(rng, r, c, 3.0);
    ASSERT_LE(spectral_norm(a), frobenius_norm(a) * (1.0 + 1e-14)) << "trial " << t;
  }
}

TEST(SpectralNorm, MatchesSqrtOfLargestEigenvalueOfGram) {
  CounterRng rng(derive_stream(1, 2));
  for (int t = 0; t < 200; ++t) {
    const Matrix a = qt::random_matrix(rng, 6, 4);
    const double lmax = max_eigenvalue_symmetric(a.transpose() * a);
    EXPECT_NEAR(spectral_norm(a), std::sqrt(lmax), 1e-10);
  }
}

TEST(ConditionNumber, Examples) {
  EXPECT_NEAR(condition_number(Matrix::identity(3)), 1.0, 1e-14);
  EXPECT_NEAR(condition_number(Matrix::diagonal({3, 1})), 3.0, 1e-14);
  EXPECT_QN_ERROR(condition_number(Matrix::diagonal({1, 1e-18})), ErrorCode::kRankDeficient);
  EXPECT_QN_ERROR(condition_number(Matrix::zeros(2, 2)), ErrorCode::kRankDeficient);
}

TEST(ConditionNumber, ThresholdIsRelative) {
  EXPECT_NO_THROW(condition_number(Matrix::diagonal({1, 2e-12})));
  EXPECT_QN_ERROR(condition_number(Matrix::diagonal({1, 5e-13})), ErrorCode::kRankDeficient);
}

TEST(ConditionNumber, EqualsNormTimesInverseNorm) {
  CounterRng rng(derive_stream(1, 3));
  for (int t = 0; t < 500; ++t) {
    const std::size_t n = 1 + rng.uniform_index(6);
    const Matrix a = qt::random_matrix(rng, n, n) + Matrix::identity(n);
    double kappa = 0.0;
    try {
      kappa = condition_number(a);
    } catch (const Error&) {
      continue;
    }
    if (kappa > 1e6) continue;
    const auto inv_rows = qt::gauss_jordan_inverse(qt::to_rows(a));
    std::vector<double> flat;
    for (const auto& r : inv_rows) flat.insert(flat.end(), r.begin(), r.end());
    const double product = spectral_norm(a) * spectral_norm(Matrix(n, n, flat));
    EXPECT_NEAR(kappa, product, 1e-8 * product) << "trial " << t;
  }
}

TEST(SymmetricEigen, MinEigenvalueExamples) {
  EXPECT_NEAR(min_eigenvalue_symmetric(Matrix::diagonal({2, 5})), 2.0, 1e-14);
  EXPECT_NEAR(min_eigenvalue_symmetric(Matrix{{2, 1}, {1, 2}}), 1.0, 1e-14);
  EXPECT_NEAR(min_eigenvalue_symmetric(-1.0 * Matrix::identity(2)), -1.0, 1e-14);
}

TEST(SymmetricEigen, RejectsAsymmetric) {
  EXPECT_QN_ERROR(symmetric_eigen(Matrix{{1, 2}, {0, 1}}), ErrorCode::kInvalidArgument);
}

TEST(SymmetricEigen, RecoversPlantedSpectrum) {
  CounterRng rng(derive_stream(1, 4));
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 1 + rng.uniform_index(10);
    std::vector<double> s(n);
    for (double& v : s) v = 4.0 * rng.uniform() - 2.0;
    const Matrix a = qt::random_spd_with_spectrum(rng, s);
    std::sort(s.begin(), s.end());
    const auto got = symmetric_eigenvalues(a);
    ASSERT_EQ(got.size(), n);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(got[i], s[i], kEigenTolerance);
  }
}

TEST(SymmetricEigen, VectorsAreOrthonormalEigenpairs) {
  CounterRng rng(derive_stream(1, 5));
  const Matrix a = qt::random_symmetric(rng, 7);
  const SymmetricEigen e = symmetric_eigen(a);
  for (std::size_t j = 0; j < 7; ++j) {
    const Vector v = e.vectors.column(j);
    EXPECT_NEAR(euclidean_norm(v), 1.0, 1e-12);
    EXPECT_LE(euclidean_norm(a * v - e.values[j] * v), 1e-10);
    for (std::size_t k = j + 1; k < 7; ++k) EXPECT_NEAR(dot(v, e.vectors.column(k)), 0.0, 1e-12);
  }
}

TEST(SymmetricEigen, WeylPerturbationBound) {
  CounterRng rng(derive_stream(1, 6));
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 1 + rng.uniform_index(6);
    const Matrix w = qt::random_symmetric(rng, n);
    const Matrix e = qt::random_symmetric(rng, n, 0.1 * rng.uniform());
    const double shift = std::abs(min_eigenvalue_symmetric(w + e) - min_eigenvalue_symmetric(w));
    ASSERT_LE(shift, spectral_norm(e) + 1e-12) << "trial " << t;
  }
}

TEST(PositiveDefinite, Examples) {
  EXPECT_TRUE(is_positive_definite(Matrix::identity(2)));
  EXPECT_FALSE(is_positive_definite(Matrix::diagonal({1, -1})));
  EXPECT_TRUE(is_positive_definite(Matrix{{2, 1}, {1, 2}}));
  EXPECT_FALSE(is_positive_definite(Matrix{{1, 1}, {1, 1}}));
}

TEST(PositiveDefinite, AgreesWithSpectrumSign) {
  CounterRng rng(derive_stream(1, 7));
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 1 + rng.uniform_index(6);
    const Matrix a = qt::random_symmetric(rng, n) + 0.5 * Matrix::identity(n);
    const double lmin = min_eigenvalue_symmetric(a);
    if (std::abs(lmin) < 1e-8) continue;
    EXPECT_EQ(is_positive_definite(a), lmin > 0.0) << "lambda_min " << lmin;
  }
}

TEST(SolveSymmetric, Examples) {
  const Vector a = solve_symmetric(Matrix::identity(2), Vector{1, 2});
  EXPECT_DOUBLE_EQ(a[0], 1.0);
  EXPECT_DOUBLE_EQ(a[1], 2.0);
  const Vector b = solve_symmetric(Matrix::diagonal({0.5, 0.5}), Vector{0.5, 0.5});
  EXPECT_DOUBLE_EQ(b[0], 1.0);
  EXPECT_DOUBLE_EQ(b[1], 1.0);
  EXPECT_QN_ERROR(solve_symmetric(Matrix::zeros(2, 2), Vector{1, 1}), ErrorCode::kSingularSystem);
}

TEST(SolveSymmetric, IndefiniteNeedsTwoByTwoPivot) {
  // Zero diagonal forces a 2x2 pivot in Bunch-Kaufman.
  const Vector a = solve_symmetric(Matrix{{0, 1}, {1, 0}}, Vector{2, 3});
  EXPECT_NEAR(a[0], 3.0, 1e-14);
  EXPECT_NEAR(a[1], 2.0, 1e-14);
}

TEST(SolveSymmetric, ResidualOnWellConditionedSystems) {
  CounterRng rng(derive_stream(1, 8));
  for (int t = 0; t < 500; ++t) {
    const std::size_t n = 1 + rng.uniform_index(16);
    std::vector<double> s(n);
    // Spectrum magnitudes in [1e-3, 1], random signs: kappa <= 1e3.
    for (double& v : s) {
      v = std::pow(10.0, -3.0 * rng.uniform()) * (rng.uniform() < 0.3 ? -1.0 : 1.0);
    }
    const Matrix w = qt::random_spd_with_spectrum(rng, s);
    std::vector<double> zv(n);
    for (double& v : zv) v = rng.normal();
    const Vector z(zv);
    const Vector a = solve_symmetric(w, z);
    ASSERT_LE(euclidean_norm(w * a - z), kSolveTolerance * euclidean_norm(z))
        << "trial " << t << " n " << n;
    const auto ref = qt::gauss_jordan_solve(qt::to_rows(w), zv);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(a[i], ref[i], 1e-7 * (1.0 + std::abs(ref[i])));
  }
}

TEST(SolveSymmetric, Deterministic) {
  CounterRng rng(derive_stream(1, 9));
  const Matrix w = qt::random_spd_with_spectrum(rng, {1, 2, 3, 4});
  const Vector z{1, -1, 2, 0.5};
  EXPECT_EQ(solve_symmetric(w, z), solve_symmetric(w, z));
}

}  // namespace
