#pragma once

#include <cstdint>
#include <vector>

#include "qnewton/dataset.hpp"
#include "qnewton/numerics.hpp"
#include "qnewton/objective.hpp"
#include "qnewton/rng.hpp"

namespace qnewton::testing {

// Gauss-Jordan elimination with partial pivoting, independent of the library
// factorizations.
std::vector<double> gauss_jordan_solve(std::vector<std::vector<double>> a, std::vector<double> b);
std::vector<std::vector<double>> gauss_jordan_inverse(std::vector<std::vector<double>> a);

// Brute-force (1/N) sum_k x_k^(i) x_k^(j) and (1/N) sum_k x_k^(i) y_k.
double brute_w(const Dataset& data, std::size_t i, std::size_t j);
double brute_z(const Dataset& data, std::size_t i);

// Phase-estimation outcome distribution from a direct simulation: Q is a
// rotation by 2 theta on span{good, bad}; amplitude of y is
// (1/M) sum_k exp(-2 pi i k y / M) Q^k A|0>.
std::vector<double> qpe_statevector_distribution(double a, std::uint64_t grid_size);

// Central differences of F and of its exact gradient.
std::vector<double> fd_gradient(const SumObjective& obj, const Vector& a, double h = 1e-5);
std::vector<std::vector<double>> fd_hessian(const SumObjective& obj, const Vector& a,
                                            double h = 1e-5);

Matrix random_matrix(CounterRng& rng, std::size_t rows, std::size_t cols, double scale = 1.0);
Matrix random_symmetric(CounterRng& rng, std::size_t n, double scale = 1.0);
// Q diag(s) Q^T with a random orthogonal Q from Gram-Schmidt.
Matrix random_spd_with_spectrum(CounterRng& rng, const std::vector<double>& spectrum);

std::vector<std::vector<double>> to_rows(const Matrix& m);

}  // namespace qnewton::testing
