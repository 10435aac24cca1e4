#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace qnewton {

// Dense real vector. Immutable after construction; construction rejects empty
// input and non-finite entries.
class Vector {
 public:
  explicit Vector(std::vector<double> entries);
  Vector(std::initializer_list<double> entries);
  static Vector filled(std::size_t n, double value);
  static Vector zeros(std::size_t n) { return filled(n, 0.0); }
  static Vector unit(std::size_t n, std::size_t i);

  std::size_t size() const noexcept { return entries_.size(); }
  double operator[](std::size_t i) const noexcept { return entries_[i]; }
  std::span<const double> values() const noexcept { return entries_; }
  const std::vector<double>& to_std() const noexcept { return entries_; }

  friend bool operator==(const Vector&, const Vector&) = default;

 private:
  std::vector<double> entries_;
};

Vector operator+(const Vector& a, const Vector& b);
Vector operator-(const Vector& a, const Vector& b);
Vector operator*(double s, const Vector& v);
double dot(const Vector& a, const Vector& b);

// Dense row-major real matrix, same invariants as Vector.
class Matrix {
 public:
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);
  static Matrix zeros(std::size_t rows, std::size_t cols);
  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> diag);
  static Matrix diagonal(std::initializer_list<double> diag);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }
  double operator()(std::size_t i, std::size_t j) const noexcept {
    return data_[i * cols_ + j];
  }
  std::span<const double> values() const noexcept { return data_; }
  Vector row(std::size_t i) const;
  Vector column(std::size_t j) const;
  Vector diagonal_entries() const;

  Matrix transpose() const;
  bool is_symmetric(double tol = 0.0) const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& m);
Matrix operator*(const Matrix& a, const Matrix& b);
Vector operator*(const Matrix& a, const Vector& v);

// sigma_min / sigma_max below this ratio is treated as rank deficient.
inline constexpr double kRankDeficiencyRatio = 1e-12;
// Relative residual guaranteed by solve_symmetric on well-conditioned input.
inline constexpr double kSolveTolerance = 1e-10;
// Absolute accuracy target of the Jacobi eigensolver on O(1)-scaled input.
inline constexpr double kEigenTolerance = 1e-10;

double euclidean_norm(const Vector& v);
double max_norm(const Vector& v);
double frobenius_norm(const Matrix& a);

// Largest singular value. Symmetric input uses max |lambda| from the Jacobi
// eigensolver; general input uses one-sided Jacobi on the columns, which is
// the eigensolve of A^T A without forming the product.
double spectral_norm(const Matrix& a);

// Singular values in descending order (min(rows, cols) of them).
std::vector<double> singular_values(const Matrix& a);

// sigma_max / sigma_min. Throws RankDeficient when the ratio is below
// kRankDeficiencyRatio or the matrix is zero.
double condition_number(const Matrix& a);

struct SymmetricEigen {
  std::vector<double> values;  // ascending
  Matrix vectors;              // column j pairs with values[j]
};

// Cyclic Jacobi rotations. Input must be symmetric.
SymmetricEigen symmetric_eigen(const Matrix& a);
std::vector<double> symmetric_eigenvalues(const Matrix& a);
double min_eigenvalue_symmetric(const Matrix& a);
double max_eigenvalue_symmetric(const Matrix& a);

// True iff Cholesky succeeds with every pivot strictly positive.
bool is_positive_definite(const Matrix& a);

// Solves W a = z for symmetric W by Bunch-Kaufman LDL^T (1x1 and 2x2 pivots)
// followed by one step of iterative refinement. Throws SingularSystem when a
// pivot falls below the underflow floor.
Vector solve_symmetric(const Matrix& w, const Vector& z);

}  // namespace qnewton
