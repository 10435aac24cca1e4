#include "qnewton/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "qnewton/error.hpp"

namespace qnewton {

namespace {

void require_finite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kInvalidArgument, std::string(what) + " has a non-finite entry");
    }
  }
}

void require_same_size(std::size_t a, std::size_t b, const char* op) {
  if (a != b) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(op) + ": dimension mismatch (" + std::to_string(a) + " vs " +
                    std::to_string(b) + ")");
  }
}

// Working storage for in-place algorithms; converted back to Matrix at the end.
struct Dense {
  std::size_t n;
  std::size_t m;
  std::vector<double> a;

  explicit Dense(const Matrix& src)
      : n(src.rows()), m(src.cols()), a(src.values().begin(), src.values().end()) {}
  Dense(std::size_t rows, std::size_t cols) : n(rows), m(cols), a(rows * cols, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return a[i * m + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * m + j]; }
};

void require_symmetric(const Matrix& a, const char* op) {
  if (!a.is_square()) {
    throw Error(ErrorCode::kInvalidArgument, std::string(op) + ": matrix is not square");
  }
  const double scale = std::max(1.0, frobenius_norm(a));
  if (!a.is_symmetric(1e-12 * scale)) {
    throw Error(ErrorCode::kInvalidArgument, std::string(op) + ": matrix is not symmetric");
  }
}

}  // namespace

Vector::Vector(std::vector<double> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "vector must have dimension >= 1");
  }
  require_finite(entries_, "vector");
}

Vector::Vector(std::initializer_list<double> entries)
    : Vector(std::vector<double>(entries)) {}

Vector Vector::filled(std::size_t n, double value) {
  return Vector(std::vector<double>(n, value));
}

Vector Vector::unit(std::size_t n, std::size_t i) {
  std::vector<double> e(n, 0.0);
  if (i >= n) throw Error(ErrorCode::kInvalidArgument, "unit vector index out of range");
  e[i] = 1.0;
  return Vector(std::move(e));
}

Vector operator+(const Vector& a, const Vector& b) {
  require_same_size(a.size(), b.size(), "vector +");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return Vector(std::move(out));
}

Vector operator-(const Vector& a, const Vector& b) {
  require_same_size(a.size(), b.size(), "vector -");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return Vector(std::move(out));
}

Vector operator*(double s, const Vector& v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = s * v[i];
  return Vector(std::move(out));
}

double dot(const Vector& a, const Vector& b) {
  require_same_size(a.size(), b.size(), "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major)
    : rows_(rows), cols_(cols), data_(std::move(row_major)) {
  if (rows_ == 0 || cols_ == 0) {
    throw Error(ErrorCode::kInvalidArgument, "matrix must have at least one row and column");
  }
  if (data_.size() != rows_ * cols_) {
    throw Error(ErrorCode::kInvalidArgument, "matrix storage does not match rows*cols");
  }
  require_finite(data_, "matrix");
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : Matrix(rows.size(), rows.size() == 0 ? 0 : rows.begin()->size(), [&] {
        std::vector<double> flat;
        const std::size_t width = rows.size() == 0 ? 0 : rows.begin()->size();
        for (const auto& r : rows) {
          if (r.size() != width) {
            throw Error(ErrorCode::kInvalidArgument, "ragged matrix initializer");
          }
          flat.insert(flat.end(), r.begin(), r.end());
        }
        return flat;
      }()) {}

Matrix Matrix::zeros(std::size_t rows, std::size_t cols) {
  return Matrix(rows, cols, std::vector<double>(rows * cols, 0.0));
}

Matrix Matrix::identity(std::size_t n) {
  std::vector<double> d(n, 1.0);
  return diagonal(d);
}

Matrix Matrix::diagonal(std::span<const double> diag) {
  const std::size_t n = diag.size();
  std::vector<double> data(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) data[i * n + i] = diag[i];
  return Matrix(n, n, std::move(data));
}

Matrix Matrix::diagonal(std::initializer_list<double> diag) {
  return diagonal(std::span<const double>(diag.begin(), diag.size()));
}

Vector Matrix::row(std::size_t i) const {
  return Vector(std::vector<double>(data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
                                    data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_)));
}

Vector Matrix::column(std::size_t j) const {
  std::vector<double> out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
  return Vector(std::move(out));
}

Vector Matrix::diagonal_entries() const {
  const std::size_t n = std::min(rows_, cols_);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = (*this)(i, i);
  return Vector(std::move(out));
}

Matrix Matrix::transpose() const {
  std::vector<double> out(data_.size());
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out[j * rows_ + i] = (*this)(i, j);
  return Matrix(cols_, rows_, std::move(out));
}

bool Matrix::is_symmetric(double tol) const {
  if (!is_square()) return false;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = i + 1; j < cols_; ++j)
      if (std::abs((*this)(i, j) - (*this)(j, i)) > tol) return false;
  return true;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  require_same_size(a.rows(), b.rows(), "matrix +");
  require_same_size(a.cols(), b.cols(), "matrix +");
  std::vector<double> out(a.values().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values()[i] + b.values()[i];
  return Matrix(a.rows(), a.cols(), std::move(out));
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  require_same_size(a.rows(), b.rows(), "matrix -");
  require_same_size(a.cols(), b.cols(), "matrix -");
  std::vector<double> out(a.values().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values()[i] - b.values()[i];
  return Matrix(a.rows(), a.cols(), std::move(out));
}

Matrix operator*(double s, const Matrix& m) {
  std::vector<double> out(m.values().begin(), m.values().end());
  for (double& v : out) v *= s;
  return Matrix(m.rows(), m.cols(), std::move(out));
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  require_same_size(a.cols(), b.rows(), "matrix *");
  Dense out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  return Matrix(a.rows(), b.cols(), std::move(out.a));
}

Vector operator*(const Matrix& a, const Vector& v) {
  require_same_size(a.cols(), v.size(), "matrix-vector *");
  std::vector<double> out(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * v[j];
    out[i] = s;
  }
  return Vector(std::move(out));
}

double euclidean_norm(const Vector& v) {
  // Scaled accumulation avoids overflow for large entries.
  const double scale = max_norm(v);
  if (scale == 0.0) return 0.0;
  double s = 0.0;
  for (double x : v.values()) {
    const double r = x / scale;
    s += r * r;
  }
  return scale * std::sqrt(s);
}

double max_norm(const Vector& v) {
  double m = 0.0;
  for (double x : v.values()) m = std::max(m, std::abs(x));
  return m;
}

double frobenius_norm(const Matrix& a) {
  return euclidean_norm(Vector(std::vector<double>(a.values().begin(), a.values().end())));
}

SymmetricEigen symmetric_eigen(const Matrix& input) {
  require_symmetric(input, "symmetric_eigen");
  const std::size_t n = input.rows();
  Dense a(input);
  Dense v(n, n);
  for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

  const double total = frobenius_norm(input);
  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(2.0 * off) <= std::numeric_limits<double>::epsilon() * total) break;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Rutishauser's formulation of the rotation that annihilates a(p,q).
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const double arp = a(r, p);
          const double arq = a(r, q);
          a(r, p) = arp - s * (arq + tau * arp);
          a(p, r) = a(r, p);
          a(r, q) = arq + s * (arp - tau * arq);
          a(q, r) = a(r, q);
        }
        for (std::size_t r = 0; r < n; ++r) {
          const double vrp = v(r, p);
          const double vrq = v(r, q);
          v(r, p) = vrp - s * (vrq + tau * vrp);
          v(r, q) = vrq + s * (vrp - tau * vrq);
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });
  std::vector<double> values(n);
  Dense vectors(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    values[k] = a(order[k], order[k]);
    for (std::size_t r = 0; r < n; ++r) vectors(r, k) = v(r, order[k]);
  }
  return SymmetricEigen{std::move(values), Matrix(n, n, std::move(vectors.a))};
}

std::vector<double> symmetric_eigenvalues(const Matrix& a) {
  return symmetric_eigen(a).values;
}

double min_eigenvalue_symmetric(const Matrix& a) { return symmetric_eigenvalues(a).front(); }

double max_eigenvalue_symmetric(const Matrix& a) { return symmetric_eigenvalues(a).back(); }

std::vector<double> singular_values(const Matrix& input) {
  // One-sided (Hestenes) Jacobi over the columns of the taller orientation.
  const Matrix a = input.rows() >= input.cols() ? input : input.transpose();
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  // Column-major copy: column j occupies cols[j*m .. j*m+m).
  std::vector<double> cols(m * n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < m; ++i) cols[j * m + i] = a(i, j);

  auto col = [&](std::size_t j) { return cols.data() + j * m; };
  constexpr double kOrthTol = 1e-15;
  constexpr int kMaxSweeps = 60;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        const double* cp = col(p);
        const double* cq = col(q);
        for (std::size_t i = 0; i < m; ++i) {
          alpha += cp[i] * cp[i];
          beta += cq[i] * cq[i];
          gamma += cp[i] * cq[i];
        }
        if (gamma == 0.0 || std::abs(gamma) <= kOrthTol * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t =
            std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        double* wp = col(p);
        double* wq = col(q);
        for (std::size_t i = 0; i < m; ++i) {
          const double x = wp[i];
          const double y = wq[i];
          wp[i] = c * x - s * y;
          wq[i] = s * x + c * y;
        }
      }
    }
    if (!rotated) break;
  }

  std::vector<double> sv(n);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    const double* cj = col(j);
    for (std::size_t i = 0; i < m; ++i) s += cj[i] * cj[i];
    sv[j] = std::sqrt(s);
  }
  std::sort(sv.begin(), sv.end(), std::greater<>());
  return sv;
}

double spectral_norm(const Matrix& a) {
  if (a.is_square() && a.is_symmetric()) {
    const auto ev = symmetric_eigenvalues(a);
    return std::max(std::abs(ev.front()), std::abs(ev.back()));
  }
  return singular_values(a).front();
}

double condition_number(const Matrix& a) {
  const auto sv = singular_values(a);
  const double smax = sv.front();
  const double smin = sv.back();
  if (smax == 0.0 || smin < kRankDeficiencyRatio * smax) {
    throw Error(ErrorCode::kRankDeficient,
                "matrix is rank deficient (sigma_min/sigma_max below 1e-12)");
  }
  return smax / smin;
}

bool is_positive_definite(const Matrix& input) {
  require_symmetric(input, "is_positive_definite");
  const std::size_t n = input.rows();
  Dense l(input);
  for (std::size_t j = 0; j < n; ++j) {
    double pivot = l(j, j);
    for (std::size_t k = 0; k < j; ++k) pivot -= l(j, k) * l(j, k);
    if (!(pivot > 0.0)) return false;
    const double ljj = std::sqrt(pivot);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = l(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }
  return true;
}

namespace {

// P W P^T = L D L^T with D block diagonal (1x1 / 2x2 blocks).
class BunchKaufman {
 public:
  explicit BunchKaufman(const Matrix& w) : n_(w.rows()), a_(w), perm_(n_) {
    std::iota(perm_.begin(), perm_.end(), 0);
    double scale = 0.0;
    for (double v : w.values()) scale = std::max(scale, std::abs(v));
    floor_ = 64.0 * std::numeric_limits<double>::epsilon() * scale;
    if (scale == 0.0) singular();
    factor();
  }

  std::vector<double> solve(std::span<const double> b) const {
    std::vector<double> y(n_);
    for (std::size_t p = 0; p < n_; ++p) y[p] = b[perm_[p]];
    // L y = b
    for (const Block& blk : blocks_) {
      const std::size_t k = blk.k;
      const std::size_t next = k + blk.size;
      for (std::size_t i = next; i < n_; ++i) {
        y[i] -= a_(i, k) * y[k];
        if (blk.size == 2) y[i] -= a_(i, k + 1) * y[k + 1];
      }
    }
    // D y = y
    for (const Block& blk : blocks_) {
      const std::size_t k = blk.k;
      if (blk.size == 1) {
        y[k] /= blk.d11;
      } else {
        const double det = blk.d11 * blk.d22 - blk.d21 * blk.d21;
        const double y1 = y[k];
        const double y2 = y[k + 1];
        y[k] = (blk.d22 * y1 - blk.d21 * y2) / det;
        y[k + 1] = (blk.d11 * y2 - blk.d21 * y1) / det;
      }
    }
    // L^T x = y
    for (auto it = blocks_.rbegin(); it != blocks_.rend(); ++it) {
      const std::size_t k = it->k;
      const std::size_t next = k + it->size;
      for (std::size_t i = next; i < n_; ++i) {
        y[k] -= a_(i, k) * y[i];
        if (it->size == 2) y[k + 1] -= a_(i, k + 1) * y[i];
      }
    }
    std::vector<double> x(n_);
    for (std::size_t p = 0; p < n_; ++p) x[perm_[p]] = y[p];
    return x;
  }

 private:
  struct Block {
    std::size_t k;
    int size;
    double d11;
    double d21;
    double d22;
  };

  [[noreturn]] static void singular() {
    throw Error(ErrorCode::kSingularSystem, "symmetric factorization pivot underflow");
  }

  void swap_symmetric(std::size_t r, std::size_t s) {
    if (r == s) return;
    for (std::size_t j = 0; j < n_; ++j) std::swap(a_(r, j), a_(s, j));
    for (std::size_t i = 0; i < n_; ++i) std::swap(a_(i, r), a_(i, s));
    std::swap(perm_[r], perm_[s]);
  }

  void factor() {
    const double alpha = (1.0 + std::sqrt(17.0)) / 8.0;
    std::size_t k = 0;
    while (k < n_) {
      const double absakk = std::abs(a_(k, k));
      std::size_t imax = k;
      double colmax = 0.0;
      for (std::size_t i = k + 1; i < n_; ++i) {
        if (std::abs(a_(i, k)) > colmax) {
          colmax = std::abs(a_(i, k));
          imax = i;
        }
      }
      if (std::max(absakk, colmax) <= floor_) singular();

      int size = 1;
      std::size_t kp = k;
      if (absakk < alpha * colmax) {
        double rowmax = 0.0;
        for (std::size_t j = k; j < n_; ++j)
          if (j != imax) rowmax = std::max(rowmax, std::abs(a_(imax, j)));
        if (absakk >= alpha * colmax * (colmax / rowmax)) {
          kp = k;
        } else if (std::abs(a_(imax, imax)) >= alpha * rowmax) {
          kp = imax;
        } else {
          kp = imax;
          size = 2;
        }
      }
      const std::size_t kk = k + static_cast<std::size_t>(size) - 1;
      swap_symmetric(kk, kp);

      if (size == 1) {
        const double d = a_(k, k);
        if (std::abs(d) <= floor_) singular();
        std::vector<double> col(n_, 0.0);
        for (std::size_t i = k + 1; i < n_; ++i) col[i] = a_(i, k);
        for (std::size_t i = k + 1; i < n_; ++i) {
          const double li = col[i] / d;
          for (std::size_t j = k + 1; j < n_; ++j) a_(i, j) -= li * col[j];
        }
        for (std::size_t i = k + 1; i < n_; ++i) a_(i, k) = col[i] / d;
        blocks_.push_back({k, 1, d, 0.0, 0.0});
      } else {
        const double d11 = a_(k, k);
        const double d21 = a_(k + 1, k);
        const double d22 = a_(k + 1, k + 1);
        const double det = d11 * d22 - d21 * d21;
        if (std::abs(det) <= floor_ * std::max({std::abs(d11), std::abs(d21), std::abs(d22)})) {
          singular();
        }
        std::vector<double> c1(n_, 0.0), c2(n_, 0.0);
        for (std::size_t i = k + 2; i < n_; ++i) {
          c1[i] = a_(i, k);
          c2[i] = a_(i, k + 1);
        }
        std::vector<double> l1(n_, 0.0), l2(n_, 0.0);
        for (std::size_t i = k + 2; i < n_; ++i) {
          l1[i] = (c1[i] * d22 - c2[i] * d21) / det;
          l2[i] = (c2[i] * d11 - c1[i] * d21) / det;
        }
        for (std::size_t i = k + 2; i < n_; ++i)
          for (std::size_t j = k + 2; j < n_; ++j) a_(i, j) -= l1[i] * c1[j] + l2[i] * c2[j];
        for (std::size_t i = k + 2; i < n_; ++i) {
          a_(i, k) = l1[i];
          a_(i, k + 1) = l2[i];
        }
        blocks_.push_back({k, 2, d11, d21, d22});
      }
      k += static_cast<std::size_t>(size);
    }
  }

  std::size_t n_;
  Dense a_;
  std::vector<std::size_t> perm_;
  std::vector<Block> blocks_;
  double floor_ = 0.0;
};

}  // namespace

Vector solve_symmetric(const Matrix& w, const Vector& z) {
  require_symmetric(w, "solve_symmetric");
  require_same_size(w.rows(), z.size(), "solve_symmetric");
  const BunchKaufman factor(w);
  std::vector<double> x = factor.solve(z.values());
  // One refinement step: x += W^{-1} (z - W x).
  std::vector<double> r(z.size());
  for (std::size_t i = 0; i < w.rows(); ++i) {
    long double s = z[i];
    for (std::size_t j = 0; j < w.cols(); ++j) s -= static_cast<long double>(w(i, j)) * x[j];
    r[i] = static_cast<double>(s);
  }
  const std::vector<double> dx = factor.solve(r);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += dx[i];
  return Vector(std::move(x));
}

}  // namespace qnewton
