#include "qnewton/objective.hpp"

#include <cmath>
#include <string>

#include "qnewton/error.hpp"

namespace qnewton {

SumObjective::SumObjective(DerivativeBounds b, double radius) : bounds_(b), radius_(radius) {
  set_bounds(b);
}

void SumObjective::set_bounds(DerivativeBounds b) {
  if (!(b.gradient.upper > b.gradient.lower) || !(b.hessian.upper > b.hessian.lower)) {
    throw Error(ErrorCode::kDegenerateBounds, "derivative bounds need U > L");
  }
  bounds_ = b;
}

double objective_value(const SumObjective& obj, const Vector& a) {
  double acc = 0.0;
  for (std::size_t k = 0; k < obj.n_terms(); ++k) acc += obj.term_value(a, k);
  return acc / static_cast<double>(obj.n_terms());
}

namespace {

void require_radius(double r) {
  if (!(r > 0.0)) throw Error(ErrorCode::kInvalidArgument, "region radius must be positive");
}

void require_lambda(double lambda) {
  if (!(lambda >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "lambda must be >= 0");
}

double squared_norm(const Vector& a) {
  double s = 0.0;
  for (double v : a.values()) s += v * v;
  return s;
}

double row_dot(const Matrix& m, std::size_t k, const Vector& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.cols(); ++i) s += m(k, i) * a[i];
  return s;
}

class LeastSquares final : public SumObjective {
 public:
  LeastSquares(const Dataset& data, double lambda, double radius)
      : SumObjective(default_bounds(data.dim(), lambda, radius), radius),
        data_(data),
        lambda_(lambda) {}

  std::string_view family() const override {
    return lambda_ > 0.0 ? "ridge_least_squares" : "least_squares";
  }
  std::size_t dim() const override { return data_.dim(); }
  std::size_t n_terms() const override { return data_.n_data(); }

  double term_value(const Vector& a, std::size_t k) const override {
    const double r = row_dot(data_.x(), k, a) - data_.target(k);
    return 0.5 * r * r + 0.5 * lambda_ * squared_norm(a);
  }
  double term_grad(const Vector& a, std::size_t k, std::size_t i) const override {
    const double r = row_dot(data_.x(), k, a) - data_.target(k);
    return r * data_.feature(k, i) + lambda_ * a[i];
  }
  double term_hess(const Vector&, std::size_t k, std::size_t i, std::size_t j) const override {
    return data_.feature(k, i) * data_.feature(k, j) + (i == j ? lambda_ : 0.0);
  }

  double analytic_mu() const override {
    return lambda_ + min_eigenvalue_symmetric(gram());
  }
  double analytic_hessian_lipschitz() const override { return 0.0; }

  std::optional<Vector> closed_form_minimizer() const override {
    const std::size_t d = dim();
    const Matrix w = gram() + lambda_ * Matrix::identity(d);
    std::vector<double> z(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t k = 0; k < n_terms(); ++k) z[i] += data_.feature(k, i) * data_.target(k);
      z[i] /= static_cast<double>(n_terms());
    }
    return solve_symmetric(w, Vector(std::move(z)));
  }

 private:
  // Over |a_j| <= R with x, y in [0, 1]: x.a - y in [-dR - 1, dR].
  static DerivativeBounds default_bounds(std::size_t d, double lambda, double radius) {
    const double dr = static_cast<double>(d) * radius;
    return DerivativeBounds{{-dr - 1.0 - lambda * radius, dr + lambda * radius},
                            {0.0, 1.0 + lambda}};
  }

  Matrix gram() const {
    const std::size_t d = dim();
    std::vector<double> w(d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t k = 0; k < n_terms(); ++k) {
          w[i * d + j] += data_.feature(k, i) * data_.feature(k, j);
        }
        w[i * d + j] /= static_cast<double>(n_terms());
      }
    }
    return Matrix(d, d, std::move(w));
  }

  Dataset data_;
  double lambda_;
};

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

class Logistic final : public SumObjective {
 public:
  Logistic(const Matrix& features, std::vector<double> labels, double lambda, double radius)
      : SumObjective(DerivativeBounds{{-1.0 - lambda * radius, 1.0 + lambda * radius},
                                      {0.0, 0.25 + lambda}},
                     radius),
        x_(features),
        y_(std::move(labels)),
        lambda_(lambda) {
    if (y_.size() != x_.rows()) {
      throw Error(ErrorCode::kInvalidArgument, "need one label per feature row");
    }
    for (double v : y_) {
      if (v != 1.0 && v != -1.0) throw Error(ErrorCode::kInvalidArgument, "labels must be +-1");
    }
    for (double v : x_.values()) {
      if (v < 0.0 || v > 1.0) {
        throw Error(ErrorCode::kInvalidArgument, "logistic features must lie in [0, 1]");
      }
    }
    for (std::size_t k = 0; k < x_.rows(); ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < x_.cols(); ++i) s += x_(k, i) * x_(k, i);
      max_norm_cubed_ = std::max(max_norm_cubed_, s * std::sqrt(s));
    }
  }

  std::string_view family() const override { return "logistic"; }
  std::size_t dim() const override { return x_.cols(); }
  std::size_t n_terms() const override { return x_.rows(); }

  double term_value(const Vector& a, std::size_t k) const override {
    const double m = y_[k] * row_dot(x_, k, a);
    // log(1 + exp(-m)) without overflow.
    const double loss = m > 0.0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m));
    return loss + 0.5 * lambda_ * squared_norm(a);
  }
  double term_grad(const Vector& a, std::size_t k, std::size_t i) const override {
    const double m = y_[k] * row_dot(x_, k, a);
    return -y_[k] * x_(k, i) * sigmoid(-m) + lambda_ * a[i];
  }
  double term_hess(const Vector& a, std::size_t k, std::size_t i, std::size_t j) const override {
    const double s = sigmoid(row_dot(x_, k, a));
    return s * (1.0 - s) * x_(k, i) * x_(k, j) + (i == j ? lambda_ : 0.0);
  }

  double analytic_mu() const override { return lambda_; }
  // |sigma'''| <= 1 / (6 sqrt 3) bounds how fast sigma'(x.a) x x^T moves.
  double analytic_hessian_lipschitz() const override {
    return max_norm_cubed_ / (6.0 * std::sqrt(3.0));
  }

 private:
  Matrix x_;
  std::vector<double> y_;
  double lambda_;
  double max_norm_cubed_ = 0.0;
};

class Quadratic final : public SumObjective {
 public:
  Quadratic(const Matrix& centres, double lambda, double radius)
      : SumObjective(DerivativeBounds{{-radius - 1.0 - lambda * radius, radius + lambda * radius},
                                      {0.0, 1.0 + lambda}},
                     radius),
        c_(centres),
        lambda_(lambda) {
    for (double v : c_.values()) {
      if (v < 0.0 || v > 1.0) throw Error(ErrorCode::kInvalidArgument, "centres must lie in [0, 1]");
    }
  }

  std::string_view family() const override { return "quadratic"; }
  std::size_t dim() const override { return c_.cols(); }
  std::size_t n_terms() const override { return c_.rows(); }

  double term_value(const Vector& a, std::size_t k) const override {
    double s = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) {
      const double r = a[i] - c_(k, i);
      s += r * r;
    }
    return 0.5 * s + 0.5 * lambda_ * squared_norm(a);
  }
  double term_grad(const Vector& a, std::size_t k, std::size_t i) const override {
    return a[i] - c_(k, i) + lambda_ * a[i];
  }
  double term_hess(const Vector&, std::size_t, std::size_t i, std::size_t j) const override {
    return i == j ? 1.0 + lambda_ : 0.0;
  }

  double analytic_mu() const override { return 1.0 + lambda_; }
  double analytic_hessian_lipschitz() const override { return 0.0; }

  std::optional<Vector> closed_form_minimizer() const override {
    std::vector<double> a(dim(), 0.0);
    for (std::size_t i = 0; i < dim(); ++i) {
      for (std::size_t k = 0; k < n_terms(); ++k) a[i] += c_(k, i);
      a[i] /= static_cast<double>(n_terms()) * (1.0 + lambda_);
    }
    return Vector(std::move(a));
  }

 private:
  Matrix c_;
  double lambda_;
};

}  // namespace

std::unique_ptr<SumObjective> make_least_squares(const Dataset& data, double lambda,
                                                 double region_radius) {
  require_lambda(lambda);
  require_radius(region_radius);
  return std::make_unique<LeastSquares>(data, lambda, region_radius);
}

std::unique_ptr<SumObjective> make_logistic(const Matrix& features, std::vector<double> labels,
                                            double lambda, double region_radius) {
  require_lambda(lambda);
  require_radius(region_radius);
  return std::make_unique<Logistic>(features, std::move(labels), lambda, region_radius);
}

std::unique_ptr<SumObjective> make_quadratic(const Matrix& centres, double lambda,
                                             double region_radius) {
  require_lambda(lambda);
  require_radius(region_radius);
  return std::make_unique<Quadratic>(centres, lambda, region_radius);
}

}  // namespace qnewton
