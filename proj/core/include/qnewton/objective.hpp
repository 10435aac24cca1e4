#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "qnewton/dataset.hpp"
#include "qnewton/numerics.hpp"

namespace qnewton {

// Intervals containing every term derivative over the search region. One
// interval for all gradient entries, one for all Hessian entries.
struct DerivativeBounds {
  ScaleBounds gradient;
  ScaleBounds hessian;
};

// F(a) = (1/N_D) sum_k f(a, c_k).
class SumObjective {
 public:
  virtual ~SumObjective() = default;

  virtual std::string_view family() const = 0;
  virtual std::size_t dim() const = 0;
  virtual std::size_t n_terms() const = 0;

  virtual double term_value(const Vector& a, std::size_t k) const = 0;
  // f_i(a, c_k), zero-based i.
  virtual double term_grad(const Vector& a, std::size_t k, std::size_t i) const = 0;
  // f_ij(a, c_k). Must be symmetric in (i, j).
  virtual double term_hess(const Vector& a, std::size_t k, std::size_t i,
                           std::size_t j) const = 0;

  // Strong convexity constant and Hessian Lipschitz constant that follow from
  // the family's structure; 0 when no positive bound is available.
  virtual double analytic_mu() const = 0;
  virtual double analytic_hessian_lipschitz() const = 0;

  // Minimizer in closed form where the family has one; empty otherwise.
  virtual std::optional<Vector> closed_form_minimizer() const { return std::nullopt; }

  const DerivativeBounds& bounds() const noexcept { return bounds_; }
  void set_bounds(DerivativeBounds b);

  // Half-width R of the box |a_j| <= R the default bounds were derived for.
  double region_radius() const noexcept { return radius_; }

 protected:
  SumObjective(DerivativeBounds b, double radius);

 private:
  DerivativeBounds bounds_;
  double radius_;
};

double objective_value(const SumObjective& obj, const Vector& a);

// f = (x_k . a - y_k)^2 / 2 + lambda |a|^2 / 2. lambda = 0 gives plain least
// squares, whose gradient at 0 is -z and whose Hessian is W.
std::unique_ptr<SumObjective> make_least_squares(const Dataset& data, double lambda = 0.0,
                                                 double region_radius = 4.0);

// f = log(1 + exp(-y_k x_k . a)) + lambda |a|^2 / 2 with y_k in {-1, +1} and
// features in [0, 1]. mu = lambda, M = max |x_k|^3 / (6 sqrt 3).
std::unique_ptr<SumObjective> make_logistic(const Matrix& features, std::vector<double> labels,
                                            double lambda, double region_radius = 4.0);

// f = |a - c_k|^2 / 2 + lambda |a|^2 / 2 with c_k in [0, 1]^d. Minimizer is
// mean(c) / (1 + lambda).
std::unique_ptr<SumObjective> make_quadratic(const Matrix& centres, double lambda = 0.0,
                                             double region_radius = 4.0);

}  // namespace qnewton
