#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "qnewton/numerics.hpp"

namespace qnewton {

// Regression data with every explanatory and objective value in [0, 1].
// Rows are data points, columns are explanatory variables.
class Dataset {
 public:
  Dataset(Matrix x, Vector y);

  const Matrix& x() const noexcept { return x_; }
  const Vector& y() const noexcept { return y_; }
  std::size_t n_data() const noexcept { return x_.rows(); }
  std::size_t dim() const noexcept { return x_.cols(); }

  // x_k^(i), zero-based.
  double feature(std::size_t k, std::size_t i) const noexcept { return x_(k, i); }
  double target(std::size_t k) const noexcept { return y_[k]; }

 private:
  Matrix x_;
  Vector y_;
};

struct ScaleBounds {
  double lower = 0.0;
  double upper = 1.0;
};

// (v - L) / (U - L) per column and for y, clipped to [0, 1].
// Throws DegenerateBounds if any U <= L.
Dataset rescale(const Matrix& raw_x, const Vector& raw_y, std::span<const ScaleBounds> x_bounds,
                ScaleBounds y_bounds);

double rescale_value(double v, ScaleBounds b);

}  // namespace qnewton
