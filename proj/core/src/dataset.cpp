#include "qnewton/dataset.hpp"

#include <algorithm>
#include <string>

#include "qnewton/error.hpp"

namespace qnewton {

Dataset::Dataset(Matrix x, Vector y) : x_(std::move(x)), y_(std::move(y)) {
  if (x_.rows() != y_.size()) {
    throw Error(ErrorCode::kInvalidArgument, "design matrix has " + std::to_string(x_.rows()) +
                                                 " rows but objective has " +
                                                 std::to_string(y_.size()) + " entries");
  }
  for (double v : x_.values()) {
    if (v < 0.0 || v > 1.0) {
      throw Error(ErrorCode::kInvalidArgument, "explanatory values must lie in [0, 1]");
    }
  }
  for (double v : y_.values()) {
    if (v < 0.0 || v > 1.0) {
      throw Error(ErrorCode::kInvalidArgument, "objective values must lie in [0, 1]");
    }
  }
}

namespace {

void require_bounds(ScaleBounds b, const std::string& what) {
  if (!(b.upper > b.lower)) {
    throw Error(ErrorCode::kDegenerateBounds, "upper bound must exceed lower bound for " + what);
  }
}

}  // namespace

double rescale_value(double v, ScaleBounds b) {
  require_bounds(b, "value");
  return std::clamp((v - b.lower) / (b.upper - b.lower), 0.0, 1.0);
}

Dataset rescale(const Matrix& raw_x, const Vector& raw_y, std::span<const ScaleBounds> x_bounds,
                ScaleBounds y_bounds) {
  if (x_bounds.size() != raw_x.cols()) {
    throw Error(ErrorCode::kInvalidArgument, "need one bound pair per column");
  }
  for (std::size_t i = 0; i < x_bounds.size(); ++i) {
    require_bounds(x_bounds[i], "column " + std::to_string(i + 1));
  }
  require_bounds(y_bounds, "objective");

  std::vector<double> xs(raw_x.values().begin(), raw_x.values().end());
  for (std::size_t k = 0; k < raw_x.rows(); ++k) {
    for (std::size_t i = 0; i < raw_x.cols(); ++i) {
      double& v = xs[k * raw_x.cols() + i];
      v = rescale_value(v, x_bounds[i]);
    }
  }
  std::vector<double> ys(raw_y.values().begin(), raw_y.values().end());
  for (double& v : ys) v = rescale_value(v, y_bounds);
  return Dataset(Matrix(raw_x.rows(), raw_x.cols(), std::move(xs)), Vector(std::move(ys)));
}

}  // namespace qnewton
