#pragma once

#include <array>
#include <vector>

namespace poa {

/// Smoothing thin-plate spline z = f(x, y) with an affine polynomial part.
/// Planes are reproduced exactly regardless of smoothing.
class ThinPlateSpline {
 public:
  ThinPlateSpline() = default;

  /// Fits centres (x, y, z). Needs at least three non-collinear centres.
  ThinPlateSpline(const std::vector<std::array<double, 3>>& centres, double smoothing);

  double operator()(double x, double y) const;
  std::size_t centre_count() const { return cx_.size(); }

 private:
  std::vector<double> cx_, cy_, w_;
  double a0_ = 0.0, ax_ = 0.0, ay_ = 0.0;
  double mx_ = 0.0, my_ = 0.0;  // centring offset for conditioning
};

}  // namespace poa
