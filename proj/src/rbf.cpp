#include "poa/rbf.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "poa/error.hpp"

namespace poa {

namespace {

inline double tps_kernel(double r2) { return r2 > 0.0 ? 0.5 * r2 * std::log(r2) : 0.0; }  // r^2 log r

}  // namespace

ThinPlateSpline::ThinPlateSpline(const std::vector<std::array<double, 3>>& centres, double smoothing) {
  const auto n = static_cast<Eigen::Index>(centres.size());
  if (n < 3) throw Error(ErrorCode::DegenerateSurface, "thin-plate spline needs at least three centres");
  for (const auto& c : centres) {
    mx_ += c[0];
    my_ += c[1];
  }
  mx_ /= static_cast<double>(n);
  my_ /= static_cast<double>(n);
  cx_.resize(centres.size());
  cy_.resize(centres.size());
  for (std::size_t i = 0; i < centres.size(); ++i) {
    cx_[i] = centres[i][0] - mx_;
    cy_[i] = centres[i][1] - my_;
  }
  // The affine part needs the centres to span the plane.
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < centres.size(); ++i) {
    sxx += cx_[i] * cx_[i];
    sxy += cx_[i] * cy_[i];
    syy += cy_[i] * cy_[i];
  }
  if (sxx * syy - sxy * sxy <= 1e-12 * (sxx + syy) * (sxx + syy)) {
    throw Error(ErrorCode::DegenerateSurface, "thin-plate spline centres are collinear");
  }

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n + 3, n + 3);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 3);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    for (Eigen::Index j = 0; j < i; ++j) {
      const auto uj = static_cast<std::size_t>(j);
      const double dx = cx_[ui] - cx_[uj];
      const double dy = cy_[ui] - cy_[uj];
      const double k = tps_kernel(dx * dx + dy * dy);
      A(i, j) = k;
      A(j, i) = k;
    }
    A(i, i) = smoothing;
    A(i, n) = 1.0;
    A(i, n + 1) = cx_[ui];
    A(i, n + 2) = cy_[ui];
    A(n, i) = 1.0;
    A(n + 1, i) = cx_[ui];
    A(n + 2, i) = cy_[ui];
    rhs(i) = centres[ui][2];
  }
  const Eigen::VectorXd sol = A.partialPivLu().solve(rhs);
  if (!sol.allFinite()) throw Error(ErrorCode::DegenerateSurface, "thin-plate spline system is singular");
  w_.assign(sol.data(), sol.data() + n);
  a0_ = sol(n);
  ax_ = sol(n + 1);
  ay_ = sol(n + 2);
}

double ThinPlateSpline::operator()(double x, double y) const {
  x -= mx_;
  y -= my_;
  double z = a0_ + ax_ * x + ay_ * y;
  for (std::size_t i = 0; i < w_.size(); ++i) {
    const double dx = x - cx_[i];
    const double dy = y - cy_[i];
    z += w_[i] * tps_kernel(dx * dx + dy * dy);
  }
  return z;
}

}  // namespace poa
