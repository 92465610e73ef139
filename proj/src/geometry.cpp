#include "poa/geometry.hpp"

#include "poa/error.hpp"

namespace poa {

double normalize_angle(double a) {
  constexpr double pi = std::numbers::pi;
  if (a > -pi && a <= pi) return a;
  a = std::fmod(a + pi, 2.0 * pi);
  if (a <= 0.0) a += 2.0 * pi;
  return a - pi;
}

double Ellipse2D::implicit(Vec2 p) const {
  const double c = std::cos(orientation);
  const double s = std::sin(orientation);
  const Vec2 d = p - center;
  const double u = (c * d.x + s * d.y) / semi_major;
  const double v = (-s * d.x + c * d.y) / semi_minor;
  return u * u + v * v;
}

void RobotGeometry::validate() const {
  if (track_width <= 0 || wheel_ellipse_a <= 0 || wheel_ellipse_b <= 0 || clearance_height <= 0 ||
      clearance_width <= 0 || turn_radius_min <= 0 || wheel_base_contact <= 0) {
    throw Error(ErrorCode::InvalidArgument, "robot geometry: all dimensions must be positive");
  }
  if (!(clearance_width < track_width - 2.0 * wheel_ellipse_b)) {
    throw Error(ErrorCode::InvalidArgument,
                "robot geometry: clearance width must fit between the wheel ellipses");
  }
}

}  // namespace poa
