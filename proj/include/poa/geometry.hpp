#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <cstdint>

namespace poa {

/// Wraps an angle into (-pi, pi].
double normalize_angle(double a);

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2, Vec2) = default;
};

inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }

/// Planar pose. theta is kept in (-pi, pi] by every constructor and operation.
class Pose2D {
 public:
  Pose2D() = default;
  Pose2D(double x, double y, double theta = 0.0)
      : x_(x), y_(y), theta_(normalize_angle(theta)) {}

  double x() const { return x_; }
  double y() const { return y_; }
  double theta() const { return theta_; }
  Vec2 position() const { return {x_, y_}; }

  Pose2D with_theta(double theta) const { return {x_, y_, theta}; }
  Pose2D rotated(double dtheta) const { return {x_, y_, theta_ + dtheta}; }
  Pose2D translated(double dx, double dy) const { return {x_ + dx, y_ + dy, theta_}; }

  /// Unit vector along the heading and its left-hand perpendicular.
  Vec2 heading() const { return {std::cos(theta_), std::sin(theta_)}; }
  Vec2 left() const { return {-std::sin(theta_), std::cos(theta_)}; }

  friend bool operator==(const Pose2D&, const Pose2D&) = default;

 private:
  double x_ = 0.0;
  double y_ = 0.0;
  double theta_ = 0.0;
};

/// Spatial pose with yaw, pitch and roll, all wrapped into (-pi, pi].
class Pose3D {
 public:
  Pose3D() = default;
  Pose3D(double x, double y, double z, double yaw, double pitch = 0.0, double roll = 0.0)
      : x_(x), y_(y), z_(z),
        yaw_(normalize_angle(yaw)),
        pitch_(normalize_angle(pitch)),
        roll_(normalize_angle(roll)) {}

  double x() const { return x_; }
  double y() const { return y_; }
  double z() const { return z_; }
  double yaw() const { return yaw_; }
  double pitch() const { return pitch_; }
  double roll() const { return roll_; }

  Pose2D planar() const { return {x_, y_, yaw_}; }
  Pose3D with_attitude(double roll, double pitch) const {
    return {x_, y_, z_, yaw_, pitch, roll};
  }

  friend bool operator==(const Pose3D&, const Pose3D&) = default;

 private:
  double x_ = 0.0, y_ = 0.0, z_ = 0.0;
  double yaw_ = 0.0, pitch_ = 0.0, roll_ = 0.0;
};

struct Ellipse2D {
  Vec2 center;
  double semi_major = 0.0;
  double semi_minor = 0.0;
  double orientation = 0.0;  // direction of the major axis

  /// Implicit function value; <= 1 inside or on the boundary.
  double implicit(Vec2 p) const;
};

/// Physical dimensions of the two-wheeled robot.
struct RobotGeometry {
  double track_width = 0.60;
  double wheel_ellipse_a = 0.30;  // along heading
  double wheel_ellipse_b = 0.12;  // lateral
  double clearance_height = 0.28;
  double clearance_width = 0.26;
  double turn_radius_min = 0.40;
  double wheel_base_contact = 0.30;

  /// Throws InvalidArgument when a dimension is non-positive or a passable
  /// obstacle of maximal width would not fit between the wheel ellipses.
  void validate() const;

  /// Lateral clearance from the body centreline to the outer wheel edge.
  double half_width() const { return track_width / 2.0 + wheel_ellipse_b; }
};

}  // namespace poa
