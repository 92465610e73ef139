#pragma once

#include <vector>

#include "poa/geometry.hpp"

namespace poa {

struct Path2D {
  std::vector<Pose2D> waypoints;

  bool empty() const { return waypoints.empty(); }
  std::size_t size() const { return waypoints.size(); }
  const Pose2D& operator[](std::size_t i) const { return waypoints[i]; }
  const Pose2D& front() const { return waypoints.front(); }
  const Pose2D& back() const { return waypoints.back(); }

  friend bool operator==(const Path2D&, const Path2D&) = default;
};

struct Path3D {
  std::vector<Pose3D> waypoints;

  bool empty() const { return waypoints.empty(); }
  std::size_t size() const { return waypoints.size(); }
  const Pose3D& operator[](std::size_t i) const { return waypoints[i]; }
};

/// Inserts evenly spaced points so that no segment is longer than max_step.
/// Consecutive duplicates are dropped.
std::vector<Vec2> densify(const std::vector<Vec2>& points, double max_step);

/// Builds a path whose headings follow the polyline: each waypoint faces the
/// next one and the last waypoint keeps the final segment's heading. A single
/// point gets `fallback_heading`.
Path2D path_from_points(const std::vector<Vec2>& points, double fallback_heading = 0.0);

/// Re-samples the polyline at uniform arc-length spacing <= step, keeping both endpoints.
Path2D resample(const Path2D& path, double step);

/// Heading at waypoint i by central difference of its neighbours (one-sided at the ends).
double central_heading(const Path2D& path, std::size_t i);

double path_length(const Path2D& path);
double path_length(const Path3D& path);

}  // namespace poa
