#include "poa/path.hpp"

#include <algorithm>
#include <cmath>

#include "poa/error.hpp"

namespace poa {

std::vector<Vec2> densify(const std::vector<Vec2>& points, double max_step) {
  if (!(max_step > 0.0)) throw Error(ErrorCode::InvalidArgument, "densify: step must be positive");
  std::vector<Vec2> out;
  if (points.empty()) return out;
  out.push_back(points.front());
  for (std::size_t i = 1; i < points.size(); ++i) {
    const Vec2 a = out.back();
    const Vec2 b = points[i];
    const double len = distance(a, b);
    if (len == 0.0) continue;
    const int n = static_cast<int>(std::ceil(len / max_step - 1e-9));
    for (int k = 1; k < n; ++k) out.push_back(a + (static_cast<double>(k) / n) * (b - a));
    out.push_back(b);
  }
  return out;
}

Path2D path_from_points(const std::vector<Vec2>& points, double fallback_heading) {
  Path2D path;
  path.waypoints.reserve(points.size());
  double heading = fallback_heading;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i + 1 < points.size()) {
      const Vec2 d = points[i + 1] - points[i];
      if (d.x != 0.0 || d.y != 0.0) heading = std::atan2(d.y, d.x);
    }
    path.waypoints.emplace_back(points[i].x, points[i].y, heading);
  }
  return path;
}

Path2D resample(const Path2D& path, double step) {
  if (path.size() < 2) return path;
  std::vector<Vec2> pts;
  pts.reserve(path.size());
  for (const auto& w : path.waypoints) pts.push_back(w.position());
  // Cumulative arc length, then uniform stations along it.
  std::vector<double> s(pts.size(), 0.0);
  for (std::size_t i = 1; i < pts.size(); ++i) s[i] = s[i - 1] + distance(pts[i - 1], pts[i]);
  const double total = s.back();
  if (total == 0.0) return path_from_points({pts.front()}, path.front().theta());
  const int n = static_cast<int>(std::ceil(total / step - 1e-9));
  std::vector<Vec2> out;
  out.reserve(static_cast<std::size_t>(n) + 1);
  std::size_t seg = 1;
  for (int k = 0; k <= n; ++k) {
    const double target = total * k / n;
    while (seg + 1 < s.size() && s[seg] < target) ++seg;
    const double span = s[seg] - s[seg - 1];
    const double t = span > 0.0 ? std::clamp((target - s[seg - 1]) / span, 0.0, 1.0) : 0.0;
    out.push_back(pts[seg - 1] + t * (pts[seg] - pts[seg - 1]));
  }
  out.front() = pts.front();
  out.back() = pts.back();
  return path_from_points(out, path.front().theta());
}

double central_heading(const Path2D& path, std::size_t i) {
  const std::size_t n = path.size();
  if (n < 2) return n == 1 ? path[0].theta() : 0.0;
  const std::size_t lo = i == 0 ? 0 : i - 1;
  const std::size_t hi = i + 1 >= n ? n - 1 : i + 1;
  const Vec2 d = path[hi].position() - path[lo].position();
  if (d.x == 0.0 && d.y == 0.0) return path[i].theta();
  return std::atan2(d.y, d.x);
}

double path_length(const Path2D& path) {
  double total = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) {
    total += distance(path[i - 1].position(), path[i].position());
  }
  return total;
}

double path_length(const Path3D& path) {
  double total = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) {
    const auto& a = path[i - 1];
    const auto& b = path[i];
    total += std::sqrt((b.x() - a.x()) * (b.x() - a.x()) + (b.y() - a.y()) * (b.y() - a.y()) +
                       (b.z() - a.z()) * (b.z() - a.z()));
  }
  return total;
}

}  // namespace poa
