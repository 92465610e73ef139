#pragma once

// Independent reference implementations shared by the unit suites and the
// acceptance run. None of them calls the library code they check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <queue>
#include <string_view>
#include <utility>
#include <vector>

#include "poa/dubins.hpp"
#include "poa/geometry.hpp"
#include "poa/grid.hpp"
#include "poa/point_cloud.hpp"

namespace poa::oracle {

// Mapping formulas in long double.

inline long double probability(long n_s, long n_e, long double p, long double eps) {
  const long double raw = 0.5L + p * static_cast<long double>(n_s) - p * static_cast<long double>(n_e);
  return std::clamp(raw, eps, 1.0L - eps);
}
inline long double log_odds(long double q) { return std::log(q / (1.0L - q)); }
inline long double sigmoid(long double l) { return 1.0L / (1.0L + std::exp(-l)); }

// Dubins paths from turning-circle tangents.

namespace detail {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

inline double wrap(double a) {
  const double r = std::fmod(a, kTwoPi);
  return r < 0.0 ? r + kTwoPi : r;
}

inline double angle_of(Vec2 v) { return std::atan2(v.y, v.x); }

inline Vec2 left_centre(const Pose2D& p, double r) {
  return {p.x() - r * std::sin(p.theta()), p.y() + r * std::cos(p.theta())};
}
inline Vec2 right_centre(const Pose2D& p, double r) {
  return {p.x() + r * std::sin(p.theta()), p.y() - r * std::cos(p.theta())};
}

}  // namespace detail

/// Shortest Dubins length: outer and inner tangents for the CSC words, both
/// tangent middle circles for the CCC words.
inline double dubins_shortest_length(const Pose2D& s, const Pose2D& g, double r) {
  using namespace detail;
  const double t0 = s.theta(), tg = g.theta();
  double best = std::numeric_limits<double>::infinity();
  // LSL and RSR: outer tangent, heading along the centre line.
  {
    const Vec2 c1 = left_centre(s, r), c3 = left_centre(g, r);
    const double psi = distance(c1, c3) > 0.0 ? angle_of(c3 - c1) : t0;
    best = std::min(best, r * wrap(psi - t0) + distance(c1, c3) + r * wrap(tg - psi));
  }
  {
    const Vec2 c1 = right_centre(s, r), c3 = right_centre(g, r);
    const double psi = distance(c1, c3) > 0.0 ? angle_of(c3 - c1) : t0;
    best = std::min(best, r * wrap(t0 - psi) + distance(c1, c3) + r * wrap(psi - tg));
  }
  // LSR and RSL: inner tangent of length sqrt(D^2 - 4 r^2).
  {
    const Vec2 c1 = left_centre(s, r), c3 = right_centre(g, r);
    const double dd = distance(c1, c3);
    if (dd >= 2.0 * r) {
      const double d = std::sqrt(dd * dd - 4.0 * r * r);
      const double psi = angle_of(c3 - c1) + std::atan2(2.0 * r, d);
      best = std::min(best, r * wrap(psi - t0) + d + r * wrap(psi - tg));
    }
  }
  {
    const Vec2 c1 = right_centre(s, r), c3 = left_centre(g, r);
    const double dd = distance(c1, c3);
    if (dd >= 2.0 * r) {
      const double d = std::sqrt(dd * dd - 4.0 * r * r);
      const double psi = angle_of(c3 - c1) - std::atan2(2.0 * r, d);
      best = std::min(best, r * wrap(t0 - psi) + d + r * wrap(tg - psi));
    }
  }
  // LRL and RLR: middle circle tangent to both end circles.
  for (const bool left_outer : {true, false}) {
    const Vec2 c1 = left_outer ? left_centre(s, r) : right_centre(s, r);
    const Vec2 c3 = left_outer ? left_centre(g, r) : right_centre(g, r);
    const double dd = distance(c1, c3);
    if (dd > 4.0 * r || dd == 0.0) continue;
    const double base = angle_of(c3 - c1), phi = std::acos(dd / (4.0 * r));
    for (const double side : {-1.0, 1.0}) {
      const Vec2 c2 = c1 + 2.0 * r * Vec2{std::cos(base + side * phi), std::sin(base + side * phi)};
      const Vec2 t1 = 0.5 * (c1 + c2), t2 = 0.5 * (c2 + c3);
      const double turn = left_outer ? kPi / 2.0 : -kPi / 2.0;
      const double h1 = angle_of(t1 - c1) + turn, h2 = angle_of(t2 - c3) + turn;
      const double len = left_outer ? wrap(h1 - t0) + wrap(h1 - h2) + wrap(tg - h2)
                                    : wrap(t0 - h1) + wrap(h2 - h1) + wrap(h2 - tg);
      best = std::min(best, r * len);
    }
  }
  return best;
}

/// Drives a word segment by segment with small midpoint-heading steps.
inline Pose2D integrate(const DubinsPath& p) {
  const char* letters = nullptr;
  switch (p.word) {
    case DubinsWord::LSL: letters = "LSL"; break;
    case DubinsWord::RSR: letters = "RSR"; break;
    case DubinsWord::LSR: letters = "LSR"; break;
    case DubinsWord::RSL: letters = "RSL"; break;
    case DubinsWord::RLR: letters = "RLR"; break;
    case DubinsWord::LRL: letters = "LRL"; break;
  }
  double x = p.start.x(), y = p.start.y(), th = p.start.theta();
  for (int i = 0; i < 3; ++i) {
    const int n = 20000;
    const double ds = p.segment_lengths[i] / n;
    const double k = letters[i] == 'L' ? 1.0 / p.turn_radius : letters[i] == 'R' ? -1.0 / p.turn_radius : 0.0;
    for (int j = 0; j < n; ++j) {
      const double mid = th + 0.5 * k * ds;
      x += ds * std::cos(mid);
      y += ds * std::sin(mid);
      th += k * ds;
    }
  }
  return {x, y, th};
}

/// Same as integrate, with each segment driven by its exact arc formula.
inline Pose2D drive(const DubinsPath& p) {
  const std::string_view letters = to_string(p.word);
  double x = p.start.x(), y = p.start.y(), th = p.start.theta();
  for (int i = 0; i < 3; ++i) {
    const double len = p.segment_lengths[static_cast<std::size_t>(i)];
    if (letters[static_cast<std::size_t>(i)] == 'S') {
      x += len * std::cos(th);
      y += len * std::sin(th);
      continue;
    }
    const double k = (letters[static_cast<std::size_t>(i)] == 'L' ? 1.0 : -1.0) / p.turn_radius;
    const double end = th + k * len;
    x += (std::sin(end) - std::sin(th)) / k;
    y -= (std::cos(end) - std::cos(th)) / k;
    th = end;
  }
  return {x, y, th};
}

inline double pose_gap(const Pose2D& a, const Pose2D& b) {
  return std::max(distance(a.position(), b.position()), std::abs(normalize_angle(a.theta() - b.theta())));
}

/// Plain Dijkstra over the grid-search move set: 8-connected, diagonals
/// only past two free orthogonal neighbours.
inline double dijkstra_cost(const OccupancyGrid& grid, CellIndex s, CellIndex t) {
  const auto& g = grid.geometry();
  std::vector<double> dist(g.size(), std::numeric_limits<double>::infinity());
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> q;
  dist[g.index(s)] = 0.0;
  q.emplace(0.0, g.index(s));
  while (!q.empty()) {
    const auto [d, i] = q.top();
    q.pop();
    if (d > dist[i]) continue;
    const CellIndex c = g.cell_of(i);
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        const CellIndex n{c.col + dx, c.row + dy};
        if (!g.in_bounds(n) || grid.occupied(n)) continue;
        if (dx != 0 && dy != 0 && (grid.occupied({c.col + dx, c.row}) || grid.occupied({c.col, c.row + dy}))) continue;
        const double nd = d + g.resolution * ((dx != 0 && dy != 0) ? std::sqrt(2.0) : 1.0);
        if (nd < dist[g.index(n)]) {
          dist[g.index(n)] = nd;
          q.emplace(nd, g.index(n));
        }
      }
    }
  }
  return dist[g.index(t)];
}

/// Implicit ellipse value, written out independently of Ellipse2D.
inline double implicit_value(Vec2 c, double a, double b, double phi, Vec2 p) {
  const double dx = p.x - c.x, dy = p.y - c.y;
  const double u = std::cos(phi) * dx + std::sin(phi) * dy;
  const double v = -std::sin(phi) * dx + std::cos(phi) * dy;
  return (u / a) * (u / a) + (v / b) * (v / b);
}

/// Minimum implicit value over a 1 mm lattice covering the closed cell square.
/// Values in (1, 1.05] are too close to the boundary for the lattice to decide.
inline double sampled_min(const Ellipse2D& e, Vec2 lo, double res) {
  const int n = static_cast<int>(std::lround(res / 0.001));
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      const Vec2 p{lo.x + res * i / n, lo.y + res * j / n};
      best = std::min(best, implicit_value(e.center, e.semi_major, e.semi_minor, e.orientation, p));
    }
  }
  return best;
}

/// Index of the cloud point closest in (x, y) and its squared distance; the
/// smaller index wins ties.
inline std::pair<std::size_t, double> nearest_xy(const LabelledPointCloud& cloud, double x, double y) {
  std::size_t best = cloud.size();
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const double d = (cloud[i].x - x) * (cloud[i].x - x) + (cloud[i].y - y) * (cloud[i].y - y);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return {best, best_d};
}

/// Roll and pitch of a body resting on the plane z = a x + b y.
inline std::pair<double, double> plane_attitude(double a, double b, double heading) {
  const double pitch = std::atan(a * std::cos(heading) + b * std::sin(heading));
  const double roll = std::atan(-a * std::sin(heading) + b * std::cos(heading));
  return {roll, pitch};
}

}  // namespace poa::oracle
