#include <algorithm>
#include <cmath>
#include <queue>

#include "poa/error.hpp"
#include "poa/planners.hpp"
#include "planners_detail.hpp"

namespace poa {

namespace {

// Closed segment against the closed axis-aligned box (Liang-Barsky).
bool segment_touches_box(Vec2 a, Vec2 b, Vec2 lo, Vec2 hi) {
  double t0 = 0.0, t1 = 1.0;
  const double d[2] = {b.x - a.x, b.y - a.y};
  const double p0[2] = {a.x, a.y};
  const double mn[2] = {lo.x, lo.y};
  const double mx[2] = {hi.x, hi.y};
  for (int k = 0; k < 2; ++k) {
    if (d[k] == 0.0) {
      if (p0[k] < mn[k] || p0[k] > mx[k]) return false;
      continue;
    }
    double ta = (mn[k] - p0[k]) / d[k];
    double tb = (mx[k] - p0[k]) / d[k];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return false;
  }
  return true;
}

}  // namespace

bool segment_free(const OccupancyGrid& grid, Vec2 a, Vec2 b) {
  const auto& g = grid.geometry();
  if (!g.try_world_to_cell(a) || !g.try_world_to_cell(b)) return false;
  const double res = g.resolution;
  const int c0 = std::max(0, static_cast<int>(std::floor((std::min(a.x, b.x) - g.origin.x) / res)) - 1);
  const int c1 = std::min(g.width - 1, static_cast<int>(std::floor((std::max(a.x, b.x) - g.origin.x) / res)) + 1);
  const int r0 = std::max(0, static_cast<int>(std::floor((std::min(a.y, b.y) - g.origin.y) / res)) - 1);
  const int r1 = std::min(g.height - 1, static_cast<int>(std::floor((std::max(a.y, b.y) - g.origin.y) / res)) + 1);
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) {
      if (!grid.occupied({c, r})) continue;
      const Vec2 lo = g.cell_min_corner({c, r});
      if (segment_touches_box(a, b, lo, lo + Vec2{res, res})) return false;
    }
  }
  return true;
}

std::optional<CellPath> grid_search(const GridGeometry& g, const std::vector<std::uint8_t>& node_ok,
                                    const std::vector<std::uint8_t>& blocked, CellIndex start, CellIndex goal) {
  constexpr double kSqrt2 = std::numbers::sqrt2;
  const double res = g.resolution;
  const std::size_t n = g.size();
  const std::size_t s = g.index(start);
  const std::size_t t = g.index(goal);
  if (!node_ok[s] || !node_ok[t]) return std::nullopt;

  auto heuristic = [&](CellIndex c) {
    const double dx = std::abs(c.col - goal.col);
    const double dy = std::abs(c.row - goal.row);
    return res * ((kSqrt2 - 1.0) * std::min(dx, dy) + std::max(dx, dy));
  };

  std::vector<double> g_cost(n, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> parent(n, n);
  std::vector<std::uint8_t> closed(n, 0);
  // (f, h, index): ties prefer smaller h, then smaller index, for determinism.
  using Entry = std::tuple<double, double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  g_cost[s] = 0.0;
  open.emplace(heuristic(start), heuristic(start), s);

  static constexpr int kDx[8] = {1, -1, 0, 0, 1, 1, -1, -1};
  static constexpr int kDy[8] = {0, 0, 1, -1, 1, -1, 1, -1};
  while (!open.empty()) {
    const auto [f, h, i] = open.top();
    open.pop();
    if (closed[i]) continue;
    closed[i] = 1;
    if (i == t) break;
    const CellIndex c = g.cell_of(i);
    for (int k = 0; k < 8; ++k) {
      const CellIndex nb{c.col + kDx[k], c.row + kDy[k]};
      if (!g.in_bounds(nb)) continue;
      const std::size_t j = g.index(nb);
      if (!node_ok[j] || closed[j]) continue;
      const bool diagonal = k >= 4;
      if (diagonal && (blocked[g.index({c.col + kDx[k], c.row})] || blocked[g.index({c.col, c.row + kDy[k]})])) {
        continue;
      }
      const double cand = g_cost[i] + (diagonal ? kSqrt2 * res : res);
      if (cand < g_cost[j]) {
        g_cost[j] = cand;
        parent[j] = i;
        const double hj = heuristic(nb);
        open.emplace(cand + hj, hj, j);
      }
    }
  }
  if (!closed[t]) return std::nullopt;
  CellPath out;
  out.cost = g_cost[t];
  for (std::size_t i = t; i != n; i = parent[i]) out.cells.push_back(g.cell_of(i));
  std::reverse(out.cells.begin(), out.cells.end());
  return out;
}

namespace detail {

CellIndex endpoint_cell(const OccupancyGrid& grid, const Pose2D& p, const char* which) {
  const auto cell = grid.geometry().try_world_to_cell(p.position());
  if (!cell) throw Error(ErrorCode::InvalidEndpoint, std::string(which) + " lies outside the grid");
  if (grid.occupied(*cell)) throw Error(ErrorCode::InvalidEndpoint, std::string(which) + " lies on an occupied cell");
  return *cell;
}

Path2D finish_path(const OccupancyGrid& grid, std::vector<Vec2> points) {
  return path_from_points(densify(points, grid.resolution()));
}

std::vector<std::uint8_t> occupied_mask(const OccupancyGrid& grid) {
  std::vector<std::uint8_t> m(grid.geometry().size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = grid.at(i) == CellState::Occupied;
  return m;
}

}  // namespace detail

Path2D plan_astar(const OccupancyGrid& grid, const Pose2D& start, const Pose2D& goal) {
  const CellIndex s = detail::endpoint_cell(grid, start, "start");
  const CellIndex t = detail::endpoint_cell(grid, goal, "goal");
  const auto blocked = detail::occupied_mask(grid);
  std::vector<std::uint8_t> ok(blocked.size());
  for (std::size_t i = 0; i < ok.size(); ++i) ok[i] = !blocked[i];
  const auto found = grid_search(grid.geometry(), ok, blocked, s, t);
  if (!found) throw Error(ErrorCode::NoPath, "A*: goal unreachable");

  std::vector<Vec2> pts{start.position()};
  for (std::size_t k = 1; k + 1 < found->cells.size(); ++k) {
    pts.push_back(grid.geometry().cell_center(found->cells[k]));
  }
  pts.push_back(goal.position());
  return detail::finish_path(grid, std::move(pts));
}

}  // namespace poa
