#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <tuple>

#include "poa/error.hpp"
#include "poa/planners.hpp"
#include "planners_detail.hpp"

namespace poa {

namespace {

// Labels 8-connected occupied components 0..k-1; free cells get -1.
int label_components(const OccupancyGrid& grid, std::vector<int>& label) {
  const auto& g = grid.geometry();
  label.assign(g.size(), -1);
  int next = 0;
  std::vector<std::size_t> stack;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (grid.at(i) != CellState::Occupied || label[i] >= 0) continue;
    label[i] = next;
    stack.push_back(i);
    while (!stack.empty()) {
      const CellIndex c = g.cell_of(stack.back());
      stack.pop_back();
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const CellIndex nb{c.col + dx, c.row + dy};
          if (!g.in_bounds(nb)) continue;
          const std::size_t j = g.index(nb);
          if (grid.at(j) == CellState::Occupied && label[j] < 0) {
            label[j] = next;
            stack.push_back(j);
          }
        }
      }
    }
    ++next;
  }
  return next;
}

// Distance from p to the nearest occupied square or map border, capped at a
// value beyond `needed` plus one cell so the window search stays local.
double exact_clearance(const OccupancyGrid& grid, Vec2 p, double needed) {
  const auto& g = grid.geometry();
  const int reach = static_cast<int>(std::ceil(needed / g.resolution)) + 1;
  double best = reach * g.resolution;
  best = std::min({best, p.x - g.origin.x, g.origin.x + g.width * g.resolution - p.x, p.y - g.origin.y,
                   g.origin.y + g.height * g.resolution - p.y});
  const CellIndex home = g.world_to_cell(p);
  for (int dr = -reach; dr <= reach; ++dr) {
    for (int dc = -reach; dc <= reach; ++dc) {
      const CellIndex c{home.col + dc, home.row + dr};
      if (!g.in_bounds(c) || !grid.occupied(c)) continue;
      const Vec2 lo = g.cell_min_corner(c);
      const double dx = std::max({lo.x - p.x, 0.0, p.x - (lo.x + g.resolution)});
      const double dy = std::max({lo.y - p.y, 0.0, p.y - (lo.y + g.resolution)});
      best = std::min(best, std::hypot(dx, dy));
    }
  }
  return best;
}

}  // namespace

VoronoiMap build_voronoi(const OccupancyGrid& grid, const GvdParams& params) {
  const auto& g = grid.geometry();
  const double res = g.resolution;
  std::vector<int> component;
  const int n_components = label_components(grid, component);
  const int left = n_components, right = n_components + 1, bottom = n_components + 2, top = n_components + 3;

  // Brushfire: each cell keeps the lattice coordinate of its nearest obstacle
  // cell. Border sites are virtual cells just outside the raster.
  struct Seed {
    int ox, oy;
    int site;
  };
  std::vector<double> dist(g.size(), std::numeric_limits<double>::infinity());
  std::vector<Seed> nearest(g.size(), Seed{0, 0, -1});
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;

  auto offer = [&](std::size_t i, Seed s) {
    const CellIndex c = g.cell_of(i);
    const double d = res * std::hypot(c.col - s.ox, c.row - s.oy);
    if (d < dist[i] - 1e-12) {
      dist[i] = d;
      nearest[i] = s;
      queue.emplace(d, i);
    }
  };

  for (std::size_t i = 0; i < g.size(); ++i) {
    const CellIndex c = g.cell_of(i);
    if (component[i] >= 0) {
      offer(i, {c.col, c.row, component[i]});
      continue;
    }
    if (c.col == 0) offer(i, {-1, c.row, left});
    if (c.col == g.width - 1) offer(i, {g.width, c.row, right});
    if (c.row == 0) offer(i, {c.col, -1, bottom});
    if (c.row == g.height - 1) offer(i, {c.col, g.height, top});
  }
  while (!queue.empty()) {
    const auto [d, i] = queue.top();
    queue.pop();
    if (d > dist[i]) continue;
    const CellIndex c = g.cell_of(i);
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        const CellIndex nb{c.col + dx, c.row + dy};
        if (!g.in_bounds(nb)) continue;
        offer(g.index(nb), nearest[i]);
      }
    }
  }

  VoronoiMap out;
  out.geometry = g;
  out.clearance.resize(g.size());
  out.site.resize(g.size());
  out.ridge.assign(g.size(), 0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    out.clearance[i] = std::max(0.0, dist[i] - res / 2.0);
    out.site[i] = nearest[i].site;
  }
  out.ridge_point.assign(g.size(), Vec2{});
  out.ridge_clearance.assign(g.size(), 0.0);
  static constexpr int kDx[4] = {1, -1, 0, 0};
  static constexpr int kDy[4] = {0, 0, 1, -1};
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (component[i] >= 0) continue;
    const CellIndex c = g.cell_of(i);
    const Vec2 centre = g.cell_center(c);
    Vec2 best_point = centre;
    double best = -1.0;
    for (int k = 0; k < 4; ++k) {
      const CellIndex nb{c.col + kDx[k], c.row + kDy[k]};
      if (!g.in_bounds(nb)) continue;
      const std::size_t j = g.index(nb);
      if (component[j] >= 0 || out.site[j] == out.site[i]) continue;
      if (best < 0.0) {
        best = exact_clearance(grid, centre, params.min_clearance);
        best_point = centre;
      }
      const Vec2 edge = 0.5 * (centre + g.cell_center(nb));
      const double e = exact_clearance(grid, edge, params.min_clearance);
      if (e > best) {
        best = e;
        best_point = edge;
      }
    }
    if (best < params.min_clearance) continue;
    out.ridge[i] = 1;
    out.ridge_point[i] = best_point;
    out.ridge_clearance[i] = best;
  }
  return out;
}

Path2D plan_gvd(const OccupancyGrid& grid, const Pose2D& start, const Pose2D& goal, const GvdParams& params) {
  detail::endpoint_cell(grid, start, "start");
  detail::endpoint_cell(grid, goal, "goal");
  const auto& g = grid.geometry();
  const VoronoiMap vor = build_voronoi(grid, params);

  std::vector<std::size_t> ridge_cells;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (vor.ridge[i]) ridge_cells.push_back(i);
  }
  if (ridge_cells.empty()) throw Error(ErrorCode::NoPath, "GVD: clearance filter removed every ridge cell");

  // Attach an endpoint to the closest ridge cell reachable in a straight line.
  auto attach = [&](Vec2 p) -> std::optional<CellIndex> {
    std::vector<std::pair<double, std::size_t>> order;
    order.reserve(ridge_cells.size());
    for (std::size_t i : ridge_cells) order.emplace_back(distance(p, vor.ridge_point[i]), i);
    std::sort(order.begin(), order.end());
    for (const auto& [d, i] : order) {
      if (segment_free(grid, p, vor.ridge_point[i])) return g.cell_of(i);
    }
    return std::nullopt;
  };
  const auto entry = attach(start.position());
  const auto exit = attach(goal.position());
  if (!entry || !exit) throw Error(ErrorCode::NoPath, "GVD: endpoint cannot reach the roadmap");

  const auto blocked = detail::occupied_mask(grid);
  const auto found = grid_search(g, vor.ridge, blocked, *entry, *exit);
  if (!found) throw Error(ErrorCode::NoPath, "GVD: roadmap is disconnected");

  // Ridge points off a cell centre sit on a shared edge with a free cell; if
  // the straight hop between two of them clips an obstacle, route through the
  // cell centres, which the search already connected.
  std::vector<Vec2> pts{start.position()};
  for (std::size_t k = 0; k < found->cells.size(); ++k) {
    const std::size_t i = g.index(found->cells[k]);
    const Vec2 p = vor.ridge_point[i];
    if (k > 0 && !segment_free(grid, pts.back(), p)) {
      pts.push_back(g.cell_center(found->cells[k - 1]));
      pts.push_back(g.cell_center(found->cells[k]));
    }
    pts.push_back(p);
  }
  pts.push_back(goal.position());
  return detail::finish_path(grid, std::move(pts));
}

}  // namespace poa
