#include "poa/grid.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "poa/error.hpp"

namespace poa {

void GridGeometry::validate() const {
  if (!(resolution > 0.0) || width <= 0 || height <= 0) {
    throw Error(ErrorCode::InvalidArgument, "grid geometry: resolution and dimensions must be positive");
  }
}

std::optional<CellIndex> GridGeometry::try_world_to_cell(Vec2 p) const {
  const double fx = std::floor((p.x - origin.x) / resolution);
  const double fy = std::floor((p.y - origin.y) / resolution);
  if (!(fx >= 0.0 && fy >= 0.0 && fx < width && fy < height)) return std::nullopt;
  return CellIndex{static_cast<int>(fx), static_cast<int>(fy)};
}

CellIndex GridGeometry::world_to_cell(Vec2 p) const {
  if (auto c = try_world_to_cell(p)) return *c;
  throw Error(ErrorCode::OutOfBounds, "point lies outside the grid extent");
}

Vec2 GridGeometry::cell_center(CellIndex c) const {
  return {origin.x + (c.col + 0.5) * resolution, origin.y + (c.row + 0.5) * resolution};
}

Vec2 GridGeometry::cell_min_corner(CellIndex c) const {
  return {origin.x + c.col * resolution, origin.y + c.row * resolution};
}

OccupancyGrid::OccupancyGrid(GridGeometry geometry, CellState fill)
    : geometry_(geometry),
      cells_(std::make_shared<std::vector<CellState>>(geometry.size(), fill)) {
  geometry_.validate();
}

void OccupancyGrid::detach() {
  if (cells_.use_count() > 1) cells_ = std::make_shared<std::vector<CellState>>(*cells_);
}

void OccupancyGrid::set(CellIndex c, CellState s) { set(geometry_.index(c), s); }

void OccupancyGrid::set(std::size_t idx, CellState s) {
  if ((*cells_)[idx] == s) return;
  detach();
  (*cells_)[idx] = s;
}

bool OccupancyGrid::occupied_at(Vec2 p) const {
  const auto c = geometry_.try_world_to_cell(p);
  return !c || occupied(*c);
}

std::size_t OccupancyGrid::count(CellState s) const {
  return static_cast<std::size_t>(std::count(cells_->begin(), cells_->end(), s));
}

LogOddsGrid::LogOddsGrid(GridGeometry geometry)
    : geometry_(geometry),
      sum_(geometry.size(), 0.0),
      compensation_(geometry.size(), 0.0),
      updates_(geometry.size(), 0) {
  geometry_.validate();
}

void LogOddsGrid::add(CellIndex c, double delta) {
  // Neumaier summation.
  const std::size_t i = geometry_.index(c);
  const double t = sum_[i] + delta;
  if (std::abs(sum_[i]) >= std::abs(delta)) {
    compensation_[i] += (sum_[i] - t) + delta;
  } else {
    compensation_[i] += (delta - t) + sum_[i];
  }
  sum_[i] = t;
  ++updates_[i];
}

void LogOddsGrid::set(CellIndex c, double value) {
  const std::size_t i = geometry_.index(c);
  sum_[i] = value;
  compensation_[i] = 0.0;
  updates_[i] = std::max<std::uint32_t>(updates_[i], 1);
}

OccupancyGrid merge_occupied(const OccupancyGrid& a, const OccupancyGrid& b) {
  if (!(a.geometry() == b.geometry())) {
    throw Error(ErrorCode::GeometryMismatch, "merge_occupied: grids differ in geometry");
  }
  OccupancyGrid out = a;
  for (std::size_t i = 0; i < a.geometry().size(); ++i) {
    if (b.at(i) == CellState::Occupied) {
      out.set(i, CellState::Occupied);
    } else if (a.at(i) == CellState::Unknown && b.at(i) == CellState::Free) {
      out.set(i, CellState::Free);
    }
  }
  return out;
}

namespace {

double point_segment_distance_sq(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const Vec2 ap = p - a;
  const double len_sq = ab.x * ab.x + ab.y * ab.y;
  double t = len_sq > 0.0 ? (ap.x * ab.x + ap.y * ab.y) / len_sq : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const Vec2 q = a + t * ab;
  const Vec2 d = p - q;
  return d.x * d.x + d.y * d.y;
}

}  // namespace

bool ellipse_overlaps_cell(const Ellipse2D& e, const GridGeometry& grid, CellIndex cell) {
  // Map the ellipse onto the unit disk; the cell square becomes a
  // parallelogram and the test reduces to disk/convex-polygon intersection.
  const Vec2 lo = grid.cell_min_corner(cell);
  const double r = grid.resolution;
  const std::array<Vec2, 4> corners{Vec2{lo.x, lo.y}, Vec2{lo.x + r, lo.y}, Vec2{lo.x + r, lo.y + r},
                                    Vec2{lo.x, lo.y + r}};
  const double c = std::cos(e.orientation);
  const double s = std::sin(e.orientation);
  std::array<Vec2, 4> q;
  for (std::size_t i = 0; i < 4; ++i) {
    const Vec2 d = corners[i] - e.center;
    q[i] = {(c * d.x + s * d.y) / e.semi_major, (-s * d.x + c * d.y) / e.semi_minor};
  }
  // Origin inside the (counter-clockwise) parallelogram?
  bool inside = true;
  for (std::size_t i = 0; i < 4 && inside; ++i) {
    const Vec2 a = q[i];
    const Vec2 b = q[(i + 1) % 4];
    const double cross = (b.x - a.x) * (-a.y) - (b.y - a.y) * (-a.x);
    if (cross < 0.0) inside = false;
  }
  if (inside) return true;
  constexpr double kTolerance = 1e-12;
  for (std::size_t i = 0; i < 4; ++i) {
    if (point_segment_distance_sq({0.0, 0.0}, q[i], q[(i + 1) % 4]) <= 1.0 + kTolerance) return true;
  }
  return false;
}

bool ellipse_hits_occupied(const Ellipse2D& e, const OccupancyGrid& grid, std::optional<CellIndex>* hit) {
  const auto& g = grid.geometry();
  const double c = std::cos(e.orientation);
  const double s = std::sin(e.orientation);
  const double hx = std::hypot(e.semi_major * c, e.semi_minor * s);
  const double hy = std::hypot(e.semi_major * s, e.semi_minor * c);
  const double res = g.resolution;
  const int c0 = std::max(0, static_cast<int>(std::floor((e.center.x - hx - g.origin.x) / res - 1e-9)));
  const int c1 = std::min(g.width - 1, static_cast<int>(std::floor((e.center.x + hx - g.origin.x) / res + 1e-9)));
  const int r0 = std::max(0, static_cast<int>(std::floor((e.center.y - hy - g.origin.y) / res - 1e-9)));
  const int r1 = std::min(g.height - 1, static_cast<int>(std::floor((e.center.y + hy - g.origin.y) / res + 1e-9)));
  // Exact test only for occupied cells inside the bounding box.
  for (int r = r0; r <= r1; ++r) {
    for (int col = c0; col <= c1; ++col) {
      const CellIndex cell{col, r};
      if (grid.occupied(cell) && ellipse_overlaps_cell(e, g, cell)) {
        if (hit) *hit = cell;
        return true;
      }
    }
  }
  return false;
}

}  // namespace poa
