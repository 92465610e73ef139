#pragma once

#include <algorithm>
#include <cmath>

namespace poa {

template <typename Visitor>
void for_each_cell_overlapping(const Ellipse2D& e, const GridGeometry& grid, Visitor&& visit) {
  // Axis-aligned bounding box of a rotated ellipse.
  const double c = std::cos(e.orientation);
  const double s = std::sin(e.orientation);
  const double hx = std::hypot(e.semi_major * c, e.semi_minor * s);
  const double hy = std::hypot(e.semi_major * s, e.semi_minor * c);
  const double res = grid.resolution;
  const int c0 = std::max(0, static_cast<int>(std::floor((e.center.x - hx - grid.origin.x) / res - 1e-9)));
  const int c1 = std::min(grid.width - 1, static_cast<int>(std::floor((e.center.x + hx - grid.origin.x) / res + 1e-9)));
  const int r0 = std::max(0, static_cast<int>(std::floor((e.center.y - hy - grid.origin.y) / res - 1e-9)));
  const int r1 = std::min(grid.height - 1, static_cast<int>(std::floor((e.center.y + hy - grid.origin.y) / res + 1e-9)));
  for (int r = r0; r <= r1; ++r) {
    for (int col = c0; col <= c1; ++col) {
      const CellIndex cell{col, r};
      if (ellipse_overlaps_cell(e, grid, cell)) visit(cell);
    }
  }
}

}  // namespace poa
