#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "poa/geometry.hpp"

namespace poa {

struct CellIndex {
  int col = 0;
  int row = 0;
  friend bool operator==(CellIndex, CellIndex) = default;
};

enum class CellState : std::uint8_t { Free, Occupied, Unknown };

/// Axis-aligned raster geometry. Cell (c, r) covers the half-open box
/// [origin.x + c*res, origin.x + (c+1)*res) x [origin.y + r*res, origin.y + (r+1)*res).
struct GridGeometry {
  double resolution = 1.0;
  Vec2 origin;
  int width = 0;
  int height = 0;

  void validate() const;

  std::size_t size() const { return static_cast<std::size_t>(width) * height; }
  double extent_x() const { return width * resolution; }
  double extent_y() const { return height * resolution; }

  bool in_bounds(CellIndex c) const {
    return c.col >= 0 && c.row >= 0 && c.col < width && c.row < height;
  }
  std::size_t index(CellIndex c) const {
    return static_cast<std::size_t>(c.row) * width + c.col;
  }
  CellIndex cell_of(std::size_t idx) const {
    return {static_cast<int>(idx % width), static_cast<int>(idx / width)};
  }

  std::optional<CellIndex> try_world_to_cell(Vec2 p) const;
  /// Throws OutOfBounds when p lies outside the raster.
  CellIndex world_to_cell(Vec2 p) const;
  Vec2 cell_center(CellIndex c) const;
  Vec2 cell_min_corner(CellIndex c) const;

  friend bool operator==(const GridGeometry&, const GridGeometry&) = default;
};

/// Ternary occupancy raster. Copies share cell storage until one of them is
/// written, so snapshots handed to readers are cheap.
class OccupancyGrid {
 public:
  OccupancyGrid() = default;
  explicit OccupancyGrid(GridGeometry geometry, CellState fill = CellState::Unknown);

  const GridGeometry& geometry() const { return geometry_; }
  double resolution() const { return geometry_.resolution; }
  int width() const { return geometry_.width; }
  int height() const { return geometry_.height; }

  CellState at(CellIndex c) const { return (*cells_)[geometry_.index(c)]; }
  CellState at(std::size_t idx) const { return (*cells_)[idx]; }
  void set(CellIndex c, CellState s);
  void set(std::size_t idx, CellState s);

  bool occupied(CellIndex c) const { return at(c) == CellState::Occupied; }
  /// Out-of-bounds points count as blocked.
  bool occupied_at(Vec2 p) const;

  std::size_t count(CellState s) const;
  const std::vector<CellState>& cells() const { return *cells_; }

  friend bool operator==(const OccupancyGrid& a, const OccupancyGrid& b) {
    return a.geometry_ == b.geometry_ && *a.cells_ == *b.cells_;
  }

 private:
  void detach();

  GridGeometry geometry_;
  std::shared_ptr<std::vector<CellState>> cells_ = std::make_shared<std::vector<CellState>>();
};

/// Per-cell log-odds evidence with compensated accumulation so that the
/// result does not depend on the order of updates.
class LogOddsGrid {
 public:
  LogOddsGrid() = default;
  explicit LogOddsGrid(GridGeometry geometry);

  const GridGeometry& geometry() const { return geometry_; }

  double value(CellIndex c) const { return value(geometry_.index(c)); }
  double value(std::size_t idx) const { return sum_[idx] + compensation_[idx]; }
  bool observed(CellIndex c) const { return updates_[geometry_.index(c)] > 0; }
  bool observed(std::size_t idx) const { return updates_[idx] > 0; }
  std::uint32_t update_count(CellIndex c) const { return updates_[geometry_.index(c)]; }

  void add(CellIndex c, double delta);
  /// Overwrites a cell and marks it observed.
  void set(CellIndex c, double value);

 private:
  GridGeometry geometry_;
  std::vector<double> sum_;
  std::vector<double> compensation_;
  std::vector<std::uint32_t> updates_;
};

/// Cell-wise union of occupied cells; cells free in both stay free.
OccupancyGrid merge_occupied(const OccupancyGrid& a, const OccupancyGrid& b);

/// True iff some point of the cell's square lies inside or on the ellipse.
bool ellipse_overlaps_cell(const Ellipse2D& e, const GridGeometry& grid, CellIndex cell);

/// Visits every in-bounds cell overlapped by the ellipse.
template <typename Visitor>
void for_each_cell_overlapping(const Ellipse2D& e, const GridGeometry& grid, Visitor&& visit);

/// True iff the ellipse overlaps any occupied cell of the grid.
bool ellipse_hits_occupied(const Ellipse2D& e, const OccupancyGrid& grid,
                           std::optional<CellIndex>* hit = nullptr);

}  // namespace poa

#include "poa/grid_inl.hpp"
