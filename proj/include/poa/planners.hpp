#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "poa/geometry.hpp"
#include "poa/grid.hpp"
#include "poa/path.hpp"

namespace poa {

// Baseline global planners. Occupied cells are obstacles; free and unknown
// cells are traversable. All planners throw InvalidEndpoint when start or
// goal is off the grid or on an occupied cell, and NoPath when the goal
// cannot be reached. Returned paths start at `start`, end at `goal`, and are
// densified to at most one cell of spacing.

struct CellPath {
  std::vector<CellIndex> cells;
  double cost = 0.0;  // metres along cell centres
};

/// 8-connected A* with octile heuristic over `node_ok` cells. A diagonal move
/// is only allowed when neither orthogonal neighbour is `blocked`.
std::optional<CellPath> grid_search(const GridGeometry& geometry, const std::vector<std::uint8_t>& node_ok,
                                    const std::vector<std::uint8_t>& blocked, CellIndex start, CellIndex goal);

Path2D plan_astar(const OccupancyGrid& grid, const Pose2D& start, const Pose2D& goal);

struct RrtParams {
  int max_iterations = 20000;
  double step_size = 0.5;
  double goal_bias = 0.05;
  double rewire_radius = 1.0;
  std::uint64_t rng_seed = 1;

  void validate() const;
};

Path2D plan_rrt_star(const OccupancyGrid& grid, const Pose2D& start, const Pose2D& goal, const RrtParams& params);

struct GvdParams {
  double min_clearance = 0.42;  // metres from a ridge point to the nearest obstacle edge

  static GvdParams for_robot(const RobotGeometry& geom) { return {geom.half_width()}; }
};

/// Brushfire distance field and Voronoi ridge of an occupancy grid. The four
/// map borders act as obstacle sites of their own. A cell is on the ridge when
/// an orthogonal neighbour has a different nearest site; its ridge point is
/// the best of its centre and the midpoints of those shared edges, so a
/// corridor two cells wide keeps its true midline clearance.
struct VoronoiMap {
  GridGeometry geometry;
  std::vector<double> clearance;        // metres, cell centre to nearest obstacle edge
  std::vector<int> site;                // id of the nearest obstacle component or border
  std::vector<std::uint8_t> ridge;      // 1 where the cell lies on the pruned GVD
  std::vector<Vec2> ridge_point;        // valid where ridge is set
  std::vector<double> ridge_clearance;  // exact clearance of ridge_point, capped
};

VoronoiMap build_voronoi(const OccupancyGrid& grid, const GvdParams& params);

Path2D plan_gvd(const OccupancyGrid& grid, const Pose2D& start, const Pose2D& goal, const GvdParams& params);

/// True when the closed segment touches no occupied cell (cells are closed
/// squares, so passing exactly through a shared corner counts as touching).
/// Endpoints off the grid are blocked.
bool segment_free(const OccupancyGrid& grid, Vec2 a, Vec2 b);

}  // namespace poa
