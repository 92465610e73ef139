#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "poa/grid.hpp"
#include "poa/path.hpp"
#include "poa/planners.hpp"

namespace poa {

struct PoaParams {
  int n_skip = 3;            // stride between collision checks, in waypoints
  int n_clear = 10;          // waypoints removed on each side of a hazardous waypoint
  double shift_min = -0.6;   // lateral shift range of alternatives, metres
  double shift_max = 0.6;
  double shift_step = 0.05;
  double turn_radius = 0.4;  // Dubins radius of the splices
  double waypoint_spacing = 0.1;  // base paths are resampled to this before repair
  bool resume_after_window = true;  // false: resume n_skip after the hazard instead

  void validate() const;
  static PoaParams for_robot(const RobotGeometry& geom);
};

enum class Wheel { Left, Right };

struct CollisionReport {
  std::size_t waypoint_index = 0;
  Wheel wheel = Wheel::Left;
  CellIndex cell;
};

/// Collision ellipses of the left and right wheels (in that order).
std::pair<Ellipse2D, Ellipse2D> wheel_ellipses(const Pose2D& pose, const RobotGeometry& geom);

/// Reports a wheel overlapping an occupied passable cell. The corridor
/// between the wheels is not checked: passable obstacles fit under the body.
std::optional<CollisionReport> check_waypoint(const Pose2D& pose, const OccupancyGrid& passable_grid,
                                              const RobotGeometry& geom, std::size_t index = 0);

/// Laterally shifted copies of waypoint i, heading preserved, ordered by
/// |shift| ascending with the positive (left) shift first. Zero is excluded.
std::vector<Pose2D> generate_alternatives(const Path2D& path, std::size_t i, const PoaParams& params);

struct Splice {
  std::size_t hazard_index = 0;  // index in the path being scanned at the time
  Pose2D hazard;
  Pose2D alternative;
  double shift = 0.0;
  std::size_t start_anchor = 0;  // indices into the output path
  std::size_t end_anchor = 0;
};

struct RepairResult {
  Path2D path;
  std::vector<Splice> splices;
  std::vector<CollisionReport> residual;  // hazardous waypoints left unrepaired, indexed into `path`
};

/// Walks the path and replaces the neighbourhood of each hazardous waypoint
/// with two Dubins curves through the least-shifted safe alternative. The
/// endpoints of the path never move. Output is identical to the input when
/// nothing is spliced.
RepairResult repair_path(const Path2D& path, const OccupancyGrid& passable_grid, const OccupancyGrid& unpassable_grid,
                         const RobotGeometry& geom, const PoaParams& params);

enum class PlannerKind { AStar, RrtStar, Gvd };

std::string_view to_string(PlannerKind kind);
/// Parses "astar", "rrt_star" or "gvd".
PlannerKind parse_planner_kind(std::string_view name);

struct BasePlannerConfig {
  PlannerKind kind = PlannerKind::AStar;
  RrtParams rrt;
  GvdParams gvd;
};

Path2D plan_base(const BasePlannerConfig& config, const OccupancyGrid& grid, const Pose2D& start, const Pose2D& goal);

struct PoaPlan {
  PlannerKind base = PlannerKind::AStar;
  Path2D base_path;
  RepairResult repair;
  const Path2D& path() const { return repair.path; }
};

/// Runs the base planner on the unpassable grid only, then repairs the
/// result against the passable grid.
PoaPlan poa_plan(const BasePlannerConfig& config, const OccupancyGrid& passable_grid,
                 const OccupancyGrid& unpassable_grid, const Pose2D& start, const Pose2D& goal,
                 const RobotGeometry& geom, const PoaParams& params);

}  // namespace poa
