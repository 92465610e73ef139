#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "poa/grid.hpp"
#include "poa/path.hpp"
#include "poa/repair.hpp"
#include "poa/scenario.hpp"

namespace poa {

struct SpeedModel {
  double v_nominal = 0.12;        // m/s
  double v_over_passable = 0.06;  // m/s while the footprint overlaps a passable cell
  double v_turn_scale = 0.8;      // applied where curvature exceeds 1 / (2 * turn radius)

  void validate() const;
};

/// Wheel ellipses plus the body rectangle between the wheel centres.
bool footprint_overlaps(const Pose2D& pose, const OccupancyGrid& grid, const RobotGeometry& geom);

/// Seconds to drive the path. The path is resampled at 0.1 m; each piece is
/// driven at v_over_passable if the footprint at its midpoint overlaps an
/// occupied passable cell, otherwise at v_nominal, scaled down on sharp turns.
/// Curvature is the heading change across a 0.4 m arc window, so it does not
/// depend on how densely the path was sampled.
double simulate_traversal(const Path2D& path, const OccupancyGrid& passable_grid, const RobotGeometry& geom,
                          const SpeedModel& speed);

struct PlannerVariant {
  PlannerKind kind = PlannerKind::AStar;
  bool poa = false;

  std::string name() const;  // "astar", "astar+poa", ...
  friend bool operator==(const PlannerVariant&, const PlannerVariant&) = default;
};

PlannerVariant parse_planner_variant(std::string_view name);
/// gvd, astar, rrt_star, gvd+poa, astar+poa, rrt_star+poa.
std::vector<PlannerVariant> default_variants();

struct MissionOptions {
  int rrt_runs = 10;  // RRT* variants keep the shortest of this many seeds per leg
  SpeedModel speed;
};

struct LegPlan {
  Path2D path;
  std::vector<Splice> splices;  // empty for plain variants
  std::size_t residual = 0;     // hazardous waypoints left unrepaired
};

/// Plans one leg. Plain variants plan on the union of both grids; POA
/// variants plan on the unpassable grid and repair. RRT* variants keep the
/// shortest of rrt_runs seeds. Returns nothing when no run finds a path.
std::optional<LegPlan> plan_leg(const World& world, const PlannerVariant& variant, const Pose2D& from,
                                const Pose2D& to, const MissionOptions& options);

/// Plans every leg independently. Plain variants plan on the union of both
/// grids; POA variants plan on the unpassable grid and repair. Leg failures
/// are recorded, not thrown.
MissionResult run_mission(const World& world, const PlannerVariant& variant, const MissionOptions& options);

struct BenchmarkConfig {
  std::vector<ScenarioSpec> specs;
  std::vector<PlannerVariant> planners = default_variants();
  int repeats = 1;              // seeds spec.seed, spec.seed + 1, ...
  MissionOptions mission;
  unsigned jobs = 1;            // worker threads
};

struct BenchmarkRow {
  std::string setup;
  std::string planner;
  std::uint64_t seed = 0;
  int leg = 0;  // 1-based
  double distance_m = 0.0;
  double time_s = 0.0;
  bool ok = false;
};

struct SummaryRow {
  std::string setup;
  std::string planner;
  int runs = 0;
  int failures = 0;
  double mean_distance = 0.0;  // over successful missions
  double min_distance = 0.0;
  double mean_time = 0.0;

  double failure_rate() const { return runs > 0 ? static_cast<double>(failures) / runs : 0.0; }
};

struct BenchmarkResult {
  std::vector<BenchmarkRow> rows;       // ordered by (setup, seed, planner, leg)
  std::vector<SummaryRow> summary;      // ordered by (setup, planner)
  std::vector<MissionResult> missions;  // aligned with (setup, seed, planner)
};

BenchmarkResult run_benchmark(const BenchmarkConfig& config);

/// Header `setup,planner,seed,leg,distance_m,time_s,status`; failed legs have
/// empty numeric fields and status FAILURE.
void write_results_csv(std::ostream& out, const std::vector<BenchmarkRow>& rows);

/// One line per (setup, planner).
void write_summary(std::ostream& out, const std::vector<SummaryRow>& summary);

/// Planners as rows, setups as column pairs of distance and time.
void write_table(std::ostream& out, const std::vector<SummaryRow>& summary);

}  // namespace poa
