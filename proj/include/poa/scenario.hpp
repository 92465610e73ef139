#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "poa/grid.hpp"
#include "poa/mapping.hpp"
#include "poa/planners.hpp"
#include "poa/point_cloud.hpp"
#include "poa/repair.hpp"
#include "poa/terrain.hpp"

namespace poa {

struct SizeRange {
  double min = 0.0;
  double max = 0.0;
};

/// Full footprint dimensions (not semi-axes) and cap height of a stone class.
struct StoneSizes {
  SizeRange width;
  SizeRange length;
  SizeRange height;
};

struct Bump {
  double x = 0.0;
  double y = 0.0;
  double amplitude = 0.0;
  double sigma = 1.0;
};

enum class TerrainKind { Flat, Heightfield };

struct HeightfieldSpec {
  int n_bumps = 12;
  SizeRange amplitude{-1.0, 1.0};
  SizeRange sigma{1.0, 3.0};
  std::vector<Bump> fixed_bumps;  // added on top of the random ones
};

/// chain: start -> w1 -> w2 ...; star: every leg starts at `start`.
enum class MissionMode { Chain, Star };

struct ScenarioSpec {
  std::string name = "custom";
  std::uint64_t seed = 1;
  double extent_x = 15.0;
  double extent_y = 15.0;
  double grid_resolution = 0.5;

  int n_passable = 0;
  int n_unpassable = 0;
  StoneSizes passable_size{{0.10, 0.26}, {0.20, 0.70}, {0.08, 0.28}};
  StoneSizes unpassable_size{{0.40, 1.00}, {0.40, 1.40}, {0.30, 0.80}};
  double endpoint_keepout = 0.9;   // stones stay this far from mission points
  double unpassable_gap = 1.0;     // minimum gap between unpassable stones

  TerrainKind terrain = TerrainKind::Flat;
  HeightfieldSpec heightfield;
  double terrain_spacing = 0.1;     // free-space sample spacing
  double stone_point_spacing = 0.02;

  Pose2D start{1.0, 1.0, 0.0};
  std::vector<Pose2D> waypoints;
  MissionMode mission = MissionMode::Chain;

  RobotGeometry robot;
  MappingParams mapping;
  PoaParams poa;        // GVD and RRT* repairs
  PoaParams poa_astar;  // A* repairs
  RrtParams rrt;
  GvdParams gvd;
  TerrainParams terrain_model;
  StabilityLimits limits;
  int max_rounds = 25;

  ScenarioSpec();
  void validate() const;

  /// POA parameters used together with the given base planner.
  const PoaParams& poa_for(PlannerKind kind) const { return kind == PlannerKind::AStar ? poa_astar : poa; }
  GridGeometry grid_geometry() const;
  /// Start and goal of each mission leg.
  std::vector<std::pair<Pose2D, Pose2D>> legs() const;
};

/// `key = value` lines; '#' starts a comment. Unknown keys and malformed
/// values throw Parse naming the line and key. Missing keys keep defaults.
ScenarioSpec parse_scenario(std::istream& in);
/// Same, applying the keys on top of `base`.
ScenarioSpec parse_scenario(std::istream& in, ScenarioSpec base);
void write_scenario(std::ostream& out, const ScenarioSpec& spec);
ScenarioSpec load_scenario(const std::filesystem::path& path);

struct Stone {
  std::int64_t id = 0;
  PointLabel label = PointLabel::PassableObstacle;
  Vec2 center;
  double yaw = 0.0;
  double semi_length = 0.0;
  double semi_width = 0.0;
  double height = 0.0;

  Ellipse2D footprint() const { return {center, semi_length, semi_width, yaw}; }
};

/// Ground height of the generated terrain.
class Heightfield {
 public:
  Heightfield() = default;
  Heightfield(std::vector<Bump> bumps, double scale) : bumps_(std::move(bumps)), scale_(scale) {}

  double operator()(double x, double y) const;
  const std::vector<Bump>& bumps() const { return bumps_; }

 private:
  std::vector<Bump> bumps_;
  double scale_ = 1.0;
};

struct World {
  ScenarioSpec spec;
  LabelledPointCloud cloud;
  OccupancyGrid passable;    // ground truth
  OccupancyGrid unpassable;  // ground truth
  std::vector<Stone> stones; // unpassable first, ids 0..n_unpassable-1
  Heightfield ground;
};

/// Deterministic for a given spec. Unpassable stones depend only on the
/// seed and the unpassable settings, so specs differing only in passable
/// density share them. Throws PlacementFailure when stones cannot be placed.
World generate_world(const ScenarioSpec& spec);

/// setup1, setup2, setup3 and setup3d.
std::vector<ScenarioSpec> builtin_setups();
/// Looks up a builtin by name; throws InvalidArgument for unknown names.
ScenarioSpec builtin_setup(std::string_view name);

struct MissionResult {
  std::string planner;
  std::vector<double> leg_length;
  std::vector<double> leg_time;
  std::vector<bool> leg_success;
  std::size_t residual_collisions = 0;
  double max_abs_roll = 0.0;   // 3D runs only
  double max_abs_pitch = 0.0;

  bool success() const;
  double total_length() const;
  double total_time() const;
};

}  // namespace poa
