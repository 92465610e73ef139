#pragma once

#include <array>
#include <iosfwd>
#include <utility>
#include <vector>

#include "poa/grid.hpp"
#include "poa/kdtree.hpp"
#include "poa/path.hpp"
#include "poa/point_cloud.hpp"
#include "poa/rbf.hpp"
#include "poa/repair.hpp"

namespace poa {

struct StabilityLimits {
  double gamma_max = 0.175;  // roll, radians
  double phi_max = 0.175;    // pitch, radians

  void validate() const;
};

struct TerrainParams {
  double inflate_radius = 0.42;
  double voxel = 0.10;
  int outlier_k = 8;
  double outlier_stddev = 1.0;
  double rbf_smoothing = 1e-3;
  double rbf_decimation = 0.25;
  std::size_t rbf_max_centres = 4000;
  double surface_margin = 1.0;  // how far outside the cloud footprint the surface may be sampled

  void validate() const;
  static TerrainParams for_robot(const RobotGeometry& geom);
};

/// Cleaned labelled cloud with a nearest-point index and a smooth surface
/// fitted to the free-space points. Immutable after construction.
class TerrainModel {
 public:
  TerrainModel(LabelledPointCloud cloud, const TerrainParams& params);

  const LabelledPointCloud& cloud() const { return cloud_; }
  double voxel() const { return voxel_; }

  /// Free-space surface height. Throws OutOfBounds beyond the footprint margin.
  double height(double x, double y) const;

  /// Index into cloud() of the point closest in (x, y), and that distance.
  std::pair<std::size_t, double> nearest_xy(double x, double y) const;

  const ThinPlateSpline& surface() const { return surface_; }

 private:
  LabelledPointCloud cloud_;
  KdTree<2> index_;
  ThinPlateSpline surface_;
  double voxel_;
  double min_x_, max_x_, min_y_, max_y_;
};

/// Marks every cell whose centre lies within `radius` of an occupied cell centre.
OccupancyGrid inflate(const OccupancyGrid& grid, double radius);

/// Unpassable wins over passable; points over neither become free space.
/// Points off the grid keep their label.
LabelledPointCloud relabel(const LabelledPointCloud& cloud, const OccupancyGrid& passable,
                           const OccupancyGrid& unpassable);

/// Statistical outlier removal: drops points whose mean distance to their k
/// nearest neighbours exceeds the global mean plus stddev_mult sample
/// deviations. Clouds with no more than k points are kept whole.
LabelledPointCloud remove_statistical_outliers(const LabelledPointCloud& cloud, int k, double stddev_mult);

/// Centroid per voxel with the majority label (ties go to the more
/// restrictive label) and the smallest instance id carrying that label.
LabelledPointCloud voxel_downsample(const LabelledPointCloud& cloud, double voxel);

/// Decimated surface-fit centres from the free-space points: per bin, the
/// centroid of the points within 5 cm of the lowest one, so stone edges
/// left in free cells do not lift the ground.
std::vector<std::array<double, 3>> surface_centres(const LabelledPointCloud& cloud, double cell,
                                                   std::size_t max_centres);

TerrainModel preprocess_cloud(const LabelledPointCloud& cloud, const OccupancyGrid& passable_grid,
                              const OccupancyGrid& unpassable_grid, const TerrainParams& params);

/// Lifts each waypoint to the height of its nearest cloud point in (x, y).
Path3D project_path(const Path2D& path, const TerrainModel& model);

struct Attitude {
  double roll = 0.0;
  double pitch = 0.0;
};

Attitude estimate_attitude(const Pose3D& waypoint, const TerrainModel& model, const RobotGeometry& geom);

/// Projects and fills in roll and pitch for every waypoint.
Path3D lift_path(const Path2D& path, const TerrainModel& model, const RobotGeometry& geom);

std::vector<std::size_t> check_feasibility(const Path3D& path, const StabilityLimits& limits);

/// Occupies the cell of every listed point and its 8 neighbours, clamped to the grid.
OccupancyGrid block_unstable(const OccupancyGrid& unpassable_grid, const std::vector<Vec2>& unstable_points);

struct Plan3DResult {
  Path3D path;
  PoaPlan plan;               // final 2D plan
  Path3D first_lift;          // round-one 2D plan lifted onto the terrain
  OccupancyGrid unpassable;   // grid after all blocking
  int rounds = 0;
};

/// Replans in 2D with unstable cells blocked until the lifted path is stable.
/// Throws NoPath when the first round has no path and NoFeasiblePath when
/// blocking exhausts the map or max_rounds is reached.
Plan3DResult plan_3d(const BasePlannerConfig& config, const OccupancyGrid& passable_grid,
                     const OccupancyGrid& unpassable_grid, const TerrainModel& model, const Pose2D& start,
                     const Pose2D& goal, const RobotGeometry& geom, const PoaParams& params,
                     const StabilityLimits& limits, int max_rounds = 25);

/// CSV with header `x,y,z,yaw,roll,pitch`.
void write_path3d_csv(std::ostream& out, const Path3D& path);

}  // namespace poa
