#pragma once

#include "poa/grid.hpp"
#include "poa/point_cloud.hpp"

namespace poa {

/// Evidence counts of one cell from a single cloud.
struct MeasurementCounts {
  long n_stone = 0;
  long n_environment = 0;
};

struct MappingParams {
  double p = 0.01;                   // probability change contributed by one point
  double occupied_threshold = 0.65;  // final probability above which a cell is occupied
  double p_clamp_epsilon = 0.001;    // keeps the measurement probability inside (0, 1)

  void validate() const;
};

/// 0.5 + p * n_stone - p * n_environment, clamped to [eps, 1 - eps].
double measurement_probability(const MeasurementCounts& counts, const MappingParams& params);

double log_odds(double probability);

/// Adds ln(p / (1 - p)) to the cell. Requires 0 < p_current < 1.
void update_log_odds(LogOddsGrid& grid, CellIndex cell, double p_current);

/// Logistic function of the accumulated log-odds.
double final_probability(double log_odd);

/// Occupied iff the final probability exceeds the threshold; cells that were
/// never updated stay unknown.
OccupancyGrid binarize(const LogOddsGrid& grid, const MappingParams& params);

/// Frees every cell of the SLAM grid that the passable grid marks occupied.
OccupancyGrid mask_passable(const OccupancyGrid& slam_grid, const OccupancyGrid& passable_grid);

/// Drops passable-labelled points that do not project onto an occupied cell
/// of the passable grid. Other labels pass through.
LabelledPointCloud filter_cloud_by_mask(const LabelledPointCloud& cloud, const OccupancyGrid& passable_grid);

/// Incremental passable/unpassable map builder fed with labelled clouds.
class Mapper {
 public:
  Mapper(GridGeometry geometry, MappingParams params);

  /// Projects the cloud onto the plane and fuses per-cell evidence into both
  /// label grids. Free-space points count as environment for both grids.
  /// Throws GeometryMismatch (leaving the state untouched) if any point
  /// falls outside the grid.
  void ingest(const LabelledPointCloud& cloud);

  const LogOddsGrid& passable_log_odds() const { return passable_; }
  const LogOddsGrid& unpassable_log_odds() const { return unpassable_; }
  const LabelledPointCloud& accumulated_cloud() const { return accumulated_; }
  const MappingParams& params() const { return params_; }

  OccupancyGrid passable_grid() const { return binarize(passable_, params_); }
  OccupancyGrid unpassable_grid() const { return binarize(unpassable_, params_); }

 private:
  GridGeometry geometry_;
  MappingParams params_;
  LogOddsGrid passable_;
  LogOddsGrid unpassable_;
  LabelledPointCloud accumulated_;
};

}  // namespace poa
