#include "poa/mapping.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "poa/error.hpp"

namespace poa {

void MappingParams::validate() const {
  if (!(p > 0.0 && p < 0.5)) throw Error(ErrorCode::InvalidArgument, "mapping: p must be in (0, 0.5)");
  if (!(occupied_threshold > 0.5 && occupied_threshold < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "mapping: occupied_threshold must be in (0.5, 1)");
  }
  if (!(p_clamp_epsilon > 0.0 && p_clamp_epsilon < 0.5)) {
    throw Error(ErrorCode::InvalidArgument, "mapping: p_clamp_epsilon must be in (0, 0.5)");
  }
}

double measurement_probability(const MeasurementCounts& counts, const MappingParams& params) {
  const double raw = 0.5 + params.p * static_cast<double>(counts.n_stone) -
                     params.p * static_cast<double>(counts.n_environment);
  return std::clamp(raw, params.p_clamp_epsilon, 1.0 - params.p_clamp_epsilon);
}

double log_odds(double probability) { return std::log(probability / (1.0 - probability)); }

void update_log_odds(LogOddsGrid& grid, CellIndex cell, double p_current) {
  if (!(p_current > 0.0 && p_current < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "update_log_odds: probability must be in (0, 1)");
  }
  grid.add(cell, log_odds(p_current));
}

double final_probability(double log_odd) { return 1.0 / (1.0 + std::exp(-log_odd)); }

OccupancyGrid binarize(const LogOddsGrid& grid, const MappingParams& params) {
  OccupancyGrid out(grid.geometry(), CellState::Unknown);
  for (std::size_t i = 0; i < grid.geometry().size(); ++i) {
    if (!grid.observed(i)) continue;
    out.set(i, final_probability(grid.value(i)) > params.occupied_threshold ? CellState::Occupied
                                                                             : CellState::Free);
  }
  return out;
}

OccupancyGrid mask_passable(const OccupancyGrid& slam_grid, const OccupancyGrid& passable_grid) {
  if (!(slam_grid.geometry() == passable_grid.geometry())) {
    throw Error(ErrorCode::GeometryMismatch, "mask_passable: grids differ in geometry");
  }
  OccupancyGrid out = slam_grid;
  for (std::size_t i = 0; i < slam_grid.geometry().size(); ++i) {
    if (passable_grid.at(i) == CellState::Occupied) out.set(i, CellState::Free);
  }
  return out;
}

LabelledPointCloud filter_cloud_by_mask(const LabelledPointCloud& cloud, const OccupancyGrid& passable_grid) {
  LabelledPointCloud out;
  out.reserve(cloud.size());
  for (const auto& p : cloud) {
    if (p.label == PointLabel::PassableObstacle) {
      const auto cell = passable_grid.geometry().try_world_to_cell({p.x, p.y});
      if (!cell || !passable_grid.occupied(*cell)) continue;
    }
    out.push_back(p);
  }
  return out;
}

Mapper::Mapper(GridGeometry geometry, MappingParams params)
    : geometry_(geometry), params_(params), passable_(geometry), unpassable_(geometry) {
  params_.validate();
}

void Mapper::ingest(const LabelledPointCloud& cloud) {
  struct Tally {
    long passable = 0;
    long unpassable = 0;
    long free = 0;
  };
  std::vector<Tally> tally(geometry_.size());
  std::vector<std::size_t> touched;
  for (const auto& p : cloud) {
    const auto cell = geometry_.try_world_to_cell({p.x, p.y});
    if (!cell) throw Error(ErrorCode::GeometryMismatch, "ingest: cloud extends beyond the grid");
    const std::size_t i = geometry_.index(*cell);
    Tally& t = tally[i];
    if (t.passable == 0 && t.unpassable == 0 && t.free == 0) touched.push_back(i);
    switch (p.label) {
      case PointLabel::PassableObstacle: ++t.passable; break;
      case PointLabel::UnpassableObstacle: ++t.unpassable; break;
      case PointLabel::FreeSpace: ++t.free; break;
    }
  }
  std::sort(touched.begin(), touched.end());
  for (const std::size_t i : touched) {
    const Tally& t = tally[i];
    const CellIndex cell = geometry_.cell_of(i);
    if (t.passable > 0 || t.free > 0) {
      update_log_odds(passable_, cell, measurement_probability({t.passable, t.free}, params_));
    }
    if (t.unpassable > 0 || t.free > 0) {
      update_log_odds(unpassable_, cell, measurement_probability({t.unpassable, t.free}, params_));
    }
  }
  accumulated_.insert(accumulated_.end(), cloud.begin(), cloud.end());
}

}  // namespace poa
