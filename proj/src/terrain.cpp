#include "poa/terrain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <tuple>

#include "poa/error.hpp"
#include "poa/io.hpp"

namespace poa {

void StabilityLimits::validate() const {
  if (!(gamma_max > 0.0 && phi_max > 0.0)) throw Error(ErrorCode::InvalidArgument, "stability limits must be positive");
}

void TerrainParams::validate() const {
  if (inflate_radius < 0.0) throw Error(ErrorCode::InvalidArgument, "terrain: inflate_radius must be >= 0");
  if (!(voxel > 0.0)) throw Error(ErrorCode::InvalidArgument, "terrain: voxel must be positive");
  if (outlier_k < 1) throw Error(ErrorCode::InvalidArgument, "terrain: outlier_k must be >= 1");
  if (!(outlier_stddev >= 0.0)) throw Error(ErrorCode::InvalidArgument, "terrain: outlier_stddev must be >= 0");
  if (!(rbf_smoothing >= 0.0)) throw Error(ErrorCode::InvalidArgument, "terrain: rbf_smoothing must be >= 0");
  if (!(rbf_decimation > 0.0)) throw Error(ErrorCode::InvalidArgument, "terrain: rbf_decimation must be positive");
  if (rbf_max_centres < 3) throw Error(ErrorCode::InvalidArgument, "terrain: rbf_max_centres must be >= 3");
}

TerrainParams TerrainParams::for_robot(const RobotGeometry& geom) {
  TerrainParams p;
  p.inflate_radius = geom.half_width();
  return p;
}

namespace {

constexpr std::size_t kMinSurfacePoints = 10;
constexpr double kGroundBand = 0.05;  // metres above the lowest point in a surface bin

int label_rank(PointLabel l) {
  switch (l) {
    case PointLabel::FreeSpace: return 0;
    case PointLabel::PassableObstacle: return 1;
    case PointLabel::UnpassableObstacle: return 2;
  }
  return 0;
}

std::vector<KdTree<2>::Point> xy_points(const LabelledPointCloud& cloud) {
  std::vector<KdTree<2>::Point> pts;
  pts.reserve(cloud.size());
  for (const auto& p : cloud) pts.push_back({p.x, p.y});
  return pts;
}

}  // namespace

TerrainModel::TerrainModel(LabelledPointCloud cloud, const TerrainParams& params)
    : cloud_(std::move(cloud)), voxel_(params.voxel) {
  params.validate();
  if (cloud_.empty()) throw Error(ErrorCode::EmptyCloud, "terrain: cloud is empty");
  const auto free_count = static_cast<std::size_t>(std::count_if(
      cloud_.begin(), cloud_.end(), [](const LabelledPoint& p) { return p.label == PointLabel::FreeSpace; }));
  if (free_count < kMinSurfacePoints) {
    throw Error(ErrorCode::DegenerateSurface, "terrain: fewer than 10 free-space points");
  }
  index_ = KdTree<2>(xy_points(cloud_));
  surface_ = ThinPlateSpline(surface_centres(cloud_, params.rbf_decimation, params.rbf_max_centres), params.rbf_smoothing);

  min_x_ = min_y_ = std::numeric_limits<double>::infinity();
  max_x_ = max_y_ = -std::numeric_limits<double>::infinity();
  for (const auto& p : cloud_) {
    min_x_ = std::min(min_x_, p.x);
    max_x_ = std::max(max_x_, p.x);
    min_y_ = std::min(min_y_, p.y);
    max_y_ = std::max(max_y_, p.y);
  }
  min_x_ -= params.surface_margin;
  min_y_ -= params.surface_margin;
  max_x_ += params.surface_margin;
  max_y_ += params.surface_margin;
}

double TerrainModel::height(double x, double y) const {
  if (x < min_x_ || x > max_x_ || y < min_y_ || y > max_y_) {
    throw Error(ErrorCode::OutOfBounds, "terrain: surface sampled outside the cloud footprint");
  }
  return surface_(x, y);
}

std::pair<std::size_t, double> TerrainModel::nearest_xy(double x, double y) const {
  const auto [idx, d2] = index_.nearest({x, y});
  return {idx, std::sqrt(d2)};
}

OccupancyGrid inflate(const OccupancyGrid& grid, double radius) {
  const auto& g = grid.geometry();
  if (!(radius > 0.0)) return grid;
  const int reach = static_cast<int>(std::floor(radius / g.resolution));
  std::vector<CellIndex> offsets;
  for (int dr = -reach; dr <= reach; ++dr) {
    for (int dc = -reach; dc <= reach; ++dc) {
      const double gx = dc * g.resolution, gy = dr * g.resolution;
      if (gx * gx + gy * gy <= radius * radius + 1e-12) offsets.push_back({dc, dr});
    }
  }
  OccupancyGrid out = grid;
  for (int row = 0; row < g.height; ++row) {
    for (int col = 0; col < g.width; ++col) {
      if (!grid.occupied({col, row})) continue;
      for (const CellIndex o : offsets) {
        const CellIndex n{col + o.col, row + o.row};
        if (g.in_bounds(n)) out.set(n, CellState::Occupied);
      }
    }
  }
  return out;
}

LabelledPointCloud relabel(const LabelledPointCloud& cloud, const OccupancyGrid& passable,
                           const OccupancyGrid& unpassable) {
  if (!(passable.geometry() == unpassable.geometry())) {
    throw Error(ErrorCode::GeometryMismatch, "relabel: grids differ in geometry");
  }
  LabelledPointCloud out = cloud;
  for (auto& p : out) {
    const auto cell = unpassable.geometry().try_world_to_cell({p.x, p.y});
    if (!cell) continue;
    if (unpassable.occupied(*cell)) {
      p.label = PointLabel::UnpassableObstacle;
    } else if (passable.occupied(*cell)) {
      p.label = PointLabel::PassableObstacle;
    } else {
      p.label = PointLabel::FreeSpace;
    }
  }
  return out;
}

LabelledPointCloud remove_statistical_outliers(const LabelledPointCloud& cloud, int k, double stddev_mult) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "outlier removal: k must be >= 1");
  std::vector<std::uint8_t> keep(cloud.size(), 1);
  if (cloud.size() > static_cast<std::size_t>(k)) {
    std::vector<KdTree<3>::Point> pts;
    pts.reserve(cloud.size());
    for (const auto& p : cloud) pts.push_back({p.x, p.y, p.z});
    const KdTree<3> tree(pts);
    std::vector<double> mean_dist(cloud.size());
    for (std::size_t m = 0; m < cloud.size(); ++m) {
      const auto nn = tree.knn(pts[m], static_cast<std::size_t>(k) + 1);
      double sum = 0.0;
      int used = 0;
      for (const auto& [d2, idx] : nn) {
        if (idx == m || used == k) continue;
        sum += std::sqrt(d2);
        ++used;
      }
      mean_dist[m] = sum / used;
    }
    double mean = 0.0;
    for (double d : mean_dist) mean += d;
    mean /= static_cast<double>(mean_dist.size());
    double var = 0.0;
    for (double d : mean_dist) var += (d - mean) * (d - mean);
    const double sigma = std::sqrt(var / static_cast<double>(mean_dist.size() - 1));
    const double limit = mean + stddev_mult * sigma;
    for (std::size_t m = 0; m < cloud.size(); ++m) {
      if (mean_dist[m] > limit) keep[m] = 0;
    }
  }
  LabelledPointCloud out;
  out.reserve(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (keep[i]) out.push_back(cloud[i]);
  }
  return out;
}

LabelledPointCloud voxel_downsample(const LabelledPointCloud& cloud, double voxel) {
  if (!(voxel > 0.0)) throw Error(ErrorCode::InvalidArgument, "voxel_downsample: voxel must be positive");
  struct Acc {
    double x = 0.0, y = 0.0, z = 0.0;
    std::size_t n = 0;
    std::array<std::size_t, 3> votes{};
    std::array<std::optional<std::int64_t>, 3> ids;
  };
  using Key = std::tuple<long long, long long, long long>;
  std::map<Key, Acc> voxels;
  for (const auto& p : cloud) {
    const Key key{static_cast<long long>(std::floor(p.x / voxel)), static_cast<long long>(std::floor(p.y / voxel)),
                  static_cast<long long>(std::floor(p.z / voxel))};
    Acc& a = voxels[key];
    a.x += p.x;
    a.y += p.y;
    a.z += p.z;
    ++a.n;
    const int r = label_rank(p.label);
    ++a.votes[static_cast<std::size_t>(r)];
    auto& id = a.ids[static_cast<std::size_t>(r)];
    if (p.instance_id && (!id || *p.instance_id < *id)) id = p.instance_id;
  }
  LabelledPointCloud out;
  out.reserve(voxels.size());
  for (const auto& [key, a] : voxels) {
    std::size_t best = 0;
    for (std::size_t r = 1; r < 3; ++r) {
      if (a.votes[r] >= a.votes[best]) best = r;
    }
    const double n = static_cast<double>(a.n);
    out.push_back({a.x / n, a.y / n, a.z / n, static_cast<PointLabel>(best), a.ids[best]});
  }
  return out;
}

std::vector<std::array<double, 3>> surface_centres(const LabelledPointCloud& cloud, double cell,
                                                   std::size_t max_centres) {
  std::map<std::pair<long long, long long>, std::vector<std::array<double, 3>>> bins;
  for (const auto& p : cloud) {
    if (p.label != PointLabel::FreeSpace) continue;
    bins[{static_cast<long long>(std::floor(p.x / cell)), static_cast<long long>(std::floor(p.y / cell))}].push_back(
        {p.x, p.y, p.z});
  }
  std::vector<std::array<double, 3>> all;
  all.reserve(bins.size());
  for (const auto& [key, pts] : bins) {
    double z_min = std::numeric_limits<double>::infinity();
    for (const auto& q : pts) z_min = std::min(z_min, q[2]);
    // Stone edges over cells left free stand at least this far above the ground.
    std::array<double, 3> sum{};
    double n = 0.0;
    for (const auto& q : pts) {
      if (q[2] > z_min + kGroundBand) continue;
      for (int k = 0; k < 3; ++k) sum[static_cast<std::size_t>(k)] += q[static_cast<std::size_t>(k)];
      n += 1.0;
    }
    all.push_back({sum[0] / n, sum[1] / n, sum[2] / n});
  }
  if (all.size() <= max_centres) return all;
  std::vector<std::array<double, 3>> picked;
  picked.reserve(max_centres);
  for (std::size_t i = 0; i < max_centres; ++i) picked.push_back(all[i * all.size() / max_centres]);
  return picked;
}

TerrainModel preprocess_cloud(const LabelledPointCloud& cloud, const OccupancyGrid& passable_grid,
                              const OccupancyGrid& unpassable_grid, const TerrainParams& params) {
  params.validate();
  if (cloud.empty()) throw Error(ErrorCode::EmptyCloud, "preprocess_cloud: cloud is empty");
  const OccupancyGrid pass = inflate(passable_grid, params.inflate_radius);
  const OccupancyGrid unpass = inflate(unpassable_grid, params.inflate_radius);
  LabelledPointCloud c = relabel(cloud, pass, unpass);
  // Downsampling first evens out the point density, so one global
  // distance statistic fits stone and terrain points alike.
  c = voxel_downsample(c, params.voxel);
  c = remove_statistical_outliers(c, params.outlier_k, params.outlier_stddev);
  return TerrainModel(std::move(c), params);
}

Path3D project_path(const Path2D& path, const TerrainModel& model) {
  Path3D out;
  out.waypoints.reserve(path.size());
  const double limit = 3.0 * model.voxel();
  for (const auto& w : path.waypoints) {
    const auto [idx, d] = model.nearest_xy(w.x(), w.y());
    if (idx >= model.cloud().size() || d > limit) {
      throw Error(ErrorCode::NoNeighbour, "project_path: no cloud point near (" + format_double(w.x()) + ", " +
                                              format_double(w.y()) + ")");
    }
    out.waypoints.emplace_back(w.x(), w.y(), model.cloud()[idx].z, w.theta());
  }
  return out;
}

Attitude estimate_attitude(const Pose3D& waypoint, const TerrainModel& model, const RobotGeometry& geom) {
  const Pose2D p = waypoint.planar();
  const Vec2 c = p.position();
  const Vec2 lat = (geom.track_width / 2.0) * p.left();
  const Vec2 lon = (geom.wheel_base_contact / 2.0) * p.heading();
  const Vec2 l = c + lat, r = c - lat, f = c + lon, b = c - lon;
  const double roll = std::atan2(model.height(l.x, l.y) - model.height(r.x, r.y), geom.track_width);
  const double pitch = std::atan2(model.height(f.x, f.y) - model.height(b.x, b.y), geom.wheel_base_contact);
  return {roll, pitch};
}

Path3D lift_path(const Path2D& path, const TerrainModel& model, const RobotGeometry& geom) {
  Path3D out = project_path(path, model);
  for (auto& w : out.waypoints) {
    const Attitude a = estimate_attitude(w, model, geom);
    w = w.with_attitude(a.roll, a.pitch);
  }
  return out;
}

std::vector<std::size_t> check_feasibility(const Path3D& path, const StabilityLimits& limits) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (std::abs(path[i].roll()) > limits.gamma_max || std::abs(path[i].pitch()) > limits.phi_max) out.push_back(i);
  }
  return out;
}

OccupancyGrid block_unstable(const OccupancyGrid& unpassable_grid, const std::vector<Vec2>& unstable_points) {
  OccupancyGrid out = unpassable_grid;
  const auto& g = out.geometry();
  for (Vec2 p : unstable_points) {
    const CellIndex c = g.world_to_cell(p);
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        const CellIndex n{c.col + dc, c.row + dr};
        if (g.in_bounds(n)) out.set(n, CellState::Occupied);
      }
    }
  }
  return out;
}

Plan3DResult plan_3d(const BasePlannerConfig& config, const OccupancyGrid& passable_grid,
                     const OccupancyGrid& unpassable_grid, const TerrainModel& model, const Pose2D& start,
                     const Pose2D& goal, const RobotGeometry& geom, const PoaParams& params,
                     const StabilityLimits& limits, int max_rounds) {
  limits.validate();
  if (max_rounds < 1) throw Error(ErrorCode::InvalidArgument, "plan_3d: max_rounds must be >= 1");
  Plan3DResult result;
  result.unpassable = unpassable_grid;
  for (int round = 1; round <= max_rounds; ++round) {
    result.rounds = round;
    try {
      result.plan = poa_plan(config, passable_grid, result.unpassable, start, goal, geom, params);
    } catch (const Error& e) {
      if (round == 1) throw;
      if (e.code() == ErrorCode::NoPath || e.code() == ErrorCode::InvalidEndpoint) {
        throw Error(ErrorCode::NoFeasiblePath, "plan_3d: no stable path after " + std::to_string(round - 1) +
                                                   " rounds (" + e.what() + ")");
      }
      throw;
    }
    Path3D lifted = lift_path(result.plan.path(), model, geom);
    if (round == 1) result.first_lift = lifted;
    const auto unstable = check_feasibility(lifted, limits);
    if (unstable.empty()) {
      result.path = std::move(lifted);
      return result;
    }
    std::vector<Vec2> points;
    points.reserve(unstable.size());
    for (std::size_t i : unstable) points.push_back({lifted[i].x(), lifted[i].y()});
    result.unpassable = block_unstable(result.unpassable, points);
  }
  throw Error(ErrorCode::NoFeasiblePath, "plan_3d: no stable path within " + std::to_string(max_rounds) + " rounds");
}

void write_path3d_csv(std::ostream& out, const Path3D& path) {
  out << "x,y,z,yaw,roll,pitch\n";
  for (const auto& w : path.waypoints) {
    out << format_double(w.x()) << ',' << format_double(w.y()) << ',' << format_double(w.z()) << ','
        << format_double(w.yaw()) << ',' << format_double(w.roll()) << ',' << format_double(w.pitch()) << '\n';
  }
}

}  // namespace poa
