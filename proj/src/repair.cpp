#include "poa/repair.hpp"

#include <algorithm>
#include <cmath>

#include "poa/dubins.hpp"
#include "poa/error.hpp"

namespace poa {

void PoaParams::validate() const {
  if (n_skip < 1 || n_clear < 1) throw Error(ErrorCode::InvalidArgument, "poa: n_skip and n_clear must be >= 1");
  if (!(shift_min < 0.0 && shift_max > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "poa: shift range must straddle zero");
  }
  if (!(shift_step > 0.0)) throw Error(ErrorCode::InvalidArgument, "poa: shift_step must be positive");
  if (!(turn_radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "poa: turn_radius must be positive");
  if (!(waypoint_spacing > 0.0)) throw Error(ErrorCode::InvalidArgument, "poa: waypoint_spacing must be positive");
}

PoaParams PoaParams::for_robot(const RobotGeometry& geom) {
  PoaParams p;
  p.turn_radius = geom.turn_radius_min;
  return p;
}

std::pair<Ellipse2D, Ellipse2D> wheel_ellipses(const Pose2D& pose, const RobotGeometry& geom) {
  const Vec2 offset = (geom.track_width / 2.0) * pose.left();
  const Ellipse2D left{pose.position() + offset, geom.wheel_ellipse_a, geom.wheel_ellipse_b, pose.theta()};
  const Ellipse2D right{pose.position() - offset, geom.wheel_ellipse_a, geom.wheel_ellipse_b, pose.theta()};
  return {left, right};
}

std::optional<CollisionReport> check_waypoint(const Pose2D& pose, const OccupancyGrid& passable_grid,
                                              const RobotGeometry& geom, std::size_t index) {
  const auto [left, right] = wheel_ellipses(pose, geom);
  std::optional<CellIndex> cell;
  if (ellipse_hits_occupied(left, passable_grid, &cell)) return CollisionReport{index, Wheel::Left, *cell};
  if (ellipse_hits_occupied(right, passable_grid, &cell)) return CollisionReport{index, Wheel::Right, *cell};
  return std::nullopt;
}

std::vector<Pose2D> generate_alternatives(const Path2D& path, std::size_t i, const PoaParams& params) {
  if (i >= path.size()) throw Error(ErrorCode::OutOfBounds, "generate_alternatives: index outside the path");
  const Pose2D& w = path[i];
  const int k_min = static_cast<int>(std::ceil(params.shift_min / params.shift_step - 1e-9));
  const int k_max = static_cast<int>(std::floor(params.shift_max / params.shift_step + 1e-9));
  std::vector<int> ks;
  for (int k = k_min; k <= k_max; ++k) {
    if (k != 0) ks.push_back(k);
  }
  std::stable_sort(ks.begin(), ks.end(), [](int a, int b) {
    if (std::abs(a) != std::abs(b)) return std::abs(a) < std::abs(b);
    return a > b;
  });
  std::vector<Pose2D> out;
  out.reserve(ks.size());
  const Vec2 lateral = w.left();
  for (int k : ks) {
    const double d = k * params.shift_step;
    out.emplace_back(w.x() + d * lateral.x, w.y() + d * lateral.y, w.theta());
  }
  return out;
}

namespace {

bool pose_blocked(const Pose2D& pose, const OccupancyGrid& passable, const OccupancyGrid& unpassable,
                  const RobotGeometry& geom) {
  if (unpassable.occupied_at(pose.position())) return true;
  const auto [left, right] = wheel_ellipses(pose, geom);
  for (const auto& e : {left, right}) {
    if (!unpassable.geometry().try_world_to_cell(e.center)) return true;
    if (ellipse_hits_occupied(e, passable) || ellipse_hits_occupied(e, unpassable)) return true;
  }
  return false;
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len_sq = ab.x * ab.x + ab.y * ab.y;
  double t = len_sq > 0.0 ? ((p.x - a.x) * ab.x + (p.y - a.y) * ab.y) / len_sq : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return distance(p, a + t * ab);
}

double distance_to_polyline(Vec2 p, const std::vector<Pose2D>& pts, std::size_t lo, std::size_t hi) {
  if (lo == hi) return distance(p, pts[lo].position());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = lo; k < hi; ++k) {
    best = std::min(best, point_segment_distance(p, pts[k].position(), pts[k + 1].position()));
  }
  return best;
}

}  // namespace

RepairResult repair_path(const Path2D& path, const OccupancyGrid& passable_grid, const OccupancyGrid& unpassable_grid,
                         const RobotGeometry& geom, const PoaParams& params) {
  params.validate();
  if (!(passable_grid.geometry() == unpassable_grid.geometry())) {
    throw Error(ErrorCode::GeometryMismatch, "repair_path: grids differ in geometry");
  }
  RepairResult result;
  result.path = path;
  if (path.size() < 2) return result;

  std::vector<Pose2D> pts = path.waypoints;
  const double sample_step = std::min(params.waypoint_spacing, passable_grid.resolution() / 2.0);
  const double max_deviation = params.shift_max + params.turn_radius;
  const auto n_clear = static_cast<std::size_t>(params.n_clear);
  const auto n_skip = static_cast<std::size_t>(params.n_skip);

  auto hazardous = [&](std::size_t k) { return check_waypoint(pts[k], passable_grid, geom, k).has_value(); };
  auto with_central_heading = [&](std::size_t k) {
    Path2D view;  // central_heading only needs neighbours
    const std::size_t lo = k == 0 ? 0 : k - 1;
    const std::size_t hi = std::min(pts.size() - 1, k + 1);
    view.waypoints.assign(pts.begin() + static_cast<std::ptrdiff_t>(lo), pts.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
    return pts[k].with_theta(central_heading(view, k - lo));
  };

  std::size_t floor_index = 0;  // anchors never move before the end of the previous splice
  std::size_t i = 0;
  while (i < pts.size()) {
    const auto report = check_waypoint(pts[i], passable_grid, geom, i);
    if (!report) {
      if (i + 1 == pts.size()) break;
      i = std::min(i + n_skip, pts.size() - 1);
      continue;
    }

    std::size_t a = i >= floor_index + n_clear ? i - n_clear : floor_index;
    std::size_t b = std::min(pts.size() - 1, i + n_clear);
    // Anchors sitting on a passable obstacle make every splice infeasible;
    // walk them outward to the nearest clean waypoint.
    while (a > floor_index && hazardous(a) && i - a < 2 * n_clear) --a;
    while (b + 1 < pts.size() && hazardous(b) && b - i < 2 * n_clear) ++b;

    const Pose2D start_anchor = with_central_heading(a);
    const Pose2D end_anchor = with_central_heading(b);
    Path2D hazard_view;
    hazard_view.waypoints = {with_central_heading(i)};
    const auto candidates = generate_alternatives(hazard_view, 0, params);

    bool spliced = false;
    for (std::size_t c = 0; c < candidates.size() && !spliced; ++c) {
      const Pose2D& alt = candidates[c];
      if (pose_blocked(alt, passable_grid, unpassable_grid, geom)) continue;
      const DubinsPath to_alt = dubins_shortest(start_anchor, alt, params.turn_radius);
      const DubinsPath from_alt = dubins_shortest(alt, end_anchor, params.turn_radius);
      auto first = sample_dubins(to_alt, sample_step);
      auto second = sample_dubins(from_alt, sample_step);
      bool ok = true;
      for (const auto* seq : {&first, &second}) {
        for (const Pose2D& s : *seq) {
          if (distance_to_polyline(s.position(), pts, a, b) > max_deviation ||
              pose_blocked(s, passable_grid, unpassable_grid, geom)) {
            ok = false;
            break;
          }
        }
        if (!ok) break;
      }
      if (!ok) continue;

      std::vector<Pose2D> next(pts.begin(), pts.begin() + static_cast<std::ptrdiff_t>(a) + 1);
      next.insert(next.end(), first.begin() + 1, first.end());
      if (second.size() > 2) next.insert(next.end(), second.begin() + 1, second.end() - 1);
      const std::size_t new_b = next.size();
      next.insert(next.end(), pts.begin() + static_cast<std::ptrdiff_t>(b), pts.end());

      Splice splice;
      splice.hazard_index = i;
      splice.hazard = pts[i];
      splice.alternative = alt;
      splice.shift = (alt.position() - hazard_view[0].position()).x * hazard_view[0].left().x +
                     (alt.position() - hazard_view[0].position()).y * hazard_view[0].left().y;
      splice.start_anchor = a;
      splice.end_anchor = new_b;
      result.splices.push_back(splice);

      // Earlier failures inside the replaced window are resolved by this splice.
      std::erase_if(result.residual, [a](const CollisionReport& c) { return c.waypoint_index > a; });
      pts = std::move(next);
      floor_index = new_b;
      i = params.resume_after_window ? new_b : std::min(a + (first.size() - 1) + n_skip, new_b);
      spliced = true;
    }
    if (!spliced) {
      result.residual.push_back(*report);
      if (i + 1 == pts.size()) break;
      i = std::min(i + n_skip, pts.size() - 1);
    }
  }

  if (!result.splices.empty()) result.path.waypoints = std::move(pts);
  return result;
}

std::string_view to_string(PlannerKind kind) {
  switch (kind) {
    case PlannerKind::AStar: return "astar";
    case PlannerKind::RrtStar: return "rrt_star";
    case PlannerKind::Gvd: return "gvd";
  }
  return "?";
}

PlannerKind parse_planner_kind(std::string_view name) {
  if (name == "astar") return PlannerKind::AStar;
  if (name == "rrt_star") return PlannerKind::RrtStar;
  if (name == "gvd") return PlannerKind::Gvd;
  throw Error(ErrorCode::InvalidArgument, "unknown planner '" + std::string(name) + "'");
}

Path2D plan_base(const BasePlannerConfig& config, const OccupancyGrid& grid, const Pose2D& start, const Pose2D& goal) {
  switch (config.kind) {
    case PlannerKind::AStar: return plan_astar(grid, start, goal);
    case PlannerKind::RrtStar: return plan_rrt_star(grid, start, goal, config.rrt);
    case PlannerKind::Gvd: return plan_gvd(grid, start, goal, config.gvd);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown planner kind");
}

PoaPlan poa_plan(const BasePlannerConfig& config, const OccupancyGrid& passable_grid,
                 const OccupancyGrid& unpassable_grid, const Pose2D& start, const Pose2D& goal,
                 const RobotGeometry& geom, const PoaParams& params) {
  PoaPlan plan;
  plan.base = config.kind;
  plan.base_path = plan_base(config, unpassable_grid, start, goal);
  const Path2D dense = resample(plan.base_path, params.waypoint_spacing);
  plan.repair = repair_path(dense, passable_grid, unpassable_grid, geom, params);
  if (plan.repair.splices.empty()) plan.repair.path = plan.base_path;
  return plan;
}

}  // namespace poa
