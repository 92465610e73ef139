#include "poa/simulation.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <thread>

#include "poa/error.hpp"
#include "poa/io.hpp"

namespace poa {

void SpeedModel::validate() const {
  if (!(v_nominal > 0.0) || !(v_over_passable > 0.0) || v_over_passable > v_nominal) {
    throw Error(ErrorCode::InvalidArgument, "speed model needs 0 < v_over_passable <= v_nominal");
  }
  if (!(v_turn_scale > 0.0 && v_turn_scale <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "speed model needs 0 < v_turn_scale <= 1");
  }
}

namespace {

constexpr double kSampleStep = 0.1;
constexpr int kCurvatureHalfWindow = 2;  // samples on each side, 0.2 m each way

// Separating-axis test between an oriented rectangle and an axis-aligned square.
bool rectangle_overlaps_square(Vec2 c, Vec2 u, Vec2 v, double hl, double hw, Vec2 sq_center, double half) {
  const Vec2 d = sq_center - c;
  if (std::abs(d.x) > hl * std::abs(u.x) + hw * std::abs(v.x) + half) return false;
  if (std::abs(d.y) > hl * std::abs(u.y) + hw * std::abs(v.y) + half) return false;
  if (std::abs(d.x * u.x + d.y * u.y) > hl + half * (std::abs(u.x) + std::abs(u.y))) return false;
  if (std::abs(d.x * v.x + d.y * v.y) > hw + half * (std::abs(v.x) + std::abs(v.y))) return false;
  return true;
}

}  // namespace

bool footprint_overlaps(const Pose2D& pose, const OccupancyGrid& grid, const RobotGeometry& geom) {
  const auto [left, right] = wheel_ellipses(pose, geom);
  if (ellipse_hits_occupied(left, grid) || ellipse_hits_occupied(right, grid)) return true;

  const auto& g = grid.geometry();
  const Vec2 u = pose.heading(), v = pose.left();
  const double hl = geom.wheel_ellipse_a, hw = geom.track_width / 2.0;
  const double rx = hl * std::abs(u.x) + hw * std::abs(v.x);
  const double ry = hl * std::abs(u.y) + hw * std::abs(v.y);
  const Vec2 c = pose.position();
  const int c0 = std::max(0, static_cast<int>(std::floor((c.x - rx - g.origin.x) / g.resolution)));
  const int c1 = std::min(g.width - 1, static_cast<int>(std::floor((c.x + rx - g.origin.x) / g.resolution)));
  const int r0 = std::max(0, static_cast<int>(std::floor((c.y - ry - g.origin.y) / g.resolution)));
  const int r1 = std::min(g.height - 1, static_cast<int>(std::floor((c.y + ry - g.origin.y) / g.resolution)));
  for (int r = r0; r <= r1; ++r) {
    for (int col = c0; col <= c1; ++col) {
      if (!grid.occupied({col, r})) continue;
      if (rectangle_overlaps_square(c, u, v, hl, hw, g.cell_center({col, r}), g.resolution / 2.0)) return true;
    }
  }
  return false;
}

double simulate_traversal(const Path2D& path, const OccupancyGrid& passable_grid, const RobotGeometry& geom,
                          const SpeedModel& speed) {
  speed.validate();
  if (path.size() < 2) return 0.0;
  const Path2D samples = resample(path, kSampleStep);
  const std::size_t n = samples.size() - 1;  // pieces
  // Stations are uniform in arc length along the input, so each piece is
  // charged that arc rather than its chord, which would cut corners.
  const double piece = path_length(path) / static_cast<double>(n);
  std::vector<double> length(n, piece), heading(n);
  for (std::size_t j = 0; j < n; ++j) {
    const Vec2 d = samples[j + 1].position() - samples[j].position();
    heading[j] = norm(d) > 0.0 ? std::atan2(d.y, d.x) : (j > 0 ? heading[j - 1] : samples[0].theta());
  }
  const double kappa_limit = 1.0 / (2.0 * geom.turn_radius_min);
  double time = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (length[j] <= 0.0) continue;
    const Vec2 mid = 0.5 * (samples[j].position() + samples[j + 1].position());
    double v = speed.v_nominal;
    if (footprint_overlaps(Pose2D(mid.x, mid.y, heading[j]), passable_grid, geom)) {
      v = speed.v_over_passable;
    } else {
      const std::size_t lo = j >= kCurvatureHalfWindow ? j - kCurvatureHalfWindow : 0;
      const std::size_t hi = std::min(n - 1, j + kCurvatureHalfWindow);
      double arc = 0.0;
      for (std::size_t k = lo; k < hi; ++k) arc += 0.5 * (length[k] + length[k + 1]);
      const double turn = std::abs(normalize_angle(heading[hi] - heading[lo]));
      if (arc > 0.0 && turn / arc > kappa_limit) v = speed.v_nominal * speed.v_turn_scale;
    }
    time += length[j] / v;
  }
  return time;
}

std::string PlannerVariant::name() const { return std::string(to_string(kind)) + (poa ? "+poa" : ""); }

PlannerVariant parse_planner_variant(std::string_view name) {
  PlannerVariant v;
  constexpr std::string_view suffix = "+poa";
  if (name.size() > suffix.size() && name.substr(name.size() - suffix.size()) == suffix) {
    v.poa = true;
    name.remove_suffix(suffix.size());
  }
  v.kind = parse_planner_kind(name);
  return v;
}

std::vector<PlannerVariant> default_variants() {
  std::vector<PlannerVariant> out;
  for (bool poa : {false, true}) {
    for (PlannerKind k : {PlannerKind::Gvd, PlannerKind::AStar, PlannerKind::RrtStar}) out.push_back({k, poa});
  }
  return out;
}

std::optional<LegPlan> plan_leg(const World& world, const PlannerVariant& variant, const Pose2D& from,
                                const Pose2D& to, const MissionOptions& options) {
  const ScenarioSpec& spec = world.spec;
  const OccupancyGrid merged = variant.poa ? OccupancyGrid{} : merge_occupied(world.passable, world.unpassable);
  const int runs = variant.kind == PlannerKind::RrtStar ? std::max(1, options.rrt_runs) : 1;
  std::optional<LegPlan> best;
  for (int r = 0; r < runs; ++r) {
    BasePlannerConfig config;
    config.kind = variant.kind;
    config.rrt = spec.rrt;
    config.rrt.rng_seed = spec.rrt.rng_seed + static_cast<std::uint64_t>(r);
    config.gvd = spec.gvd;
    try {
      LegPlan leg;
      if (variant.poa) {
        PoaPlan plan = poa_plan(config, world.passable, world.unpassable, from, to, spec.robot,
                                spec.poa_for(variant.kind));
        leg.splices = std::move(plan.repair.splices);
        leg.residual = plan.repair.residual.size();
        leg.path = std::move(plan.repair.path);
      } else {
        leg.path = plan_base(config, merged, from, to);
      }
      if (!best || path_length(leg.path) < path_length(best->path)) best = std::move(leg);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoPath && e.code() != ErrorCode::InvalidEndpoint) throw;
    }
  }
  return best;
}

MissionResult run_mission(const World& world, const PlannerVariant& variant, const MissionOptions& options) {
  MissionResult result;
  result.planner = variant.name();
  for (const auto& [from, to] : world.spec.legs()) {
    const auto leg = plan_leg(world, variant, from, to, options);
    if (leg) {
      result.leg_length.push_back(path_length(leg->path));
      result.leg_time.push_back(simulate_traversal(leg->path, world.passable, world.spec.robot, options.speed));
      result.leg_success.push_back(true);
      result.residual_collisions += leg->residual;
    } else {
      result.leg_length.push_back(0.0);
      result.leg_time.push_back(0.0);
      result.leg_success.push_back(false);
    }
  }
  return result;
}

BenchmarkResult run_benchmark(const BenchmarkConfig& config) {
  if (config.repeats < 1) throw Error(ErrorCode::InvalidArgument, "benchmark: repeats must be >= 1");
  config.mission.speed.validate();
  struct Job {
    std::size_t spec;
    int repeat;
  };
  std::vector<Job> jobs;
  for (std::size_t s = 0; s < config.specs.size(); ++s) {
    for (int r = 0; r < config.repeats; ++r) jobs.push_back({s, r});
  }
  const std::size_t np = config.planners.size();
  std::vector<MissionResult> missions(jobs.size() * np);
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      try {
        ScenarioSpec spec = config.specs[jobs[j].spec];
        spec.seed += static_cast<std::uint64_t>(jobs[j].repeat);
        const World world = generate_world(spec);
        for (std::size_t p = 0; p < np; ++p) missions[j * np + p] = run_mission(world, config.planners[p], config.mission);
      } catch (...) {
        errors[j] = std::current_exception();
      }
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(config.jobs, static_cast<unsigned>(jobs.size())));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  BenchmarkResult out;
  out.missions = missions;
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    const ScenarioSpec& spec = config.specs[jobs[j].spec];
    for (std::size_t p = 0; p < np; ++p) {
      const MissionResult& m = missions[j * np + p];
      for (std::size_t leg = 0; leg < m.leg_success.size(); ++leg) {
        out.rows.push_back({spec.name, m.planner, spec.seed + static_cast<std::uint64_t>(jobs[j].repeat),
                            static_cast<int>(leg) + 1, m.leg_length[leg], m.leg_time[leg], m.leg_success[leg]});
      }
    }
  }
  for (std::size_t s = 0; s < config.specs.size(); ++s) {
    for (std::size_t p = 0; p < np; ++p) {
      SummaryRow row;
      row.setup = config.specs[s].name;
      row.planner = config.planners[p].name();
      double sum_d = 0.0, sum_t = 0.0, min_d = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < jobs.size(); ++j) {
        if (jobs[j].spec != s) continue;
        const MissionResult& m = missions[j * np + p];
        ++row.runs;
        if (!m.success()) {
          ++row.failures;
          continue;
        }
        sum_d += m.total_length();
        sum_t += m.total_time();
        min_d = std::min(min_d, m.total_length());
      }
      const int ok = row.runs - row.failures;
      if (ok > 0) {
        row.mean_distance = sum_d / ok;
        row.mean_time = sum_t / ok;
        row.min_distance = min_d;
      }
      out.summary.push_back(row);
    }
  }
  return out;
}

void write_results_csv(std::ostream& out, const std::vector<BenchmarkRow>& rows) {
  out << "setup,planner,seed,leg,distance_m,time_s,status\n";
  for (const auto& r : rows) {
    if (r.ok) {
      fmt::print(out, "{},{},{},{},{:.4f},{:.3f},SUCCESS\n", r.setup, r.planner, r.seed, r.leg, r.distance_m, r.time_s);
    } else {
      fmt::print(out, "{},{},{},{},,,FAILURE\n", r.setup, r.planner, r.seed, r.leg);
    }
  }
}

void write_summary(std::ostream& out, const std::vector<SummaryRow>& summary) {
  fmt::print(out, "{:<10} {:<14} {:>5} {:>9} {:>10} {:>10} {:>10}\n", "setup", "planner", "runs", "fail_rate",
             "mean_dist", "min_dist", "mean_time");
  for (const auto& r : summary) {
    if (r.failures == r.runs) {
      fmt::print(out, "{:<10} {:<14} {:>5} {:>9.2f} {:>10} {:>10} {:>10}\n", r.setup, r.planner, r.runs,
                 r.failure_rate(), "FAILURE", "FAILURE", "FAILURE");
    } else {
      fmt::print(out, "{:<10} {:<14} {:>5} {:>9.2f} {:>10.2f} {:>10.2f} {:>10.1f}\n", r.setup, r.planner, r.runs,
                 r.failure_rate(), r.mean_distance, r.min_distance, r.mean_time);
    }
  }
}

void write_table(std::ostream& out, const std::vector<SummaryRow>& summary) {
  std::vector<std::string> setups, planners;
  std::map<std::pair<std::string, std::string>, const SummaryRow*> cell;
  for (const auto& r : summary) {
    if (std::find(setups.begin(), setups.end(), r.setup) == setups.end()) setups.push_back(r.setup);
    if (std::find(planners.begin(), planners.end(), r.planner) == planners.end()) planners.push_back(r.planner);
    cell[{r.planner, r.setup}] = &r;
  }
  std::string header = fmt::format("{:<14}", "planner");
  std::string sub = fmt::format("{:<14}", "");
  for (const auto& s : setups) {
    header += fmt::format(" | {:^26}", s);
    sub += fmt::format(" | {:>9} {:>9} {:>6}", "dist (m)", "time (s)", "fail");
  }
  out << header << '\n' << sub << '\n' << std::string(sub.size(), '-') << '\n';
  for (const auto& p : planners) {
    std::string line = fmt::format("{:<14}", p);
    for (const auto& s : setups) {
      const auto it = cell.find({p, s});
      if (it == cell.end()) {
        line += fmt::format(" | {:>9} {:>9} {:>6}", "-", "-", "-");
      } else if (it->second->failures == it->second->runs) {
        line += fmt::format(" | {:>9} {:>9} {:>5.0f}%", "FAILURE", "FAILURE", 100.0);
      } else {
        const SummaryRow& r = *it->second;
        line += fmt::format(" | {:>9.2f} {:>9.0f} {:>5.0f}%", r.mean_distance, r.mean_time, 100.0 * r.failure_rate());
      }
    }
    out << line << '\n';
  }
}

}  // namespace poa
