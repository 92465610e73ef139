#include "poa/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "poa/error.hpp"
#include "poa/io.hpp"

namespace poa {

ScenarioSpec::ScenarioSpec() {
  waypoints = {Pose2D{1.0, 14.0, 0.0}, Pose2D{14.0, 14.0, 0.0}};
  poa_astar.n_skip = 5;
  poa_astar.n_clear = 20;
  gvd = GvdParams::for_robot(robot);
  terrain_model = TerrainParams::for_robot(robot);
}

void ScenarioSpec::validate() const {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::InvalidArgument, "scenario: " + m); };
  if (!(extent_x > 0.0 && extent_y > 0.0)) fail("extent must be positive");
  if (!(grid_resolution > 0.0)) fail("grid resolution must be positive");
  if (std::abs(extent_x / grid_resolution - std::round(extent_x / grid_resolution)) > 1e-9 ||
      std::abs(extent_y / grid_resolution - std::round(extent_y / grid_resolution)) > 1e-9) {
    fail("extent must be a whole number of cells");
  }
  if (n_passable < 0 || n_unpassable < 0) fail("stone counts must be >= 0");
  for (const auto* s : {&passable_size, &unpassable_size}) {
    for (const auto* r : {&s->width, &s->length, &s->height}) {
      if (!(r->min > 0.0 && r->min <= r->max)) fail("stone size ranges need 0 < min <= max");
    }
  }
  robot.validate();
  if (passable_size.width.max > robot.clearance_width || passable_size.height.max > robot.clearance_height) {
    fail("passable stones must fit the robot's clearance box");
  }
  if (unpassable_size.width.min <= robot.clearance_width && unpassable_size.height.min <= robot.clearance_height) {
    fail("unpassable stones must exceed the robot's clearance box");
  }
  if (endpoint_keepout < 0.0 || unpassable_gap < 0.0) fail("keep-out distances must be >= 0");
  if (heightfield.n_bumps < 0) fail("bump count must be >= 0");
  if (!(heightfield.amplitude.min <= heightfield.amplitude.max)) fail("amplitude range is empty");
  if (!(heightfield.sigma.min > 0.0 && heightfield.sigma.min <= heightfield.sigma.max)) fail("bad sigma range");
  if (!(terrain_spacing > 0.0 && stone_point_spacing > 0.0)) fail("point spacings must be positive");
  if (waypoints.empty()) fail("mission needs at least one waypoint");
  const GridGeometry g = grid_geometry();
  if (!g.try_world_to_cell(start.position())) fail("start lies outside the map");
  for (const auto& w : waypoints) {
    if (!g.try_world_to_cell(w.position())) fail("waypoint lies outside the map");
  }
  mapping.validate();
  poa.validate();
  poa_astar.validate();
  rrt.validate();
  terrain_model.validate();
  limits.validate();
  if (max_rounds < 1) fail("max_rounds must be >= 1");
}

GridGeometry ScenarioSpec::grid_geometry() const {
  GridGeometry g;
  g.resolution = grid_resolution;
  g.origin = {0.0, 0.0};
  g.width = static_cast<int>(std::lround(extent_x / grid_resolution));
  g.height = static_cast<int>(std::lround(extent_y / grid_resolution));
  return g;
}

std::vector<std::pair<Pose2D, Pose2D>> ScenarioSpec::legs() const {
  std::vector<std::pair<Pose2D, Pose2D>> out;
  Pose2D from = start;
  for (const auto& w : waypoints) {
    out.emplace_back(from, w);
    if (mission == MissionMode::Chain) from = w;
  }
  return out;
}

// ---------------------------------------------------------------------------
// key = value serialization

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = s.find(sep, pos);
    out.push_back(trim(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

std::vector<double> parse_numbers(const std::string& s) {
  std::vector<double> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v)) throw std::invalid_argument(tok);
    out.push_back(v);
  }
  return out;
}

double parse_double(const std::string& s) {
  const auto v = parse_numbers(s);
  if (v.size() != 1) throw std::invalid_argument(s);
  return v.front();
}

template <typename Int>
Int parse_int(const std::string& s) {
  Int v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) throw std::invalid_argument(s);
  return v;
}

bool parse_bool(const std::string& s) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw std::invalid_argument(s);
}

std::string pose_text(const Pose2D& p) {
  return format_double(p.x()) + " " + format_double(p.y()) + " " + format_double(p.theta());
}

Pose2D parse_pose(const std::string& s) {
  const auto v = parse_numbers(s);
  if (v.size() == 2) return {v[0], v[1], 0.0};
  if (v.size() == 3) return {v[0], v[1], v[2]};
  throw std::invalid_argument(s);
}

struct Field {
  std::string key;
  std::function<std::string(const ScenarioSpec&)> get;
  std::function<void(ScenarioSpec&, const std::string&)> set;
};

template <typename Access>
Field num_field(std::string key, Access access) {
  return {std::move(key), [access](const ScenarioSpec& s) { return format_double(access(const_cast<ScenarioSpec&>(s))); },
          [access](ScenarioSpec& s, const std::string& v) { access(s) = parse_double(v); }};
}

template <typename Int, typename Access>
Field int_field(std::string key, Access access) {
  return {std::move(key), [access](const ScenarioSpec& s) { return std::to_string(access(const_cast<ScenarioSpec&>(s))); },
          [access](ScenarioSpec& s, const std::string& v) { access(s) = parse_int<Int>(v); }};
}

template <typename Access>
Field bool_field(std::string key, Access access) {
  return {std::move(key),
          [access](const ScenarioSpec& s) { return std::string(access(const_cast<ScenarioSpec&>(s)) ? "true" : "false"); },
          [access](ScenarioSpec& s, const std::string& v) { access(s) = parse_bool(v); }};
}

template <typename Access>
void range_fields(std::vector<Field>& f, const std::string& key, Access access) {
  f.push_back(num_field(key + ".min", [access](ScenarioSpec& s) -> double& { return access(s).min; }));
  f.push_back(num_field(key + ".max", [access](ScenarioSpec& s) -> double& { return access(s).max; }));
}

template <typename Access>
void poa_fields(std::vector<Field>& f, const std::string& prefix, Access access) {
  f.push_back(int_field<int>(prefix + ".n_skip", [access](ScenarioSpec& s) -> int& { return access(s).n_skip; }));
  f.push_back(int_field<int>(prefix + ".n_clear", [access](ScenarioSpec& s) -> int& { return access(s).n_clear; }));
  f.push_back(num_field(prefix + ".shift_min", [access](ScenarioSpec& s) -> double& { return access(s).shift_min; }));
  f.push_back(num_field(prefix + ".shift_max", [access](ScenarioSpec& s) -> double& { return access(s).shift_max; }));
  f.push_back(num_field(prefix + ".shift_step", [access](ScenarioSpec& s) -> double& { return access(s).shift_step; }));
  f.push_back(num_field(prefix + ".turn_radius", [access](ScenarioSpec& s) -> double& { return access(s).turn_radius; }));
  f.push_back(num_field(prefix + ".waypoint_spacing",
                        [access](ScenarioSpec& s) -> double& { return access(s).waypoint_spacing; }));
  f.push_back(bool_field(prefix + ".resume_after_window",
                         [access](ScenarioSpec& s) -> bool& { return access(s).resume_after_window; }));
}

#define POA_MEMBER(expr) [](ScenarioSpec& s) -> auto& { return expr; }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back({"name", [](const ScenarioSpec& s) { return s.name; },
                 [](ScenarioSpec& s, const std::string& v) {
                   if (v.empty() || v.find_first_of(" \t") != std::string::npos) throw std::invalid_argument(v);
                   s.name = v;
                 }});
    f.push_back(int_field<std::uint64_t>("seed", POA_MEMBER(s.seed)));
    f.push_back(num_field("extent.x", POA_MEMBER(s.extent_x)));
    f.push_back(num_field("extent.y", POA_MEMBER(s.extent_y)));
    f.push_back(num_field("grid.resolution", POA_MEMBER(s.grid_resolution)));

    f.push_back(int_field<int>("stones.passable.count", POA_MEMBER(s.n_passable)));
    range_fields(f, "stones.passable.width", POA_MEMBER(s.passable_size.width));
    range_fields(f, "stones.passable.length", POA_MEMBER(s.passable_size.length));
    range_fields(f, "stones.passable.height", POA_MEMBER(s.passable_size.height));
    f.push_back(int_field<int>("stones.unpassable.count", POA_MEMBER(s.n_unpassable)));
    range_fields(f, "stones.unpassable.width", POA_MEMBER(s.unpassable_size.width));
    range_fields(f, "stones.unpassable.length", POA_MEMBER(s.unpassable_size.length));
    range_fields(f, "stones.unpassable.height", POA_MEMBER(s.unpassable_size.height));
    f.push_back(num_field("stones.endpoint_keepout", POA_MEMBER(s.endpoint_keepout)));
    f.push_back(num_field("stones.unpassable_gap", POA_MEMBER(s.unpassable_gap)));
    f.push_back(num_field("stones.point_spacing", POA_MEMBER(s.stone_point_spacing)));

    f.push_back({"terrain.kind",
                 [](const ScenarioSpec& s) { return std::string(s.terrain == TerrainKind::Flat ? "flat" : "heightfield"); },
                 [](ScenarioSpec& s, const std::string& v) {
                   if (v == "flat") s.terrain = TerrainKind::Flat;
                   else if (v == "heightfield") s.terrain = TerrainKind::Heightfield;
                   else throw std::invalid_argument(v);
                 }});
    f.push_back(num_field("terrain.spacing", POA_MEMBER(s.terrain_spacing)));
    f.push_back(int_field<int>("terrain.bumps", POA_MEMBER(s.heightfield.n_bumps)));
    range_fields(f, "terrain.amplitude", POA_MEMBER(s.heightfield.amplitude));
    range_fields(f, "terrain.sigma", POA_MEMBER(s.heightfield.sigma));
    f.push_back({"terrain.fixed_bumps",
                 [](const ScenarioSpec& s) {
                   std::string out;
                   for (const auto& b : s.heightfield.fixed_bumps) {
                     if (!out.empty()) out += "; ";
                     out += format_double(b.x) + " " + format_double(b.y) + " " + format_double(b.amplitude) + " " +
                            format_double(b.sigma);
                   }
                   return out;
                 },
                 [](ScenarioSpec& s, const std::string& v) {
                   s.heightfield.fixed_bumps.clear();
                   if (v.empty()) return;
                   for (const auto& item : split(v, ';')) {
                     const auto n = parse_numbers(item);
                     if (n.size() != 4 || !(n[3] > 0.0)) throw std::invalid_argument(item);
                     s.heightfield.fixed_bumps.push_back({n[0], n[1], n[2], n[3]});
                   }
                 }});

    f.push_back({"mission.start", [](const ScenarioSpec& s) { return pose_text(s.start); },
                 [](ScenarioSpec& s, const std::string& v) { s.start = parse_pose(v); }});
    f.push_back({"mission.waypoints",
                 [](const ScenarioSpec& s) {
                   std::string out;
                   for (const auto& w : s.waypoints) {
                     if (!out.empty()) out += "; ";
                     out += pose_text(w);
                   }
                   return out;
                 },
                 [](ScenarioSpec& s, const std::string& v) {
                   s.waypoints.clear();
                   for (const auto& item : split(v, ';')) s.waypoints.push_back(parse_pose(item));
                 }});
    f.push_back({"mission.mode",
                 [](const ScenarioSpec& s) { return std::string(s.mission == MissionMode::Chain ? "chain" : "star"); },
                 [](ScenarioSpec& s, const std::string& v) {
                   if (v == "chain") s.mission = MissionMode::Chain;
                   else if (v == "star") s.mission = MissionMode::Star;
                   else throw std::invalid_argument(v);
                 }});

    f.push_back(num_field("robot.track_width", POA_MEMBER(s.robot.track_width)));
    f.push_back(num_field("robot.wheel_ellipse_a", POA_MEMBER(s.robot.wheel_ellipse_a)));
    f.push_back(num_field("robot.wheel_ellipse_b", POA_MEMBER(s.robot.wheel_ellipse_b)));
    f.push_back(num_field("robot.clearance_height", POA_MEMBER(s.robot.clearance_height)));
    f.push_back(num_field("robot.clearance_width", POA_MEMBER(s.robot.clearance_width)));
    f.push_back(num_field("robot.turn_radius_min", POA_MEMBER(s.robot.turn_radius_min)));
    f.push_back(num_field("robot.wheel_base_contact", POA_MEMBER(s.robot.wheel_base_contact)));

    f.push_back(num_field("mapping.p", POA_MEMBER(s.mapping.p)));
    f.push_back(num_field("mapping.occupied_threshold", POA_MEMBER(s.mapping.occupied_threshold)));
    f.push_back(num_field("mapping.p_clamp_epsilon", POA_MEMBER(s.mapping.p_clamp_epsilon)));

    poa_fields(f, "poa", POA_MEMBER(s.poa));
    poa_fields(f, "poa_astar", POA_MEMBER(s.poa_astar));

    f.push_back(int_field<int>("rrt.max_iterations", POA_MEMBER(s.rrt.max_iterations)));
    f.push_back(num_field("rrt.step_size", POA_MEMBER(s.rrt.step_size)));
    f.push_back(num_field("rrt.goal_bias", POA_MEMBER(s.rrt.goal_bias)));
    f.push_back(num_field("rrt.rewire_radius", POA_MEMBER(s.rrt.rewire_radius)));
    f.push_back(int_field<std::uint64_t>("rrt.seed", POA_MEMBER(s.rrt.rng_seed)));
    f.push_back(num_field("gvd.min_clearance", POA_MEMBER(s.gvd.min_clearance)));

    f.push_back(num_field("terrain3d.inflate_radius", POA_MEMBER(s.terrain_model.inflate_radius)));
    f.push_back(num_field("terrain3d.voxel", POA_MEMBER(s.terrain_model.voxel)));
    f.push_back(int_field<int>("terrain3d.outlier_k", POA_MEMBER(s.terrain_model.outlier_k)));
    f.push_back(num_field("terrain3d.outlier_stddev", POA_MEMBER(s.terrain_model.outlier_stddev)));
    f.push_back(num_field("terrain3d.rbf_smoothing", POA_MEMBER(s.terrain_model.rbf_smoothing)));
    f.push_back(num_field("terrain3d.rbf_decimation", POA_MEMBER(s.terrain_model.rbf_decimation)));
    f.push_back(int_field<std::size_t>("terrain3d.rbf_max_centres", POA_MEMBER(s.terrain_model.rbf_max_centres)));
    f.push_back(num_field("terrain3d.gamma_max", POA_MEMBER(s.limits.gamma_max)));
    f.push_back(num_field("terrain3d.phi_max", POA_MEMBER(s.limits.phi_max)));
    f.push_back(int_field<int>("terrain3d.max_rounds", POA_MEMBER(s.max_rounds)));
    return f;
  }();
  return table;
}

#undef POA_MEMBER

}  // namespace

ScenarioSpec parse_scenario(std::istream& in) { return parse_scenario(in, ScenarioSpec{}); }

ScenarioSpec parse_scenario(std::istream& in, ScenarioSpec spec) {
  std::map<std::string, const Field*> by_key;
  for (const auto& f : fields()) by_key[f.key] = &f;
  std::set<std::string> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    const std::string body = trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (eq == std::string::npos) throw Error(ErrorCode::Parse, where + "expected 'key = value'");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    const auto it = by_key.find(key);
    if (it == by_key.end()) throw Error(ErrorCode::Parse, where + "unknown key '" + key + "'");
    if (!seen.insert(key).second) throw Error(ErrorCode::Parse, where + "duplicate key '" + key + "'");
    try {
      it->second->set(spec, value);
    } catch (const std::exception&) {
      throw Error(ErrorCode::Parse, where + "invalid value '" + value + "' for key '" + key + "'");
    }
  }
  try {
    spec.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::Parse, e.what());
  }
  return spec;
}

void write_scenario(std::ostream& out, const ScenarioSpec& spec) {
  for (const auto& f : fields()) out << f.key << " = " << f.get(spec) << '\n';
}

ScenarioSpec load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return parse_scenario(in);
}

// ---------------------------------------------------------------------------
// world generation

double Heightfield::operator()(double x, double y) const {
  double h = 0.0;
  for (const auto& b : bumps_) {
    const double dx = x - b.x, dy = y - b.y;
    h += b.amplitude * std::exp(-(dx * dx + dy * dy) / (2.0 * b.sigma * b.sigma));
  }
  return scale_ * h;
}

namespace {

enum Stream : std::uint64_t { kUnpassable = 1, kPassable = 2, kTerrain = 3, kSampling = 4 };

// Portable uniform draws on top of mt19937_64; the standard distributions
// are implementation-defined.
class Rng {
 public:
  Rng(std::uint64_t seed, Stream stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream)};
    engine_.seed(seq);
  }
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double uniform(SizeRange r) { return uniform(r.min, r.max); }

 private:
  std::mt19937_64 engine_;
};

constexpr int kMaxAttempts = 5000;
constexpr double kPassableGap = 0.02;
constexpr double kBorderMargin = 0.3;
constexpr double kEndpointSlopeLimit = 0.12;  // terrain slope allowed around mission points
constexpr int kMaxTerrainDraws = 500;

std::vector<Vec2> mission_points(const ScenarioSpec& spec) {
  std::vector<Vec2> pts{spec.start.position()};
  for (const auto& w : spec.waypoints) pts.push_back(w.position());
  return pts;
}

Stone draw_stone(Rng& rng, const ScenarioSpec& spec, const StoneSizes& sizes, PointLabel label) {
  Stone s;
  s.label = label;
  s.semi_width = rng.uniform(sizes.width) / 2.0;
  s.semi_length = std::max(rng.uniform(sizes.length) / 2.0, s.semi_width);
  s.height = rng.uniform(sizes.height);
  s.yaw = rng.uniform(-std::numbers::pi, std::numbers::pi);
  const double m = s.semi_length + kBorderMargin;
  s.center = {rng.uniform(m, spec.extent_x - m), rng.uniform(m, spec.extent_y - m)};
  return s;
}

bool clear_of_endpoints(const Stone& s, const std::vector<Vec2>& endpoints, double keepout) {
  const Ellipse2D grown{s.center, s.semi_length + keepout, s.semi_width + keepout, s.yaw};
  return std::none_of(endpoints.begin(), endpoints.end(), [&](Vec2 p) { return grown.implicit(p) <= 1.0; });
}

std::vector<std::size_t> footprint_cells(const Stone& s, const GridGeometry& g) {
  std::vector<std::size_t> cells;
  for_each_cell_overlapping(s.footprint(), g, [&](CellIndex c) {
    if (ellipse_overlaps_cell(s.footprint(), g, c)) cells.push_back(g.index(c));
  });
  return cells;
}

std::vector<Stone> place_unpassable(const ScenarioSpec& spec, const std::vector<Vec2>& endpoints) {
  Rng rng(spec.seed, kUnpassable);
  std::vector<Stone> stones;
  for (int i = 0; i < spec.n_unpassable; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < kMaxAttempts && !placed; ++attempt) {
      Stone s = draw_stone(rng, spec, spec.unpassable_size, PointLabel::UnpassableObstacle);
      if (!clear_of_endpoints(s, endpoints, spec.endpoint_keepout)) continue;
      const bool apart = std::all_of(stones.begin(), stones.end(), [&](const Stone& o) {
        return distance(o.center, s.center) >= o.semi_length + s.semi_length + spec.unpassable_gap;
      });
      if (!apart) continue;
      s.id = i;
      stones.push_back(s);
      placed = true;
    }
    if (!placed) throw Error(ErrorCode::PlacementFailure, "cannot place unpassable stone " + std::to_string(i));
  }
  return stones;
}

void place_passable(const ScenarioSpec& spec, const std::vector<Vec2>& endpoints, std::vector<Stone>& stones) {
  const GridGeometry g = spec.grid_geometry();
  std::vector<std::uint8_t> blocked(g.size(), 0);
  for (const auto& s : stones) {
    for (std::size_t c : footprint_cells(s, g)) blocked[c] = 1;
  }
  Rng rng(spec.seed, kPassable);
  const std::size_t first = stones.size();
  for (int i = 0; i < spec.n_passable; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < kMaxAttempts && !placed; ++attempt) {
      Stone s = draw_stone(rng, spec, spec.passable_size, PointLabel::PassableObstacle);
      if (!clear_of_endpoints(s, endpoints, spec.endpoint_keepout)) continue;
      const auto cells = footprint_cells(s, g);
      if (std::any_of(cells.begin(), cells.end(), [&](std::size_t c) { return blocked[c] != 0; })) continue;
      const bool apart = std::all_of(stones.begin() + static_cast<std::ptrdiff_t>(first), stones.end(),
                                     [&](const Stone& o) {
                                       return distance(o.center, s.center) >= o.semi_length + s.semi_length + kPassableGap;
                                     });
      if (!apart) continue;
      s.id = static_cast<std::int64_t>(stones.size());
      stones.push_back(s);
      placed = true;
    }
    if (!placed) throw Error(ErrorCode::PlacementFailure, "cannot place passable stone " + std::to_string(i));
  }
}

double max_abs_on_lattice(const Heightfield& h, const ScenarioSpec& spec) {
  double m = 0.0;
  for (double y = 0.0; y <= spec.extent_y; y += 0.1) {
    for (double x = 0.0; x <= spec.extent_x; x += 0.1) m = std::max(m, std::abs(h(x, y)));
  }
  return m;
}

std::vector<Vec2> endpoint_ring(const std::vector<Vec2>& endpoints) {
  std::vector<Vec2> ring;
  for (Vec2 p : endpoints) {
    ring.push_back(p);
    for (double r : {0.35, 0.7, 1.05}) {
      for (int k = 0; k < 8; ++k) {
        const double a = k * std::numbers::pi / 4.0;
        ring.push_back({p.x + r * std::cos(a), p.y + r * std::sin(a)});
      }
    }
  }
  return ring;
}

Vec2 bump_gradient(const Bump& b, Vec2 p) {
  const double dx = p.x - b.x, dy = p.y - b.y;
  const double s2 = b.sigma * b.sigma;
  const double e = b.amplitude * std::exp(-(dx * dx + dy * dy) / (2.0 * s2));
  return {-e * dx / s2, -e * dy / s2};
}

// Random bumps are drawn one at a time; a bump that would tilt the ground
// around a mission point beyond kEndpointSlopeLimit is redrawn. Rescaling
// afterwards only flattens, so the property survives it.
Heightfield make_ground(const ScenarioSpec& spec, const std::vector<Vec2>& endpoints) {
  if (spec.terrain == TerrainKind::Flat) return {};
  Rng rng(spec.seed, kTerrain);
  const auto ring = endpoint_ring(endpoints);
  std::vector<Vec2> grad(ring.size());
  std::vector<Bump> bumps = spec.heightfield.fixed_bumps;
  for (const auto& b : bumps) {
    for (std::size_t i = 0; i < ring.size(); ++i) grad[i] = grad[i] + bump_gradient(b, ring[i]);
  }
  for (int i = 0; i < spec.heightfield.n_bumps; ++i) {
    bool accepted = false;
    for (int draw = 0; draw < kMaxTerrainDraws && !accepted; ++draw) {
      Bump b;
      b.x = rng.uniform(0.0, spec.extent_x);
      b.y = rng.uniform(0.0, spec.extent_y);
      b.amplitude = rng.uniform(spec.heightfield.amplitude);
      b.sigma = rng.uniform(spec.heightfield.sigma);
      std::vector<Vec2> next(ring.size());
      accepted = true;
      for (std::size_t k = 0; k < ring.size() && accepted; ++k) {
        next[k] = grad[k] + bump_gradient(b, ring[k]);
        accepted = std::atan(norm(next[k])) <= kEndpointSlopeLimit;
      }
      if (accepted) {
        grad = std::move(next);
        bumps.push_back(b);
      }
    }
    if (!accepted) throw Error(ErrorCode::PlacementFailure, "cannot draw a bump that keeps the mission points level");
  }
  const double bound = std::max(std::abs(spec.heightfield.amplitude.min), std::abs(spec.heightfield.amplitude.max));
  const double peak = max_abs_on_lattice(Heightfield(bumps, 1.0), spec);
  return Heightfield(bumps, peak > bound ? bound / peak : 1.0);
}

void emit_stone_points(const Stone& s, const Heightfield& ground, double max_spacing, LabelledPointCloud& cloud) {
  const double area = std::numbers::pi * s.semi_length * s.semi_width;
  double spacing = std::min(max_spacing, std::sqrt(area / 64.0));
  const double base = ground(s.center.x, s.center.y);
  const double c = std::cos(s.yaw), sn = std::sin(s.yaw);
  for (;;) {
    const std::size_t before = cloud.size();
    const int nu = static_cast<int>(std::ceil(s.semi_length / spacing));
    const int nv = static_cast<int>(std::ceil(s.semi_width / spacing));
    for (int i = -nu; i <= nu; ++i) {
      for (int j = -nv; j <= nv; ++j) {
        const double u = i * spacing, v = j * spacing;
        const double q = (u * u) / (s.semi_length * s.semi_length) + (v * v) / (s.semi_width * s.semi_width);
        if (q > 1.0) continue;
        const double x = s.center.x + c * u - sn * v;
        const double y = s.center.y + sn * u + c * v;
        cloud.push_back({x, y, base + s.height * std::sqrt(1.0 - q), s.label, s.id});
      }
    }
    if (cloud.size() - before >= 50) return;
    cloud.resize(before);
    spacing /= 2.0;
  }
}

}  // namespace

World generate_world(const ScenarioSpec& spec) {
  spec.validate();
  World world;
  world.spec = spec;
  const auto endpoints = mission_points(spec);
  world.stones = place_unpassable(spec, endpoints);
  place_passable(spec, endpoints, world.stones);
  world.ground = make_ground(spec, endpoints);

  // Free-space terrain: one jittered sample per lattice cell, skipped under stones.
  Rng jitter(spec.seed, kSampling);
  const int nx = static_cast<int>(std::lround(spec.extent_x / spec.terrain_spacing));
  const int ny = static_cast<int>(std::lround(spec.extent_y / spec.terrain_spacing));
  const double hx = spec.extent_x / nx, hy = spec.extent_y / ny;
  std::vector<std::vector<std::size_t>> stones_near(static_cast<std::size_t>(nx) * ny);
  for (std::size_t k = 0; k < world.stones.size(); ++k) {
    const Stone& s = world.stones[k];
    const int c0 = std::max(0, static_cast<int>(std::floor((s.center.x - s.semi_length) / hx)));
    const int c1 = std::min(nx - 1, static_cast<int>(std::floor((s.center.x + s.semi_length) / hx)));
    const int r0 = std::max(0, static_cast<int>(std::floor((s.center.y - s.semi_length) / hy)));
    const int r1 = std::min(ny - 1, static_cast<int>(std::floor((s.center.y + s.semi_length) / hy)));
    for (int r = r0; r <= r1; ++r) {
      for (int c = c0; c <= c1; ++c) stones_near[static_cast<std::size_t>(r) * nx + c].push_back(k);
    }
  }
  // Sample count per lattice cell follows the surface area element, so slopes
  // are not sparser than flat ground in 3D.
  constexpr double d = 1e-4;
  for (int r = 0; r < ny; ++r) {
    for (int c = 0; c < nx; ++c) {
      const double cx = (c + 0.5) * hx, cy = (r + 0.5) * hy;
      const double gx = (world.ground(cx + d, cy) - world.ground(cx - d, cy)) / (2.0 * d);
      const double gy = (world.ground(cx, cy + d) - world.ground(cx, cy - d)) / (2.0 * d);
      const double area = std::sqrt(1.0 + gx * gx + gy * gy);
      const double extra = jitter.uniform();
      const int count = static_cast<int>(std::floor(area)) + (extra < area - std::floor(area) ? 1 : 0);
      const auto& near = stones_near[static_cast<std::size_t>(r) * nx + c];
      for (int k = 0; k < count; ++k) {
        const double x = (c + jitter.uniform(0.2, 0.8)) * hx;
        const double y = (r + jitter.uniform(0.2, 0.8)) * hy;
        const bool covered = std::any_of(near.begin(), near.end(), [&](std::size_t i) {
          return world.stones[i].footprint().implicit({x, y}) <= 1.0;
        });
        if (!covered) world.cloud.push_back({x, y, world.ground(x, y), PointLabel::FreeSpace, std::nullopt});
      }
    }
  }
  for (const auto& s : world.stones) emit_stone_points(s, world.ground, spec.stone_point_spacing, world.cloud);

  // Ground truth from the emitted evidence, one observation per cell.
  const GridGeometry g = spec.grid_geometry();
  std::vector<std::array<long, 3>> tally(g.size(), {0, 0, 0});
  for (const auto& p : world.cloud) {
    const auto cell = g.try_world_to_cell({p.x, p.y});
    if (!cell) throw Error(ErrorCode::PlacementFailure, "generated point outside the map");
    ++tally[g.index(*cell)][static_cast<std::size_t>(p.label)];
  }
  world.passable = OccupancyGrid(g, CellState::Unknown);
  world.unpassable = OccupancyGrid(g, CellState::Unknown);
  auto decide = [&](long stone, long env) {
    const double prob = final_probability(log_odds(measurement_probability({stone, env}, spec.mapping)));
    return prob > spec.mapping.occupied_threshold ? CellState::Occupied : CellState::Free;
  };
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto& t = tally[i];
    const long free = t[static_cast<std::size_t>(PointLabel::FreeSpace)];
    const long pass = t[static_cast<std::size_t>(PointLabel::PassableObstacle)];
    const long unpass = t[static_cast<std::size_t>(PointLabel::UnpassableObstacle)];
    if (pass > 0 || free > 0) world.passable.set(i, decide(pass, free));
    if (unpass > 0 || free > 0) world.unpassable.set(i, decide(unpass, free));
  }
  return world;
}

std::vector<ScenarioSpec> builtin_setups() {
  std::vector<ScenarioSpec> out;
  const int counts[] = {104, 159, 206};
  for (int i = 0; i < 3; ++i) {
    ScenarioSpec s;
    s.name = "setup" + std::to_string(i + 1);
    s.n_passable = counts[i];
    s.n_unpassable = 22;
    out.push_back(s);
  }
  ScenarioSpec s3d = out.back();
  s3d.name = "setup3d";
  s3d.terrain = TerrainKind::Heightfield;
  s3d.mission = MissionMode::Star;
  s3d.waypoints = {Pose2D{2.5, 12.0, 0.0}, Pose2D{10.5, 4.0, 0.0}, Pose2D{11.5, 11.5, 0.0}, Pose2D{7.0, 9.0, 0.0}};
  out.push_back(s3d);
  return out;
}

ScenarioSpec builtin_setup(std::string_view name) {
  for (auto& s : builtin_setups()) {
    if (s.name == name) return s;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown builtin setup '" + std::string(name) + "'");
}

bool MissionResult::success() const {
  return !leg_success.empty() && std::all_of(leg_success.begin(), leg_success.end(), [](bool b) { return b; });
}

double MissionResult::total_length() const { return std::accumulate(leg_length.begin(), leg_length.end(), 0.0); }

double MissionResult::total_time() const { return std::accumulate(leg_time.begin(), leg_time.end(), 0.0); }

}  // namespace poa
