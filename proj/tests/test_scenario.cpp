#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "poa/error.hpp"
#include "poa/mapping.hpp"
#include "poa/scenario.hpp"
#include "support.hpp"

using namespace poa;

namespace {

std::string text_of(const ScenarioSpec& spec) {
  std::stringstream s;
  write_scenario(s, spec);
  return s.str();
}

std::string parse_error(const std::string& text) {
  try {
    std::stringstream s(text);
    (void)parse_scenario(s);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Parse);
    return e.what();
  }
  FAIL("expected a parse error");
  return {};
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_SUITE("scenario") {
  TEST_CASE("builtin setups") {
    CHECK(builtin_setup("setup1").n_passable == 104);
    CHECK(builtin_setup("setup2").n_passable == 159);
    CHECK(builtin_setup("setup3").n_passable == 206);
    for (const auto& spec : builtin_setups()) {
      CHECK(spec.n_unpassable == 22);
      CHECK_NOTHROW(spec.validate());
    }
    const ScenarioSpec s3d = builtin_setup("setup3d");
    CHECK(s3d.terrain == TerrainKind::Heightfield);
    CHECK(s3d.heightfield.amplitude.min == -1.0);
    CHECK(s3d.heightfield.amplitude.max == 1.0);
    CHECK(builtin_setups().size() == 4);
    CHECK_THROWS_AS(builtin_setup("setup9"), Error);
  }

  TEST_CASE("scenario text round-trips") {
    for (const auto& spec : builtin_setups()) {
      std::stringstream s(text_of(spec));
      CHECK(text_of(parse_scenario(s)) == text_of(spec));
    }
    ScenarioSpec custom;
    custom.name = "custom";
    custom.mission = MissionMode::Star;
    custom.waypoints = {{3.5, 4.0, 0.5}, {10.0, 2.0, -1.0}};
    custom.heightfield.fixed_bumps = {{2.0, 3.0, 0.4, 1.5}};
    custom.rrt.rng_seed = 77;
    std::stringstream s(text_of(custom));
    const ScenarioSpec back = parse_scenario(s);
    CHECK(text_of(back) == text_of(custom));
    CHECK(back.waypoints.size() == 2);
    CHECK(back.heightfield.fixed_bumps.size() == 1);
  }

  TEST_CASE("parse errors name the line and key") {
    const std::string unknown = parse_error("seed = 3\nwheel_count = 6\n");
    CHECK(contains(unknown, "line 2"));
    CHECK(contains(unknown, "wheel_count"));
    const std::string dup = parse_error("seed = 3\n# comment\nseed = 4\n");
    CHECK(contains(dup, "line 3"));
    CHECK(contains(dup, "seed"));
    const std::string bad = parse_error("robot.track_width = wide\n");
    CHECK(contains(bad, "line 1"));
    CHECK(contains(bad, "robot.track_width"));
    CHECK(contains(parse_error("just words\n"), "line 1"));
    // Values that parse but break the model are rejected as well.
    CHECK(contains(parse_error("grid.resolution = -0.5\n"), "resolution"));
  }

  TEST_CASE("comments, blanks and overlays") {
    std::stringstream s("# header\n\nseed = 9   # trailing\n  stones.passable.count = 12\n");
    const ScenarioSpec spec = parse_scenario(s);
    CHECK(spec.seed == 9);
    CHECK(spec.n_passable == 12);
    CHECK(spec.n_unpassable == ScenarioSpec{}.n_unpassable);

    std::stringstream overlay("seed = 5\n");
    const ScenarioSpec over = parse_scenario(overlay, builtin_setup("setup2"));
    CHECK(over.seed == 5);
    CHECK(over.n_passable == 159);
    CHECK(over.name == "setup2");
  }

  TEST_CASE("loading from a file") {
    test::TempDir dir("scenario");
    const auto path = dir.path() / "s.txt";
    {
      std::ofstream out(path);
      out << "seed = 4\n";
    }
    CHECK(load_scenario(path).seed == 4);
    try {
      (void)load_scenario(dir.path() / "missing.txt");
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Io);
    }
  }

  TEST_CASE("mission legs") {
    ScenarioSpec spec;
    spec.start = {1, 1, 0};
    spec.waypoints = {{5, 5, 0}, {9, 2, 0}};
    auto chain = spec.legs();
    REQUIRE(chain.size() == 2);
    CHECK(chain[0].first == spec.start);
    CHECK(chain[1].first == spec.waypoints[0]);
    CHECK(chain[1].second == spec.waypoints[1]);
    spec.mission = MissionMode::Star;
    auto star = spec.legs();
    REQUIRE(star.size() == 2);
    CHECK(star[1].first == spec.start);
  }

  TEST_CASE("an empty flat world is pure free space") {
    ScenarioSpec spec;
    spec.n_passable = 0;
    spec.n_unpassable = 0;
    spec.waypoints = {{10, 10, 0}};
    const World w = generate_world(spec);
    CHECK_FALSE(w.cloud.empty());
    for (const auto& p : w.cloud) {
      CHECK(p.label == PointLabel::FreeSpace);
      CHECK(p.z == 0.0);
    }
    CHECK(w.passable.count(CellState::Occupied) == 0);
    CHECK(w.unpassable.count(CellState::Occupied) == 0);
    CHECK(w.stones.empty());
  }

  TEST_CASE("generation is reproducible and seed-dependent") {
    const ScenarioSpec spec = builtin_setup("setup1");
    const World a = generate_world(spec), b = generate_world(spec);
    CHECK(a.cloud == b.cloud);
    CHECK(a.passable == b.passable);
    CHECK(a.unpassable == b.unpassable);
    ScenarioSpec other = spec;
    other.seed = spec.seed + 1;
    CHECK_FALSE(generate_world(other).cloud == a.cloud);
  }

  TEST_CASE("stone point spacing controls stone sampling density") {
    ScenarioSpec spec = builtin_setup("setup1");
    auto stone_points = [](const World& w) {
      return std::count_if(w.cloud.begin(), w.cloud.end(),
                           [](const LabelledPoint& p) { return p.label != PointLabel::FreeSpace; });
    };
    const auto fine = stone_points(generate_world(spec));
    spec.stone_point_spacing = 0.04;
    const World coarse = generate_world(spec);
    CHECK(stone_points(coarse) < fine);
    // Small stones are refined until they carry at least 50 points.
    std::map<std::int64_t, int> per_stone;
    for (const auto& p : coarse.cloud) {
      if (p.instance_id) ++per_stone[*p.instance_id];
    }
    REQUIRE(per_stone.size() == coarse.stones.size());
    for (const auto& [id, n] : per_stone) CHECK(n >= 50);
  }

  TEST_CASE("setups of one seed share their unpassable stones") {
    for (std::uint64_t seed : {1, 2, 3}) {
      ScenarioSpec s1 = builtin_setup("setup1"), s2 = builtin_setup("setup2"), s3 = builtin_setup("setup3");
      s1.seed = s2.seed = s3.seed = seed;
      const World w1 = generate_world(s1), w2 = generate_world(s2), w3 = generate_world(s3);
      CHECK(w1.unpassable == w2.unpassable);
      CHECK(w1.unpassable == w3.unpassable);
    }
  }

  TEST_CASE("instance ids cover every stone") {
    const ScenarioSpec spec = builtin_setup("setup3");
    const World w = generate_world(spec);
    std::set<std::int64_t> passable_ids, unpassable_ids;
    for (const auto& p : w.cloud) {
      if (p.label == PointLabel::FreeSpace) {
        CHECK_FALSE(p.instance_id.has_value());
        continue;
      }
      REQUIRE(p.instance_id.has_value());
      (p.label == PointLabel::PassableObstacle ? passable_ids : unpassable_ids).insert(*p.instance_id);
    }
    CHECK(passable_ids.size() == 206);
    CHECK(unpassable_ids.size() == 22);
    CHECK(w.stones.size() == 228);
    for (std::size_t i = 0; i < 22; ++i) CHECK(w.stones[i].label == PointLabel::UnpassableObstacle);
  }

  TEST_CASE("stone classes respect the clearance box") {
    const ScenarioSpec spec = builtin_setup("setup3");
    const World w = generate_world(spec);
    for (const auto& s : w.stones) {
      const bool fits = 2.0 * s.semi_width <= spec.robot.clearance_width && s.height <= spec.robot.clearance_height;
      CHECK(fits == (s.label == PointLabel::PassableObstacle));
      for (const auto& p : spec.legs()) {
        CHECK(distance(s.center, p.first.position()) >= spec.endpoint_keepout);
        CHECK(distance(s.center, p.second.position()) >= spec.endpoint_keepout);
      }
    }
  }

  TEST_CASE("mapping recovers the ground truth of every builtin") {
    for (const auto& spec : builtin_setups()) {
      const World w = generate_world(spec);
      Mapper m(spec.grid_geometry(), spec.mapping);
      m.ingest(w.cloud);
      CHECK(m.passable_grid() == w.passable);
      CHECK(m.unpassable_grid() == w.unpassable);
    }
  }

  TEST_CASE("impossible placements fail cleanly") {
    ScenarioSpec spec;
    spec.extent_x = spec.extent_y = 3.0;
    spec.start = {0.5, 0.5, 0.0};
    spec.waypoints = {{2.5, 2.5, 0.0}};
    spec.n_unpassable = 200;
    try {
      (void)generate_world(spec);
      FAIL("expected PlacementFailure");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::PlacementFailure);
    }
  }

  TEST_CASE("heightfield terrain") {
    const ScenarioSpec spec = builtin_setup("setup3d");
    const World w = generate_world(spec);
    double lo = 0.0, hi = 0.0;
    for (const auto& p : w.cloud) {
      if (p.label != PointLabel::FreeSpace) continue;
      CHECK(p.z == doctest::Approx(w.ground(p.x, p.y)));
      lo = std::min(lo, p.z);
      hi = std::max(hi, p.z);
    }
    CHECK(hi - lo > 0.2);
    CHECK(w.ground.bumps().size() >= static_cast<std::size_t>(spec.heightfield.n_bumps));
  }
}
