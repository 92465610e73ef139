#include <doctest.h>

#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

#include "poa/error.hpp"
#include "poa/scenario.hpp"
#include "poa/terrain.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace poa;
using poa::test::uniform;

namespace {

constexpr double kPi = std::numbers::pi;

using Surface = std::function<double(double, double)>;

LabelledPointCloud sampled_cloud(const Surface& f, double extent, double spacing = 0.1) {
  LabelledPointCloud c;
  const int n = static_cast<int>(std::lround(extent / spacing));
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      const double x = i * spacing, y = j * spacing;
      c.push_back({x, y, f(x, y), PointLabel::FreeSpace, std::nullopt});
    }
  }
  return c;
}

TerrainModel model_of(const Surface& f, double extent) { return TerrainModel(sampled_cloud(f, extent), TerrainParams{}); }

// Roll and pitch of the wheel stencil evaluated on the exact surface.
Attitude exact_attitude(const Surface& f, const Pose2D& p, const RobotGeometry& geom) {
  const double c = std::cos(p.theta()), s = std::sin(p.theta());
  const double hw = geom.track_width / 2.0, hl = geom.wheel_base_contact / 2.0;
  const double left = f(p.x() - hw * s, p.y() + hw * c), right = f(p.x() + hw * s, p.y() - hw * c);
  const double front = f(p.x() + hl * c, p.y() + hl * s), back = f(p.x() - hl * c, p.y() - hl * s);
  return {std::atan2(left - right, geom.track_width), std::atan2(front - back, geom.wheel_base_contact)};
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Io;  // sentinel: nothing thrown
}

}  // namespace

TEST_SUITE("terrain") {
  TEST_CASE("inflation matches a centre-distance oracle") {
    for (const double radius : {0.0, 0.42, 0.5, 0.71, 1.2}) {
      auto grid = test::empty_grid(12, 12);
      grid.set({5, 5}, CellState::Occupied);
      grid.set({0, 11}, CellState::Occupied);
      const auto out = inflate(grid, radius);
      const auto& g = grid.geometry();
      for (std::size_t i = 0; i < g.size(); ++i) {
        bool expected = false;
        for (std::size_t j = 0; j < g.size(); ++j) {
          if (grid.occupied(g.cell_of(j)) &&
              distance(g.cell_center(g.cell_of(i)), g.cell_center(g.cell_of(j))) <= radius + 1e-12) {
            expected = true;
          }
        }
        CHECK(out.occupied(g.cell_of(i)) == expected);
      }
    }
    auto one = test::empty_grid(6, 6);
    one.set({2, 2}, CellState::Occupied);
    CHECK(inflate(one, 0.42) == one);  // below one cell: no growth
    CHECK(inflate(one, 0.5).count(CellState::Occupied) == 5);
    CHECK(inflate(one, 0.71).count(CellState::Occupied) == 9);
  }

  TEST_CASE("relabel precedence") {
    const auto pass = test::grid_from_rows({"##", ".."});
    const auto unpass = test::grid_from_rows({"#.", ".."});
    const LabelledPointCloud in{{0.2, 0.7, 0.1, PointLabel::FreeSpace, std::nullopt},
                                {0.7, 0.7, 0.1, PointLabel::UnpassableObstacle, 3},
                                {0.2, 0.2, 0.1, PointLabel::PassableObstacle, 4},
                                {5.0, 5.0, 0.1, PointLabel::PassableObstacle, 5}};
    const auto out = relabel(in, pass, unpass);
    REQUIRE(out.size() == 4);
    CHECK(out[0].label == PointLabel::UnpassableObstacle);
    CHECK(out[1].label == PointLabel::PassableObstacle);
    CHECK(out[2].label == PointLabel::FreeSpace);
    CHECK(out[3].label == PointLabel::PassableObstacle);
    CHECK_THROWS_AS(relabel(in, pass, test::empty_grid(3, 2)), Error);
  }

  TEST_CASE("statistical outlier removal drops an isolated point") {
    auto cloud = sampled_cloud([](double, double) { return 0.0; }, 2.0);
    const std::size_t n = cloud.size();
    cloud.push_back({1.0, 1.0, 5.0, PointLabel::FreeSpace, std::nullopt});
    const auto out = remove_statistical_outliers(cloud, 8, 1.0);
    for (const auto& p : out) CHECK(p.z < 1.0);
    CHECK(out.size() >= n * 9 / 10);
    const LabelledPointCloud few(5, LabelledPoint{});
    CHECK(remove_statistical_outliers(few, 8, 1.0).size() == 5);
    CHECK_THROWS_AS(remove_statistical_outliers(cloud, 0, 1.0), Error);
  }

  TEST_CASE("voxel downsampling keeps one point per occupied voxel") {
    std::mt19937_64 rng(17);
    LabelledPointCloud cloud;
    for (int i = 0; i < 3000; ++i) {
      cloud.push_back({uniform(rng, 0.0, 2.0), uniform(rng, 0.0, 2.0), uniform(rng, 0.0, 0.3),
                       static_cast<PointLabel>(static_cast<int>(uniform(rng, 0, 3))), std::nullopt});
    }
    std::set<std::tuple<long, long, long>> voxels;
    for (const auto& p : cloud) {
      voxels.emplace(std::lround(std::floor(p.x / 0.1)), std::lround(std::floor(p.y / 0.1)),
                     std::lround(std::floor(p.z / 0.1)));
    }
    const auto out = voxel_downsample(cloud, 0.1);
    CHECK(out.size() == voxels.size());

    const LabelledPointCloud mixed{{0.01, 0.01, 0.01, PointLabel::FreeSpace, std::nullopt},
                                   {0.03, 0.01, 0.01, PointLabel::FreeSpace, std::nullopt},
                                   {0.05, 0.04, 0.01, PointLabel::PassableObstacle, 8},
                                   {0.51, 0.01, 0.01, PointLabel::FreeSpace, std::nullopt},
                                   {0.53, 0.01, 0.01, PointLabel::UnpassableObstacle, 4},
                                   {0.55, 0.01, 0.01, PointLabel::UnpassableObstacle, 2}};
    const auto d = voxel_downsample(mixed, 0.1);
    REQUIRE(d.size() == 2);
    std::map<int, LabelledPoint> by_voxel;
    for (const auto& p : d) by_voxel[static_cast<int>(p.x / 0.1)] = p;
    CHECK(by_voxel[0].label == PointLabel::FreeSpace);
    CHECK(by_voxel[0].x == doctest::Approx(0.03));
    CHECK(by_voxel[0].y == doctest::Approx(0.02));
    CHECK(by_voxel[5].label == PointLabel::UnpassableObstacle);
    CHECK(by_voxel[5].instance_id == std::optional<std::int64_t>(2));
    CHECK_THROWS_AS(voxel_downsample(mixed, 0.0), Error);
  }

  TEST_CASE("k-d tree agrees with a linear scan") {
    std::mt19937_64 rng(23);
    std::vector<KdTree<3>::Point> pts;
    for (int i = 0; i < 2000; ++i) pts.push_back({uniform(rng, 0, 5), uniform(rng, 0, 5), uniform(rng, 0, 1)});
    pts.push_back(pts[10]);  // exact duplicate: the smaller index wins
    const KdTree<3> tree(pts);
    for (int q = 0; q < 200; ++q) {
      const KdTree<3>::Point p{uniform(rng, -1, 6), uniform(rng, -1, 6), uniform(rng, -0.5, 1.5)};
      std::vector<std::pair<double, std::size_t>> all;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        double d = 0.0;
        for (int k = 0; k < 3; ++k) d += (pts[i][k] - p[k]) * (pts[i][k] - p[k]);
        all.emplace_back(d, i);
      }
      std::sort(all.begin(), all.end());
      const auto knn = tree.knn(p, 8);
      REQUIRE(knn.size() == 8);
      for (std::size_t k = 0; k < 8; ++k) CHECK(knn[k] == all[k]);
      CHECK(tree.nearest(p).first == all[0].second);
    }
    CHECK(tree.nearest(pts[10]).first == 10);
    CHECK(KdTree<2>().nearest({0, 0}).first == 0);
  }

  TEST_CASE("thin-plate spline reproduces planes and interpolates") {
    std::mt19937_64 rng(29);
    std::vector<std::array<double, 3>> plane, bumpy;
    for (int i = 0; i < 150; ++i) {
      const double x = uniform(rng, 0, 5), y = uniform(rng, 0, 5);
      plane.push_back({x, y, 0.3 * x - 0.2 * y + 1.0});
      bumpy.push_back({x, y, std::sin(x) * std::cos(y)});
    }
    const ThinPlateSpline smooth(plane, 0.5);
    for (int i = 0; i < 50; ++i) {
      const double x = uniform(rng, 0, 5), y = uniform(rng, 0, 5);
      CHECK(smooth(x, y) == doctest::Approx(0.3 * x - 0.2 * y + 1.0).epsilon(1e-8));
    }
    const ThinPlateSpline exact(bumpy, 0.0);
    for (const auto& c : bumpy) CHECK(std::abs(exact(c[0], c[1]) - c[2]) < 1e-6);
    CHECK(exact.centre_count() == 150);
    const std::vector<std::array<double, 3>> collinear{{0, 0, 0}, {1, 1, 0}, {2, 2, 1}};
    CHECK(code_of([&] { ThinPlateSpline(collinear, 0.0); }) == ErrorCode::DegenerateSurface);
  }

  TEST_CASE("terrain model construction errors") {
    CHECK(code_of([] { TerrainModel({}, TerrainParams{}); }) == ErrorCode::EmptyCloud);
    const LabelledPointCloud stones(50, LabelledPoint{1, 1, 0.2, PointLabel::PassableObstacle, 1});
    CHECK(code_of([&] { TerrainModel(stones, TerrainParams{}); }) == ErrorCode::DegenerateSurface);
    const TerrainModel flat = model_of([](double, double) { return 0.0; }, 3.0);
    CHECK(flat.height(1.3, 2.7) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(code_of([&] { (void)flat.height(5.0, 1.0); }) == ErrorCode::OutOfBounds);
    CHECK_NOTHROW((void)flat.height(3.9, 1.0));  // inside the 1 m margin
  }

  TEST_CASE("projection takes the nearest cloud point height") {
    auto cloud = sampled_cloud([](double, double) { return 0.0; }, 3.0);
    for (auto& p : cloud) {
      if (std::abs(p.x - 2.0) < 1e-9 && std::abs(p.y - 2.0) < 1e-9) {
        p.z = 0.2;
        p.label = PointLabel::PassableObstacle;
      }
    }
    const TerrainModel model(cloud, TerrainParams{});
    const Path2D path{{Pose2D(2.0, 2.0, 0.0), Pose2D(1.02, 1.01, 0.0)}};
    const Path3D lifted = project_path(path, model);
    REQUIRE(lifted.size() == 2);
    CHECK(lifted[0].z() == 0.2);
    CHECK(lifted[1].z() == 0.0);
    CHECK(lifted[1].x() == 1.02);
    const Path2D far{{Pose2D(5.0, 5.0, 0.0)}};
    CHECK(code_of([&] { (void)project_path(far, model); }) == ErrorCode::NoNeighbour);
  }

  TEST_CASE("attitude on analytic planes") {
    const RobotGeometry geom;
    const double slope = std::tan(0.1);
    const TerrainModel ramp = model_of([slope](double x, double) { return slope * x; }, 4.0);
    const Attitude along = estimate_attitude(Pose3D(2.0, 2.0, 0.0, 0.0), ramp, geom);
    CHECK(along.pitch == doctest::Approx(0.1).epsilon(1e-6));
    CHECK(std::abs(along.roll) < 1e-6);
    const Attitude across = estimate_attitude(Pose3D(2.0, 2.0, 0.0, kPi / 2.0), ramp, geom);
    CHECK(std::abs(across.pitch) < 1e-6);
    CHECK(across.roll == doctest::Approx(-0.1).epsilon(1e-6));

    std::mt19937_64 rng(41);
    for (int t = 0; t < 10; ++t) {
      const double a = uniform(rng, -0.5, 0.5), b = uniform(rng, -0.5, 0.5);
      const TerrainModel plane = model_of([a, b](double x, double y) { return a * x + b * y; }, 3.0);
      for (int k = 0; k < 10; ++k) {
        const Pose2D p{uniform(rng, 0.5, 2.5), uniform(rng, 0.5, 2.5), uniform(rng, -kPi, kPi)};
        const auto [roll, pitch] = oracle::plane_attitude(a, b, p.theta());
        const Attitude est = estimate_attitude(Pose3D(p.x(), p.y(), 0.0, p.theta()), plane, geom);
        CHECK(std::abs(est.pitch - pitch) < 0.01);
        CHECK(std::abs(est.roll - roll) < 0.01);
      }
    }
  }

  TEST_CASE("feasibility limits are strict") {
    Path3D path;
    path.waypoints = {Pose3D(0, 0, 0, 0, 0.175, 0.0), Pose3D(1, 0, 0, 0, 0.0, -0.175),
                      Pose3D(2, 0, 0, 0, -0.1751, 0.0), Pose3D(3, 0, 0, 0, 0.0, 0.18)};
    CHECK(check_feasibility(path, StabilityLimits{}) == std::vector<std::size_t>{2, 3});
    CHECK_THROWS_AS(StabilityLimits({0.0, 0.1}).validate(), Error);
  }

  TEST_CASE("blocking unstable points marks the 3x3 neighbourhood") {
    const auto grid = test::empty_grid(10, 10);
    CHECK(block_unstable(grid, {{2.2, 2.2}}).count(CellState::Occupied) == 9);
    CHECK(block_unstable(grid, {{0.1, 0.1}}).count(CellState::Occupied) == 4);
    CHECK(block_unstable(grid, {{2.2, 2.2}, {2.3, 2.4}}).count(CellState::Occupied) == 9);
    CHECK(block_unstable(grid, {}) == grid);
  }

  TEST_CASE("planning on flat terrain needs one round") {
    const auto free = test::empty_grid(20, 20);
    const TerrainModel model = model_of([](double, double) { return 0.0; }, 10.0);
    const BasePlannerConfig config;
    const Plan3DResult r = plan_3d(config, free, free, model, {1, 1, 0}, {9, 8, 0}, RobotGeometry{}, PoaParams{},
                                   StabilityLimits{});
    CHECK(r.rounds == 1);
    const Path2D flat = plan_astar(free, {1, 1, 0}, {9, 8, 0});
    REQUIRE(r.path.size() == flat.size());
    for (std::size_t i = 0; i < flat.size(); ++i) {
      CHECK(r.path[i].x() == flat[i].x());
      CHECK(r.path[i].y() == flat[i].y());
      CHECK(std::abs(r.path[i].z()) < 1e-12);
    }
  }

  TEST_CASE("planning steers around a steep hill") {
    const Surface hill = [](double x, double y) {
      return std::exp(-((x - 5.0) * (x - 5.0) + (y - 5.0) * (y - 5.0)) / 2.0);
    };
    const auto free = test::empty_grid(20, 20);
    const TerrainModel model = model_of(hill, 10.0);
    const RobotGeometry geom;
    const StabilityLimits limits;
    const Plan3DResult r = plan_3d(BasePlannerConfig{}, free, free, model, {1, 5, 0}, {9, 5, 0}, geom, PoaParams{},
                                   limits);
    CHECK(r.rounds > 1);
    CHECK_FALSE(check_feasibility(r.first_lift, limits).empty());
    CHECK(check_feasibility(r.path, limits).empty());
    for (std::size_t i = 0; i < r.path.size(); ++i) {
      // The exact surface agrees with the fitted one to a couple of hundredths.
      const Attitude exact = exact_attitude(hill, r.path[i].planar(), geom);
      CHECK(std::abs(exact.roll) <= limits.gamma_max + 0.02);
      CHECK(std::abs(exact.pitch) <= limits.phi_max + 0.02);
    }
    CHECK(r.unpassable.count(CellState::Occupied) > 0);
  }

  TEST_CASE("a steep ring around the start has no stable way out") {
    const Surface ring = [](double x, double y) {
      const double r = std::hypot(x - 5.0, y - 5.0);
      return 0.6 * std::exp(-(r - 2.0) * (r - 2.0) / (2.0 * 0.3 * 0.3));
    };
    const auto free = test::empty_grid(20, 20);
    const TerrainModel model = model_of(ring, 10.0);
    CHECK(code_of([&] {
            (void)plan_3d(BasePlannerConfig{}, free, free, model, {5, 5, 0}, {9.5, 9.5, 0}, RobotGeometry{},
                          PoaParams{}, StabilityLimits{});
          }) == ErrorCode::NoFeasiblePath);
    auto walled = free;
    for (int r = 0; r < 20; ++r) walled.set({10, r}, CellState::Occupied);
    CHECK(code_of([&] {
            (void)plan_3d(BasePlannerConfig{}, free, walled, model, {1, 1, 0}, {9, 1, 0}, RobotGeometry{},
                          PoaParams{}, StabilityLimits{});
          }) == ErrorCode::NoPath);
  }

  TEST_CASE("preprocessing a generated world recovers the ground") {
    ScenarioSpec spec = builtin_setup("setup3d");
    const World w = generate_world(spec);
    const TerrainModel model = preprocess_cloud(w.cloud, w.passable, w.unpassable, spec.terrain_model);
    std::mt19937_64 rng(43);
    std::vector<double> errors;
    const auto inflated = inflate(merge_occupied(w.passable, w.unpassable), spec.terrain_model.inflate_radius);
    while (errors.size() < 500) {
      const Vec2 p{uniform(rng, 0.5, spec.extent_x - 0.5), uniform(rng, 0.5, spec.extent_y - 0.5)};
      if (inflated.occupied_at(p)) continue;
      errors.push_back(std::abs(model.height(p.x, p.y) - w.ground(p.x, p.y)));
    }
    std::sort(errors.begin(), errors.end());
    CHECK(errors[errors.size() / 2] < 0.005);
    CHECK(errors[errors.size() * 95 / 100] < 0.03);
  }

  TEST_CASE("3D path csv") {
    Path3D p;
    p.waypoints = {Pose3D(1, 2, 0.5, 0.25, 0.1, -0.05)};
    std::stringstream s;
    write_path3d_csv(s, p);
    CHECK(s.str() == "x,y,z,yaw,roll,pitch\n1,2,0.5,0.25,-0.05,0.1\n");
  }
}
