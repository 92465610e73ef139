#include "cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>
#include <spdlog/logger.h>
#include <spdlog/sinks/ostream_sink.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "poa/error.hpp"
#include "poa/io.hpp"
#include "poa/scenario.hpp"
#include "poa/simulation.hpp"
#include "poa/svg.hpp"
#include "poa/terrain.hpp"

namespace poa::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kScenarioFile = "scenario.txt";
constexpr const char* kCloudFile = "cloud.poacloud";
constexpr const char* kPassableFile = "passable.poagrid";
constexpr const char* kUnpassableFile = "unpassable.poagrid";

// Bad invocation: unknown names, conflicting flags, refused overwrites.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string target;
  std::vector<std::string> setups;
  std::string planner = "astar";
  std::string planners;
  bool poa = false;
  bool three_d = false;
  bool force = false;
  std::optional<std::uint64_t> seed;
  int repeats = 1;
  unsigned jobs = 1;
  std::string out_dir = "out";
  std::string params;
};

std::shared_ptr<spdlog::logger> make_logger(std::ostream& err) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
  sink->set_pattern("[%l] %v");
  auto log = std::make_shared<spdlog::logger>("poa", sink);
  log->set_level(spdlog::level::warn);
  if (const char* env = std::getenv("POA_LOG")) {
    const std::string level = env;
    if (level == "error") {
      log->set_level(spdlog::level::err);
    } else if (level == "warn") {
      log->set_level(spdlog::level::warn);
    } else if (level == "info") {
      log->set_level(spdlog::level::info);
    } else if (level == "debug") {
      log->set_level(spdlog::level::debug);
    } else {
      log->warn("ignoring POA_LOG={}: expected error, warn, info or debug", level);
    }
  }
  return log;
}

bool is_builtin(const std::string& name) {
  for (const auto& s : builtin_setups()) {
    if (s.name == name) return true;
  }
  return false;
}

// Builtin name or scenario file, then the --params overlay, then --seed.
ScenarioSpec resolve_spec(const std::string& target, const Options& opt) {
  ScenarioSpec spec;
  if (is_builtin(target)) {
    spec = builtin_setup(target);
  } else if (fs::is_regular_file(target)) {
    spec = load_scenario(target);
  } else {
    throw UsageError("'" + target + "' is neither a builtin setup (setup1, setup2, setup3, setup3d) nor a file");
  }
  if (!opt.params.empty()) {
    std::ifstream in(opt.params);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + opt.params);
    spec = parse_scenario(in, spec);
  }
  if (opt.seed) spec.seed = *opt.seed;
  return spec;
}

// A directory written by `generate`, or anything resolve_spec accepts.
World resolve_world(const std::string& target, const Options& opt, spdlog::logger& log) {
  if (!fs::is_directory(target)) {
    World world = generate_world(resolve_spec(target, opt));
    log.info("generated {} (seed {})", world.spec.name, world.spec.seed);
    return world;
  }
  const fs::path dir(target);
  World world;
  world.spec = load_scenario(dir / kScenarioFile);
  if (!opt.params.empty()) {
    std::ifstream in(opt.params);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + opt.params);
    world.spec = parse_scenario(in, world.spec);
  }
  if (opt.seed) log.warn("--seed has no effect on a stored world");
  world.cloud = load_cloud(dir / kCloudFile);
  world.passable = load_grid(dir / kPassableFile);
  world.unpassable = load_grid(dir / kUnpassableFile);
  if (!(world.passable.geometry() == world.unpassable.geometry())) {
    throw Error(ErrorCode::GeometryMismatch, "stored grids differ in geometry");
  }
  log.info("loaded world {} from {}", world.spec.name, dir.string());
  return world;
}

// Creates the directory and refuses to replace existing files without --force.
void prepare_outputs(const fs::path& dir, const std::vector<std::string>& names, bool force) {
  fs::create_directories(dir);
  if (force) return;
  for (const auto& n : names) {
    if (fs::exists(dir / n)) throw UsageError("refusing to overwrite " + (dir / n).string() + " (use --force)");
  }
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  f << content;
  f.close();
  if (!f) throw Error(ErrorCode::Io, "failed writing " + path.string());
}

template <class Fn>
std::string render(Fn&& fn) {
  std::ostringstream s;
  fn(s);
  return s.str();
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int cmd_generate(const Options& opt, std::ostream& out, spdlog::logger& log) {
  const ScenarioSpec spec = resolve_spec(opt.target, opt);
  const fs::path dir(opt.out_dir);
  prepare_outputs(dir, {kScenarioFile, kCloudFile, kPassableFile, kUnpassableFile}, opt.force);
  const World world = generate_world(spec);
  write_file(dir / kScenarioFile, render([&](std::ostream& s) { write_scenario(s, world.spec); }));
  write_file(dir / kCloudFile, render([&](std::ostream& s) { write_cloud(s, world.cloud); }));
  write_file(dir / kPassableFile, render([&](std::ostream& s) { write_grid(s, world.passable); }));
  write_file(dir / kUnpassableFile, render([&](std::ostream& s) { write_grid(s, world.unpassable); }));
  log.info("wrote world files to {}", dir.string());
  fmt::print(out, "{}: seed {}, {} points, {}x{} cells, {} passable / {} unpassable occupied -> {}\n", spec.name,
             spec.seed, world.cloud.size(), world.passable.width(), world.passable.height(),
             world.passable.count(CellState::Occupied), world.unpassable.count(CellState::Occupied), dir.string());
  return kExitOk;
}

struct LegOutcome {
  bool ok = false;
  std::string failure;
  Path2D path;
  Path3D path3d;
  Path3D first_lift;
  std::vector<Splice> splices;
  std::size_t residual = 0;
  int rounds = 0;
  double time = 0.0;
  std::vector<Vec2> blocked;
};

int cmd_plan(const Options& opt, std::ostream& out, spdlog::logger& log) {
  PlannerVariant variant = parse_planner_variant(opt.planner);
  if (opt.poa) variant.poa = true;
  if (opt.three_d && !variant.poa) throw UsageError("--3d plans with POA; add --poa");
  const fs::path dir(opt.out_dir);
  const World world = resolve_world(opt.target, opt, log);
  const ScenarioSpec& spec = world.spec;
  const auto legs = spec.legs();

  std::vector<std::string> names{"plan.json", "plan.svg"};
  for (std::size_t k = 0; k < legs.size(); ++k) names.push_back(fmt::format("path_leg{}.csv", k + 1));
  prepare_outputs(dir, names, opt.force);

  std::optional<TerrainModel> model;
  if (opt.three_d) model.emplace(preprocess_cloud(world.cloud, world.passable, world.unpassable, spec.terrain_model));

  const MissionOptions mission;
  std::vector<LegOutcome> outcomes;
  for (const auto& [from, to] : legs) {
    LegOutcome leg;
    if (opt.three_d) {
      BasePlannerConfig config;
      config.kind = variant.kind;
      config.rrt = spec.rrt;
      config.gvd = spec.gvd;
      try {
        Plan3DResult r = plan_3d(config, world.passable, world.unpassable, *model, from, to, spec.robot,
                                 spec.poa_for(variant.kind), spec.limits, spec.max_rounds);
        leg.ok = true;
        leg.path = r.plan.path();
        leg.path3d = std::move(r.path);
        leg.first_lift = std::move(r.first_lift);
        leg.splices = r.plan.repair.splices;
        leg.residual = r.plan.repair.residual.size();
        leg.rounds = r.rounds;
        for (int row = 0; row < r.unpassable.height(); ++row) {
          for (int col = 0; col < r.unpassable.width(); ++col) {
            if (r.unpassable.occupied({col, row}) && !world.unpassable.occupied({col, row})) {
              leg.blocked.push_back(r.unpassable.geometry().cell_center({col, row}));
            }
          }
        }
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NoPath && e.code() != ErrorCode::InvalidEndpoint &&
            e.code() != ErrorCode::NoFeasiblePath) {
          throw;
        }
        leg.failure = e.what();
      }
    } else {
      if (auto plan = plan_leg(world, variant, from, to, mission)) {
        leg.ok = true;
        leg.path = std::move(plan->path);
        leg.splices = std::move(plan->splices);
        leg.residual = plan->residual;
      } else {
        leg.failure = "no path";
      }
    }
    if (leg.ok) leg.time = simulate_traversal(leg.path, world.passable, spec.robot, mission.speed);
    outcomes.push_back(std::move(leg));
  }

  nlohmann::ordered_json meta;
  meta["tool"] = "poa plan";
  meta["scenario"] = spec.name;
  meta["seed"] = spec.seed;
  meta["source"] = opt.target;
  meta["planner"] = variant.name();
  meta["three_d"] = opt.three_d;
  meta["legs"] = nlohmann::ordered_json::array();
  bool all_ok = true;
  for (std::size_t k = 0; k < outcomes.size(); ++k) {
    const LegOutcome& leg = outcomes[k];
    nlohmann::ordered_json j;
    j["leg"] = k + 1;
    j["from"] = {legs[k].first.x(), legs[k].first.y()};
    j["to"] = {legs[k].second.x(), legs[k].second.y()};
    j["status"] = leg.ok ? "SUCCESS" : "FAILURE";
    if (leg.ok) {
      j["file"] = fmt::format("path_leg{}.csv", k + 1);
      j["length_m"] = opt.three_d ? path_length(leg.path3d) : path_length(leg.path);
      j["length_2d_m"] = path_length(leg.path);
      j["time_s"] = leg.time;
      j["splices"] = leg.splices.size();
      j["residual_collisions"] = leg.residual;
      if (opt.three_d) {
        double roll = 0.0, pitch = 0.0;
        for (const auto& w : leg.path3d.waypoints) {
          roll = std::max(roll, std::abs(w.roll()));
          pitch = std::max(pitch, std::abs(w.pitch()));
        }
        j["rounds"] = leg.rounds;
        j["max_abs_roll"] = roll;
        j["max_abs_pitch"] = pitch;
        j["blocked_cells"] = leg.blocked.size();
      }
    } else {
      j["reason"] = leg.failure;
      all_ok = false;
    }
    meta["legs"].push_back(std::move(j));
  }

  for (std::size_t k = 0; k < outcomes.size(); ++k) {
    if (!outcomes[k].ok) continue;
    write_file(dir / fmt::format("path_leg{}.csv", k + 1), render([&](std::ostream& s) {
                 if (opt.three_d) {
                   write_path3d_csv(s, outcomes[k].path3d);
                 } else {
                   write_path_csv(s, outcomes[k].path);
                 }
               }));
  }
  write_file(dir / "plan.json", meta.dump(2) + "\n");

  SvgScene scene;
  scene.passable = world.passable;
  scene.unpassable = world.unpassable;
  scene.start = spec.start;
  scene.goals = spec.waypoints;
  scene.title = fmt::format("{} / {}{}", spec.name, variant.name(), opt.three_d ? " / 3d" : "");
  for (const LegOutcome& leg : outcomes) {
    if (!leg.ok) continue;
    if (opt.three_d && leg.rounds > 1) {
      SvgPath first{{}, "#7f7f7f", 0.05, true};
      for (const auto& w : leg.first_lift.waypoints) first.points.push_back({w.x(), w.y()});
      scene.paths.push_back(std::move(first));
    }
    SvgPath p;
    for (const auto& w : leg.path.waypoints) p.points.push_back(w.position());
    scene.paths.push_back(std::move(p));
    for (const Splice& s : leg.splices) scene.splices.push_back(s.alternative.position());
    scene.blocked.insert(scene.blocked.end(), leg.blocked.begin(), leg.blocked.end());
  }
  write_file(dir / "plan.svg", render([&](std::ostream& s) { write_svg(s, scene); }));

  for (std::size_t k = 0; k < outcomes.size(); ++k) {
    const auto& j = meta["legs"][k];
    if (outcomes[k].ok) {
      fmt::print(out, "leg {}: {:.2f} m, {:.1f} s, {} splices", k + 1, j["length_m"].get<double>(),
                 outcomes[k].time, outcomes[k].splices.size());
      if (opt.three_d) {
        fmt::print(out, ", {} rounds, max |roll| {:.3f}, max |pitch| {:.3f}", outcomes[k].rounds,
                   j["max_abs_roll"].get<double>(), j["max_abs_pitch"].get<double>());
      }
      out << '\n';
    } else {
      fmt::print(out, "leg {}: FAILURE ({})\n", k + 1, outcomes[k].failure);
    }
  }
  return all_ok ? kExitOk : kExitNoPath;
}

int cmd_bench(const Options& opt, std::ostream& out, spdlog::logger& log) {
  BenchmarkConfig config;
  const std::vector<std::string> setups =
      opt.setups.empty() ? std::vector<std::string>{"setup1", "setup2", "setup3"} : opt.setups;
  for (const auto& s : setups) config.specs.push_back(resolve_spec(s, opt));
  if (!opt.planners.empty()) {
    config.planners.clear();
    for (const auto& name : split_list(opt.planners)) config.planners.push_back(parse_planner_variant(name));
  }
  if (opt.repeats < 1) throw UsageError("--repeats must be at least 1");
  config.repeats = opt.repeats;
  config.jobs = std::max(1u, opt.jobs);
  const fs::path dir(opt.out_dir);
  prepare_outputs(dir, {"results.csv", "summary.txt"}, opt.force);
  log.info("benchmark: {} setups x {} planners x {} repeats", config.specs.size(), config.planners.size(),
           config.repeats);
  const BenchmarkResult result = run_benchmark(config);
  write_file(dir / "results.csv", render([&](std::ostream& s) { write_results_csv(s, result.rows); }));
  const std::string table = render([&](std::ostream& s) { write_table(s, result.summary); });
  write_file(dir / "summary.txt", render([&](std::ostream& s) {
               write_summary(s, result.summary);
               s << '\n' << table;
             }));
  out << table;
  return kExitOk;
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::Parse:
    case ErrorCode::InvalidArgument: return kExitUsage;
    case ErrorCode::Io: return kExitIo;
    case ErrorCode::NoPath:
    case ErrorCode::InvalidEndpoint:
    case ErrorCode::NoFeasiblePath: return kExitNoPath;
    default: return kExitFailure;
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  const auto log = make_logger(err);
  Options opt;
  CLI::App app{"Passable-obstacle-aware path planning for two-wheeled robots", "poa"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("generate", "Generate a world: labelled cloud, both grids and the resolved scenario");
  gen->add_option("scenario", opt.target, "Builtin setup (setup1, setup2, setup3, setup3d) or scenario file")
      ->required();

  auto* plan = app.add_subcommand("plan", "Plan every mission leg and write paths, metadata and an SVG");
  plan->add_option("world", opt.target, "World directory from `generate`, builtin setup or scenario file")
      ->required();
  plan->add_option("planner,--planner", opt.planner, "gvd, astar or rrt_star, optionally suffixed with +poa")
      ->capture_default_str();
  plan->add_flag("--poa", opt.poa, "Repair the base path around passable obstacles");
  plan->add_flag("--3d", opt.three_d, "Lift onto the terrain and replan until roll and pitch stay within limits");

  auto* bench = app.add_subcommand("bench", "Run the planner comparison over seeded worlds");
  bench->add_option("setups", opt.setups, "Builtin setups or scenario files (default setup1 setup2 setup3)");
  bench->add_option("--planners", opt.planners, "Comma-separated planner list (default: all six)");
  bench->add_option("--repeats", opt.repeats, "Seeds per setup, starting at the scenario seed")
      ->check(CLI::PositiveNumber);
  bench->add_option("--jobs", opt.jobs, "Worker threads")->check(CLI::PositiveNumber);

  for (auto* sub : {gen, plan, bench}) {
    sub->add_option("--seed", opt.seed, "Override the scenario seed");
    sub->add_option("--out", opt.out_dir, "Output directory (created if absent)")->capture_default_str();
    sub->add_option("--params", opt.params, "Scenario keys applied on top of the loaded scenario");
    sub->add_flag("--force", opt.force, "Overwrite existing output files");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed()) return cmd_generate(opt, out, *log);
    if (plan->parsed()) return cmd_plan(opt, out, *log);
    return cmd_bench(opt, out, *log);
  } catch (const UsageError& e) {
    log->error("{}", e.what());
    return kExitUsage;
  } catch (const Error& e) {
    log->error("{}", e.what());
    return exit_code_for(e);
  } catch (const fs::filesystem_error& e) {
    log->error("{}", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    log->error("{}", e.what());
    return kExitFailure;
  }
}

}  // namespace poa::cli
