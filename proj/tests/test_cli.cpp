#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "poa/io.hpp"
#include "support.hpp"

using namespace poa;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

Outcome poa_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "poa");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::stringstream out, err;
  Outcome o;
  o.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

// Minimal well-formedness check: balanced tags, quoted attributes, no bare
// '<' or '&' in text.
bool well_formed_xml(const std::string& doc, std::string& why) {
  std::vector<std::string> stack;
  std::size_t i = 0;
  bool seen_root = false;
  auto text_ok = [&](std::string_view t) {
    for (std::size_t k = 0; k < t.size(); ++k) {
      if (t[k] != '&') continue;
      const auto semi = t.find(';', k);
      if (semi == std::string_view::npos || semi - k > 6) return false;
    }
    return true;
  };
  while (i < doc.size()) {
    const auto lt = doc.find('<', i);
    if (!text_ok(std::string_view(doc).substr(i, lt == std::string::npos ? std::string::npos : lt - i))) {
      why = "bad entity in text";
      return false;
    }
    if (lt == std::string::npos) break;
    if (doc.compare(lt, 4, "<!--") == 0) {
      const auto end = doc.find("-->", lt);
      if (end == std::string::npos) return why = "open comment", false;
      i = end + 3;
      continue;
    }
    if (doc.compare(lt, 2, "<?") == 0) {
      const auto end = doc.find("?>", lt);
      if (end == std::string::npos) return why = "open declaration", false;
      i = end + 2;
      continue;
    }
    // Find the end of the tag, skipping quoted attribute values.
    std::size_t k = lt + 1;
    char quote = 0;
    for (; k < doc.size(); ++k) {
      if (quote) {
        if (doc[k] == quote) quote = 0;
        else if (doc[k] == '<') return why = "'<' inside attribute", false;
      } else if (doc[k] == '"' || doc[k] == '\'') {
        quote = doc[k];
      } else if (doc[k] == '>') {
        break;
      }
    }
    if (k >= doc.size()) return why = "unterminated tag", false;
    const std::string tag = doc.substr(lt + 1, k - lt - 1);
    i = k + 1;
    if (tag.empty()) return why = "empty tag", false;
    if (tag[0] == '/') {
      const std::string name = tag.substr(1, tag.find_first_of(" \t\n") - 1);
      if (stack.empty() || stack.back() != name) return why = "mismatched </" + name + ">", false;
      stack.pop_back();
      continue;
    }
    const std::string name = tag.substr(0, tag.find_first_of(" \t\n/"));
    if (stack.empty()) {
      if (seen_root) return why = "second root element", false;
      seen_root = true;
    }
    if (tag.back() != '/') stack.push_back(name);
  }
  if (!stack.empty()) return why = "unclosed <" + stack.back() + ">", false;
  if (!seen_root) return why = "no root element", false;
  return true;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream s(line);
    std::string cell;
    while (std::getline(s, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("help and usage errors") {
    const Outcome help = poa_cli({"--help"});
    CHECK(help.code == cli::kExitOk);
    CHECK(contains(help.out, "generate"));
    CHECK(contains(help.out, "bench"));
    CHECK(poa_cli({"plan", "--help"}).code == cli::kExitOk);
    CHECK(poa_cli({}).code == cli::kExitUsage);
    CHECK(poa_cli({"generate", "setup1", "--bogus"}).code == cli::kExitUsage);
    CHECK(poa_cli({"fly"}).code == cli::kExitUsage);
    test::TempDir dir("cli_usage");
    CHECK(poa_cli({"generate", "no_such_setup", "--out", dir.path().string()}).code == cli::kExitUsage);
    CHECK(poa_cli({"plan", "setup1", "teleport", "--out", dir.path().string()}).code == cli::kExitUsage);
    CHECK(poa_cli({"plan", "setup1", "astar", "--3d", "--out", dir.path().string()}).code == cli::kExitUsage);
  }

  TEST_CASE("generate writes the world and refuses to overwrite") {
    test::TempDir dir("cli_gen");
    const std::string out = (dir.path() / "w").string();
    const Outcome first = poa_cli({"generate", "setup1", "--out", out});
    REQUIRE(first.code == cli::kExitOk);
    for (const char* f : {"cloud.poacloud", "passable.poagrid", "unpassable.poagrid", "scenario.txt"}) {
      CHECK(fs::exists(fs::path(out) / f));
    }
    const OccupancyGrid pass = load_grid(fs::path(out) / "passable.poagrid");
    CHECK(pass.width() == 30);
    CHECK(pass.height() == 30);
    CHECK(pass.resolution() == 0.5);
    CHECK(load_grid(fs::path(out) / "unpassable.poagrid").geometry() == pass.geometry());

    const std::string before = slurp(fs::path(out) / "cloud.poacloud");
    const Outcome again = poa_cli({"generate", "setup1", "--out", out, "--seed", "3"});
    CHECK(again.code == cli::kExitUsage);
    CHECK(contains(again.err, "--force"));
    CHECK(slurp(fs::path(out) / "cloud.poacloud") == before);
    CHECK(poa_cli({"generate", "setup1", "--out", out, "--seed", "3", "--force"}).code == cli::kExitOk);
    CHECK(slurp(fs::path(out) / "cloud.poacloud") != before);
  }

  TEST_CASE("scenario parameters from a file") {
    test::TempDir dir("cli_params");
    const fs::path params = dir.path() / "params.txt";
    std::ofstream(params) << "stones.passable.count = 5\nbogus.key = 1\n";
    const Outcome bad = poa_cli({"generate", "setup1", "--params", params.string(), "--out", (dir.path() / "a").string()});
    CHECK(bad.code == cli::kExitUsage);
    CHECK(contains(bad.err, "bogus.key"));
    std::ofstream(params) << "stones.passable.count = 5\n";
    const Outcome good = poa_cli({"generate", "setup1", "--params", params.string(), "--out", (dir.path() / "b").string()});
    REQUIRE(good.code == cli::kExitOk);
    std::ifstream scenario(dir.path() / "b" / "scenario.txt");
    std::stringstream text;
    text << scenario.rdbuf();
    CHECK(contains(text.str(), "stones.passable.count = 5"));
    CHECK(contains(text.str(), "name = setup1"));
    CHECK(poa_cli({"generate", "setup1", "--params", (dir.path() / "none.txt").string(), "--out",
                   (dir.path() / "c").string()})
              .code == cli::kExitIo);
  }

  TEST_CASE("plan exit codes follow the outcome") {
    test::TempDir dir("cli_plan");
    const std::string world = (dir.path() / "world").string();
    REQUIRE(poa_cli({"generate", "setup2", "--out", world}).code == cli::kExitOk);
    const Outcome plain = poa_cli({"plan", world, "gvd", "--out", (dir.path() / "p1").string()});
    CHECK(plain.code == cli::kExitNoPath);
    CHECK(contains(plain.out, "FAILURE"));
    const Outcome repaired = poa_cli({"plan", world, "gvd", "--poa", "--out", (dir.path() / "p2").string()});
    CHECK(repaired.code == cli::kExitOk);
    const auto legs = read_csv(dir.path() / "p2" / "path_leg1.csv");
    REQUIRE(legs.size() > 2);
    CHECK(legs[0] == std::vector<std::string>{"x", "y", "theta"});
    const std::string json = slurp(dir.path() / "p2" / "plan.json");
    CHECK(contains(json, "\"planner\": \"gvd+poa\""));
    CHECK(contains(json, "\"status\": \"SUCCESS\""));
    CHECK(poa_cli({"plan", (dir.path() / "missing").string(), "astar", "--out", (dir.path() / "p3").string()}).code ==
          cli::kExitUsage);
  }

  TEST_CASE("3D plans stay within the attitude limits") {
    test::TempDir dir("cli_3d");
    const Outcome r = poa_cli({"plan", "setup3d", "astar", "--poa", "--3d", "--out", dir.path().string()});
    REQUIRE(r.code == cli::kExitOk);
    int files = 0;
    for (int leg = 1; fs::exists(dir.path() / ("path_leg" + std::to_string(leg) + ".csv")); ++leg) {
      ++files;
      const auto rows = read_csv(dir.path() / ("path_leg" + std::to_string(leg) + ".csv"));
      REQUIRE(rows.size() > 1);
      CHECK(rows[0] == std::vector<std::string>{"x", "y", "z", "yaw", "roll", "pitch"});
      for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(std::abs(std::stod(rows[i][4])) <= 0.175);
        CHECK(std::abs(std::stod(rows[i][5])) <= 0.175);
      }
    }
    CHECK(files >= 1);
  }

  TEST_CASE("the SVG is self-contained XML") {
    test::TempDir dir("cli_svg");
    REQUIRE(poa_cli({"plan", "setup1", "astar", "--poa", "--out", dir.path().string()}).code == cli::kExitOk);
    const std::string svg = slurp(dir.path() / "plan.svg");
    std::string why;
    CHECK_MESSAGE(well_formed_xml(svg, why), why);
    CHECK(contains(svg, "<svg"));
    CHECK(contains(svg, "<polyline"));
    for (const char* external : {"http:", "https:", "<image", "@import", "file:"}) {
      const auto at = svg.find(external);
      // The namespace declaration is the only URL allowed.
      const bool only_namespace = at == std::string::npos || svg.substr(at, 26) == "http://www.w3.org/2000/svg" ||
                                  svg.substr(at, 28) == "http://www.w3.org/1999/xlink";
      CHECK_MESSAGE(only_namespace, external);
    }
    std::size_t pos = 0;
    while ((pos = svg.find("href=\"", pos)) != std::string::npos) {
      CHECK(svg[pos + 6] == '#');
      ++pos;
    }
    std::string broken = svg;
    broken.erase(broken.rfind("</svg>"));
    CHECK_FALSE(well_formed_xml(broken, why));
  }

  TEST_CASE("benchmark output is reproducible") {
    test::TempDir dir("cli_bench");
    const std::vector<std::string> common{"bench", "setup1", "setup3", "--planners", "astar,rrt_star+poa",
                                          "--repeats", "1", "--seed", "7"};
    auto args_a = common, args_b = common;
    args_a.insert(args_a.end(), {"--out", (dir.path() / "a").string()});
    args_b.insert(args_b.end(), {"--out", (dir.path() / "b").string(), "--jobs", "3"});
    REQUIRE(poa_cli(args_a).code == cli::kExitOk);
    REQUIRE(poa_cli(args_b).code == cli::kExitOk);
    CHECK(slurp(dir.path() / "a" / "results.csv") == slurp(dir.path() / "b" / "results.csv"));
    CHECK(slurp(dir.path() / "a" / "summary.txt") == slurp(dir.path() / "b" / "summary.txt"));
    const auto rows = read_csv(dir.path() / "a" / "results.csv");
    REQUIRE(rows.size() > 1);
    CHECK(rows[1][2] == "7");
    CHECK(poa_cli({"bench", "--repeats", "0", "--out", (dir.path() / "c").string()}).code == cli::kExitUsage);
  }

  TEST_CASE("default benchmark covers six planners on three setups") {
    test::TempDir dir("cli_bench_default");
    const Outcome r = poa_cli({"bench", "--repeats", "1", "--out", dir.path().string()});
    REQUIRE(r.code == cli::kExitOk);
    std::ifstream summary(dir.path() / "summary.txt");
    std::string line;
    std::getline(summary, line);  // header
    int rows = 0;
    while (std::getline(summary, line) && !line.empty()) ++rows;
    CHECK(rows == 18);
    CHECK(read_csv(dir.path() / "results.csv").size() == 1 + 18 * 2);
  }
}
