#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "poa/geometry.hpp"
#include "poa/grid.hpp"
#include "poa/path.hpp"

namespace poa {

struct SvgPath {
  std::vector<Vec2> points;
  std::string colour = "#1f77b4";
  double width = 0.08;  // metres
  bool dashed = false;
};

/// Everything drawn on one map figure. Both grids must share a geometry.
struct SvgScene {
  OccupancyGrid passable;
  OccupancyGrid unpassable;
  std::vector<Vec2> blocked;  // cells blocked for instability, drawn hatched
  std::vector<SvgPath> paths;
  std::vector<Vec2> splices;  // alternative waypoints chosen by the repair
  Pose2D start;
  std::vector<Pose2D> goals;
  std::string title;
};

/// Self-contained SVG (no external references), y axis pointing up.
void write_svg(std::ostream& out, const SvgScene& scene, double pixels_per_metre = 40.0);

/// Escapes the five XML special characters.
std::string xml_escape(std::string_view text);

}  // namespace poa
