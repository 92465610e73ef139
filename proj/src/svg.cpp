#include "poa/svg.hpp"

#include <fmt/format.h>

#include <iterator>
#include <ostream>

#include "poa/error.hpp"

namespace poa {

std::string xml_escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

namespace {

constexpr double kMargin = 20.0;  // pixels around the map
constexpr double kTitleBand = 24.0;

}  // namespace

void write_svg(std::ostream& out, const SvgScene& scene, double pixels_per_metre) {
  const GridGeometry& g = scene.passable.geometry();
  if (!(g == scene.unpassable.geometry())) throw Error(ErrorCode::GeometryMismatch, "svg: grids differ in geometry");
  if (!(pixels_per_metre > 0.0)) throw Error(ErrorCode::InvalidArgument, "svg: scale must be positive");
  const double s = pixels_per_metre;
  const double map_w = g.extent_x() * s, map_h = g.extent_y() * s;
  const double top = kMargin + kTitleBand;
  const double width = map_w + 2.0 * kMargin, height = map_h + top + kMargin;
  auto px = [&](Vec2 p) {
    return std::pair{kMargin + (p.x - g.origin.x) * s, top + map_h - (p.y - g.origin.y) * s};
  };

  fmt::format_to(std::ostreambuf_iterator<char>(out),
                 "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
                 "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" "
                 "viewBox=\"0 0 {:.0f} {:.0f}\">\n",
                 width, height, width, height);
  out << "<defs><pattern id=\"hatch\" width=\"6\" height=\"6\" patternUnits=\"userSpaceOnUse\">"
         "<path d=\"M0,6 L6,0\" stroke=\"#d62728\" stroke-width=\"1.5\"/></pattern></defs>\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  fmt::format_to(std::ostreambuf_iterator<char>(out),
                 "<text x=\"{:.1f}\" y=\"{:.1f}\" font-family=\"sans-serif\" font-size=\"14\">{}</text>\n", kMargin,
                 kMargin + 10.0, xml_escape(scene.title));
  fmt::format_to(std::ostreambuf_iterator<char>(out),
                 "<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\" fill=\"#f7f7f7\" "
                 "stroke=\"#333333\"/>\n",
                 kMargin, top, map_w, map_h);

  auto cells = [&](const OccupancyGrid& grid, std::string_view fill) {
    out << "<g fill=\"" << fill << "\">\n";
    for (int r = 0; r < g.height; ++r) {
      for (int c = 0; c < g.width; ++c) {
        if (!grid.occupied({c, r})) continue;
        const Vec2 lo = g.cell_min_corner({c, r});
        const auto [x, y] = px({lo.x, lo.y + g.resolution});
        fmt::format_to(std::ostreambuf_iterator<char>(out),
                       "<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\"/>\n", x, y,
                       g.resolution * s, g.resolution * s);
      }
    }
    out << "</g>\n";
  };
  cells(scene.passable, "#b5d99c");
  cells(scene.unpassable, "#4d4d4d");

  if (!scene.blocked.empty()) {
    out << "<g fill=\"url(#hatch)\">\n";
    for (const Vec2 b : scene.blocked) {
      const auto cell = g.try_world_to_cell(b);
      if (!cell) continue;
      const Vec2 lo = g.cell_min_corner(*cell);
      const auto [x, y] = px({lo.x, lo.y + g.resolution});
      fmt::format_to(std::ostreambuf_iterator<char>(out),
                     "<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\"/>\n", x, y,
                     g.resolution * s, g.resolution * s);
    }
    out << "</g>\n";
  }

  for (const SvgPath& path : scene.paths) {
    if (path.points.size() < 2) continue;
    std::string pts;
    for (const Vec2 p : path.points) {
      const auto [x, y] = px(p);
      pts += fmt::format("{:.2f},{:.2f} ", x, y);
    }
    pts.pop_back();
    fmt::format_to(std::ostreambuf_iterator<char>(out),
                   "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"{:.2f}\"{}/>\n", pts,
                   xml_escape(path.colour), path.width * s, path.dashed ? " stroke-dasharray=\"6,4\"" : "");
  }

  for (const Vec2 p : scene.splices) {
    const auto [x, y] = px(p);
    fmt::format_to(std::ostreambuf_iterator<char>(out),
                   "<circle cx=\"{:.1f}\" cy=\"{:.1f}\" r=\"4\" fill=\"none\" stroke=\"#ff7f0e\" "
                   "stroke-width=\"2\"/>\n",
                   x, y);
  }

  auto marker = [&](const Pose2D& p, std::string_view fill, std::string_view label) {
    const auto [x, y] = px(p.position());
    fmt::format_to(std::ostreambuf_iterator<char>(out),
                   "<circle cx=\"{:.1f}\" cy=\"{:.1f}\" r=\"6\" fill=\"{}\" stroke=\"#000000\"/>\n"
                   "<text x=\"{:.1f}\" y=\"{:.1f}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n",
                   x, y, fill, x + 8.0, y - 8.0, xml_escape(label));
  };
  marker(scene.start, "#2ca02c", "start");
  for (std::size_t i = 0; i < scene.goals.size(); ++i) {
    marker(scene.goals[i], "#d62728", std::string(1, static_cast<char>('A' + i % 26)));
  }
  out << "</svg>\n";
}

}  // namespace poa
