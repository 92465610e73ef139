#include "poa/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "poa/error.hpp"

namespace poa {

std::string format_double(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw Error(ErrorCode::InvalidArgument, "cannot format number");
  return std::string(buf, end);
}

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

[[noreturn]] void parse_error(const std::string& what, std::size_t line_no) {
  throw Error(ErrorCode::Parse, what + " (line " + std::to_string(line_no) + ")");
}

double parse_double(const std::string& s, std::size_t line_no) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) parse_error("invalid number '" + s + "'", line_no);
  return v;
}

long long parse_int(const std::string& s, std::size_t line_no) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) parse_error("invalid integer '" + s + "'", line_no);
  return v;
}

char cell_char(CellState s) {
  switch (s) {
    case CellState::Free: return '.';
    case CellState::Occupied: return '#';
    case CellState::Unknown: return '?';
  }
  return '?';
}

}  // namespace

void write_grid(std::ostream& out, const OccupancyGrid& grid) {
  const auto& g = grid.geometry();
  out << "POAGRID v1 " << g.width << ' ' << g.height << ' ' << format_double(g.resolution) << ' '
      << format_double(g.origin.x) << ' ' << format_double(g.origin.y) << '\n';
  std::string row(static_cast<std::size_t>(g.width), '?');
  for (int r = 0; r < g.height; ++r) {
    for (int c = 0; c < g.width; ++c) row[static_cast<std::size_t>(c)] = cell_char(grid.at(CellIndex{c, r}));
    out << row << '\n';
  }
}

OccupancyGrid read_grid(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) parse_error("missing POAGRID header", 1);
  const auto tok = split_ws(line);
  if (tok.size() != 7 || tok[0] != "POAGRID" || tok[1] != "v1") parse_error("malformed POAGRID header", 1);
  GridGeometry g;
  g.width = static_cast<int>(parse_int(tok[2], 1));
  g.height = static_cast<int>(parse_int(tok[3], 1));
  g.resolution = parse_double(tok[4], 1);
  g.origin = {parse_double(tok[5], 1), parse_double(tok[6], 1)};
  if (g.width <= 0 || g.height <= 0 || !(g.resolution > 0)) parse_error("invalid grid geometry", 1);
  OccupancyGrid grid(g);
  for (int r = 0; r < g.height; ++r) {
    const std::size_t line_no = static_cast<std::size_t>(r) + 2;
    if (!std::getline(in, line)) parse_error("missing grid row", line_no);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.size() != static_cast<std::size_t>(g.width)) parse_error("grid row has wrong width", line_no);
    for (int c = 0; c < g.width; ++c) {
      CellState s;
      switch (line[static_cast<std::size_t>(c)]) {
        case '.': s = CellState::Free; break;
        case '#': s = CellState::Occupied; break;
        case '?': s = CellState::Unknown; break;
        default: parse_error("invalid cell character", line_no);
      }
      grid.set(CellIndex{c, r}, s);
    }
  }
  return grid;
}

void write_cloud(std::ostream& out, const LabelledPointCloud& cloud) {
  out << "POACLOUD v1 " << cloud.size() << '\n';
  for (const auto& p : cloud) {
    out << format_double(p.x) << ' ' << format_double(p.y) << ' ' << format_double(p.z) << ' '
        << static_cast<int>(p.label);
    if (p.instance_id) out << ' ' << *p.instance_id;
    out << '\n';
  }
}

LabelledPointCloud read_cloud(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) parse_error("missing POACLOUD header", 1);
  const auto header = split_ws(line);
  if (header.size() != 3 || header[0] != "POACLOUD" || header[1] != "v1") {
    parse_error("malformed POACLOUD header", 1);
  }
  const long long count = parse_int(header[2], 1);
  if (count < 0) parse_error("negative point count", 1);
  LabelledPointCloud cloud;
  cloud.reserve(static_cast<std::size_t>(count));
  for (long long i = 0; i < count; ++i) {
    const std::size_t line_no = static_cast<std::size_t>(i) + 2;
    if (!std::getline(in, line)) parse_error("missing point", line_no);
    const auto tok = split_ws(line);
    if (tok.size() != 4 && tok.size() != 5) parse_error("point needs 4 or 5 fields", line_no);
    LabelledPoint p;
    p.x = parse_double(tok[0], line_no);
    p.y = parse_double(tok[1], line_no);
    p.z = parse_double(tok[2], line_no);
    const long long label = parse_int(tok[3], line_no);
    if (label < 0 || label > 2) parse_error("label must be 0, 1 or 2", line_no);
    p.label = static_cast<PointLabel>(label);
    if (tok.size() == 5) p.instance_id = parse_int(tok[4], line_no);
    cloud.push_back(p);
  }
  return cloud;
}

namespace {

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  return out;
}

}  // namespace

void save_grid(const std::filesystem::path& path, const OccupancyGrid& grid) {
  auto out = open_out(path);
  write_grid(out, grid);
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

OccupancyGrid load_grid(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_grid(in);
}

void save_cloud(const std::filesystem::path& path, const LabelledPointCloud& cloud) {
  auto out = open_out(path);
  write_cloud(out, cloud);
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

LabelledPointCloud load_cloud(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_cloud(in);
}

void write_path_csv(std::ostream& out, const Path2D& path) {
  out << "x,y,theta\n";
  for (const auto& w : path.waypoints) {
    out << format_double(w.x()) << ',' << format_double(w.y()) << ',' << format_double(w.theta()) << '\n';
  }
}

}  // namespace poa
