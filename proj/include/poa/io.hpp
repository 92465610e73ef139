#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "poa/grid.hpp"
#include "poa/path.hpp"
#include "poa/point_cloud.hpp"

namespace poa {

// POAGRID v1: header "POAGRID v1 <width> <height> <resolution> <origin_x> <origin_y>",
// then one line per row starting at the minimum-y row, '.' free, '#' occupied,
// '?' unknown.
void write_grid(std::ostream& out, const OccupancyGrid& grid);
OccupancyGrid read_grid(std::istream& in);

// POACLOUD v1: header "POACLOUD v1 <count>", then "x y z label [instance_id]".
void write_cloud(std::ostream& out, const LabelledPointCloud& cloud);
LabelledPointCloud read_cloud(std::istream& in);

void save_grid(const std::filesystem::path& path, const OccupancyGrid& grid);
OccupancyGrid load_grid(const std::filesystem::path& path);
void save_cloud(const std::filesystem::path& path, const LabelledPointCloud& cloud);
LabelledPointCloud load_cloud(const std::filesystem::path& path);

/// CSV with header `x,y,theta`.
void write_path_csv(std::ostream& out, const Path2D& path);

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double v);

}  // namespace poa
