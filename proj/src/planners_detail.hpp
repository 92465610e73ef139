#pragma once

#include <cstdint>
#include <vector>

#include "poa/grid.hpp"
#include "poa/path.hpp"

namespace poa::detail {

CellIndex endpoint_cell(const OccupancyGrid& grid, const Pose2D& p, const char* which);
Path2D finish_path(const OccupancyGrid& grid, std::vector<Vec2> points);
std::vector<std::uint8_t> occupied_mask(const OccupancyGrid& grid);

}  // namespace poa::detail
