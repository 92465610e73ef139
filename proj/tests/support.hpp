#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "poa/grid.hpp"

namespace poa::test {

/// Grid from rows of '.', '#' and '?', first string is the TOP row.
inline OccupancyGrid grid_from_rows(const std::vector<std::string>& rows, double res = 0.5, Vec2 origin = {}) {
  GridGeometry g{res, origin, static_cast<int>(rows.front().size()), static_cast<int>(rows.size())};
  OccupancyGrid grid(g, CellState::Free);
  for (int r = 0; r < g.height; ++r) {
    const std::string& line = rows[static_cast<std::size_t>(g.height - 1 - r)];
    for (int c = 0; c < g.width; ++c) {
      const char ch = line[static_cast<std::size_t>(c)];
      grid.set({c, r}, ch == '#' ? CellState::Occupied : ch == '?' ? CellState::Unknown : CellState::Free);
    }
  }
  return grid;
}

inline OccupancyGrid empty_grid(int w, int h, double res = 0.5) {
  return OccupancyGrid(GridGeometry{res, {0.0, 0.0}, w, h}, CellState::Free);
}

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("poa_test_" + tag + "_" + std::to_string(rd()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace poa::test
