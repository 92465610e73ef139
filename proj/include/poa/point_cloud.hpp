#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace poa {

enum class PointLabel : std::uint8_t {
  FreeSpace = 0,
  PassableObstacle = 1,
  UnpassableObstacle = 2,
};

struct LabelledPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  PointLabel label = PointLabel::FreeSpace;
  std::optional<std::int64_t> instance_id;

  friend bool operator==(const LabelledPoint&, const LabelledPoint&) = default;
};

using LabelledPointCloud = std::vector<LabelledPoint>;

}  // namespace poa
