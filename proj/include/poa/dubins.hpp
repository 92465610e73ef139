#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "poa/geometry.hpp"

namespace poa {

enum class DubinsWord { LSL, RSR, LSR, RSL, RLR, LRL };

std::string_view to_string(DubinsWord w);

/// Three-segment curvature-bounded forward path. Segment lengths are metres
/// of arc or straight line, in travel order.
struct DubinsPath {
  DubinsWord word = DubinsWord::LSL;
  std::array<double, 3> segment_lengths{0.0, 0.0, 0.0};
  double turn_radius = 1.0;
  Pose2D start;

  double length() const { return segment_lengths[0] + segment_lengths[1] + segment_lengths[2]; }
  /// Pose after travelling arc length s (clamped to [0, length()]).
  Pose2D pose_at(double s) const;
  Pose2D end_pose() const { return pose_at(length()); }
};

/// The path for one word, if that word admits a solution.
std::optional<DubinsPath> dubins_word(const Pose2D& start, const Pose2D& goal, double turn_radius, DubinsWord word);

/// Shortest of the six words. Coincident poses give a zero-length path.
/// Throws InvalidArgument for a non-positive radius.
DubinsPath dubins_shortest(const Pose2D& start, const Pose2D& goal, double turn_radius);

/// Poses at uniform arc-length spacing <= step, both endpoints included.
std::vector<Pose2D> sample_dubins(const DubinsPath& path, double step);

}  // namespace poa
