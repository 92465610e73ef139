#include "poa/dubins.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "poa/error.hpp"

namespace poa {

std::string_view to_string(DubinsWord w) {
  switch (w) {
    case DubinsWord::LSL: return "LSL";
    case DubinsWord::RSR: return "RSR";
    case DubinsWord::LSR: return "LSR";
    case DubinsWord::RSL: return "RSL";
    case DubinsWord::RLR: return "RLR";
    case DubinsWord::LRL: return "LRL";
  }
  return "?";
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double mod2pi(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  // Full turns caused by rounding are no turn at all.
  if (r > kTwoPi - 1e-10) r = 0.0;
  return r;
}

enum class Seg { L, S, R };

std::array<Seg, 3> segments_of(DubinsWord w) {
  switch (w) {
    case DubinsWord::LSL: return {Seg::L, Seg::S, Seg::L};
    case DubinsWord::RSR: return {Seg::R, Seg::S, Seg::R};
    case DubinsWord::LSR: return {Seg::L, Seg::S, Seg::R};
    case DubinsWord::RSL: return {Seg::R, Seg::S, Seg::L};
    case DubinsWord::RLR: return {Seg::R, Seg::L, Seg::R};
    case DubinsWord::LRL: return {Seg::L, Seg::R, Seg::L};
  }
  return {Seg::L, Seg::S, Seg::L};
}

// Advances (x, y, th) along one segment of length len.
void advance(Seg seg, double len, double r, double& x, double& y, double& th) {
  switch (seg) {
    case Seg::S:
      x += len * std::cos(th);
      y += len * std::sin(th);
      break;
    case Seg::L: {
      const double dth = len / r;
      x += r * (std::sin(th + dth) - std::sin(th));
      y += r * (std::cos(th) - std::cos(th + dth));
      th += dth;
      break;
    }
    case Seg::R: {
      const double dth = len / r;
      x += r * (std::sin(th) - std::sin(th - dth));
      y += r * (std::cos(th - dth) - std::cos(th));
      th -= dth;
      break;
    }
  }
}

}  // namespace

Pose2D DubinsPath::pose_at(double s) const {
  s = std::clamp(s, 0.0, length());
  double x = start.x(), y = start.y(), th = start.theta();
  const auto segs = segments_of(word);
  for (std::size_t i = 0; i < 3 && s > 0.0; ++i) {
    const double len = std::min(s, segment_lengths[i]);
    advance(segs[i], len, turn_radius, x, y, th);
    s -= len;
  }
  return {x, y, th};
}

std::optional<DubinsPath> dubins_word(const Pose2D& start, const Pose2D& goal, double r, DubinsWord word) {
  if (!(r > 0.0)) throw Error(ErrorCode::InvalidArgument, "dubins: turn radius must be positive");
  // Normalised frame: unit radius, goal along the +x axis.
  const double dx = goal.x() - start.x();
  const double dy = goal.y() - start.y();
  const double d = std::hypot(dx, dy) / r;
  const double theta = (dx == 0.0 && dy == 0.0) ? 0.0 : std::atan2(dy, dx);
  const double a = mod2pi(start.theta() - theta);
  const double b = mod2pi(goal.theta() - theta);
  const double sa = std::sin(a), sb = std::sin(b), ca = std::cos(a), cb = std::cos(b);
  const double cab = std::cos(a - b);

  double t = 0.0, p = 0.0, q = 0.0;
  switch (word) {
    case DubinsWord::LSL: {
      const double p2 = 2.0 + d * d - 2.0 * cab + 2.0 * d * (sa - sb);
      if (p2 < -1e-12) return std::nullopt;
      // Coincident circles leave the tangent direction undefined; turn once.
      const double tmp = p2 < 1e-12 ? b : std::atan2(cb - ca, d + sa - sb);
      t = mod2pi(-a + tmp);
      p = std::sqrt(std::max(0.0, p2));
      q = mod2pi(b - tmp);
      break;
    }
    case DubinsWord::RSR: {
      const double p2 = 2.0 + d * d - 2.0 * cab + 2.0 * d * (sb - sa);
      if (p2 < -1e-12) return std::nullopt;
      const double tmp = p2 < 1e-12 ? b : std::atan2(ca - cb, d - sa + sb);
      t = mod2pi(a - tmp);
      p = std::sqrt(std::max(0.0, p2));
      q = mod2pi(-b + tmp);
      break;
    }
    case DubinsWord::LSR: {
      const double p2 = -2.0 + d * d + 2.0 * cab + 2.0 * d * (sa + sb);
      if (p2 < 0.0) return std::nullopt;
      p = std::sqrt(p2);
      const double tmp = std::atan2(-ca - cb, d + sa + sb) - std::atan2(-2.0, p);
      t = mod2pi(-a + tmp);
      q = mod2pi(-b + tmp);
      break;
    }
    case DubinsWord::RSL: {
      const double p2 = -2.0 + d * d + 2.0 * cab - 2.0 * d * (sa + sb);
      if (p2 < 0.0) return std::nullopt;
      p = std::sqrt(p2);
      const double tmp = std::atan2(ca + cb, d - sa - sb) - std::atan2(2.0, p);
      t = mod2pi(a - tmp);
      q = mod2pi(b - tmp);
      break;
    }
    case DubinsWord::RLR: {
      const double tmp = (6.0 - d * d + 2.0 * cab + 2.0 * d * (sa - sb)) / 8.0;
      if (std::abs(tmp) > 1.0) return std::nullopt;
      p = mod2pi(kTwoPi - std::acos(tmp));
      t = mod2pi(a - std::atan2(ca - cb, d - sa + sb) + p / 2.0);
      q = mod2pi(a - b - t + p);
      break;
    }
    case DubinsWord::LRL: {
      const double tmp = (6.0 - d * d + 2.0 * cab + 2.0 * d * (sb - sa)) / 8.0;
      if (std::abs(tmp) > 1.0) return std::nullopt;
      p = mod2pi(kTwoPi - std::acos(tmp));
      t = mod2pi(-a - std::atan2(ca - cb, d + sa - sb) + p / 2.0);
      q = mod2pi(b - a - t + p);
      break;
    }
  }
  DubinsPath path;
  path.word = word;
  path.segment_lengths = {t * r, p * r, q * r};
  path.turn_radius = r;
  path.start = start;
  return path;
}

DubinsPath dubins_shortest(const Pose2D& start, const Pose2D& goal, double turn_radius) {
  if (!(turn_radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "dubins: turn radius must be positive");
  if (start == goal) {
    DubinsPath zero;
    zero.turn_radius = turn_radius;
    zero.start = start;
    return zero;
  }
  std::optional<DubinsPath> best;
  constexpr DubinsWord kOrder[] = {DubinsWord::LSL, DubinsWord::RSR, DubinsWord::LSR,
                                   DubinsWord::RSL, DubinsWord::RLR, DubinsWord::LRL};
  for (DubinsWord w : kOrder) {
    auto cand = dubins_word(start, goal, turn_radius, w);
    // Earlier words win ties.
    if (cand && (!best || cand->length() < best->length() - 1e-12)) best = cand;
  }
  if (!best) throw Error(ErrorCode::InvalidArgument, "dubins: no admissible word");
  return *best;
}

std::vector<Pose2D> sample_dubins(const DubinsPath& path, double step) {
  if (!(step > 0.0)) throw Error(ErrorCode::InvalidArgument, "sample_dubins: step must be positive");
  const double len = path.length();
  if (len == 0.0) return {path.start};
  const int n = std::max(1, static_cast<int>(std::ceil(len / step - 1e-9)));
  std::vector<Pose2D> out;
  out.reserve(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) out.push_back(path.pose_at(len * k / n));
  return out;
}

}  // namespace poa
