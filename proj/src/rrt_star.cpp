#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "poa/error.hpp"
#include "poa/planners.hpp"
#include "planners_detail.hpp"

namespace poa {

void RrtParams::validate() const {
  if (max_iterations <= 0) throw Error(ErrorCode::InvalidArgument, "rrt: max_iterations must be positive");
  if (!(step_size > 0.0)) throw Error(ErrorCode::InvalidArgument, "rrt: step_size must be positive");
  if (!(goal_bias >= 0.0 && goal_bias <= 1.0)) throw Error(ErrorCode::InvalidArgument, "rrt: goal_bias must be in [0, 1]");
  if (!(rewire_radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "rrt: rewire_radius must be positive");
}

namespace {

struct Node {
  Vec2 p;
  std::size_t parent;
  double cost;
  std::vector<std::size_t> children;
};

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

// Uniform bucket grid over node positions for radius and nearest queries.
class NodeIndex {
 public:
  NodeIndex(Vec2 lo, double extent_x, double extent_y, double cell)
      : lo_(lo), cell_(cell),
        nx_(std::max(1, static_cast<int>(std::ceil(extent_x / cell)))),
        ny_(std::max(1, static_cast<int>(std::ceil(extent_y / cell)))),
        buckets_(static_cast<std::size_t>(nx_) * ny_) {}

  void insert(std::size_t id, Vec2 p) { buckets_[bucket(p)].push_back(id); }

  template <typename F>
  void for_each_within(Vec2 p, double radius, F&& f) const {
    const int cx0 = clamp_x(static_cast<int>(std::floor((p.x - radius - lo_.x) / cell_)));
    const int cx1 = clamp_x(static_cast<int>(std::floor((p.x + radius - lo_.x) / cell_)));
    const int cy0 = clamp_y(static_cast<int>(std::floor((p.y - radius - lo_.y) / cell_)));
    const int cy1 = clamp_y(static_cast<int>(std::floor((p.y + radius - lo_.y) / cell_)));
    for (int cy = cy0; cy <= cy1; ++cy)
      for (int cx = cx0; cx <= cx1; ++cx)
        for (std::size_t id : buckets_[static_cast<std::size_t>(cy) * nx_ + cx]) f(id);
  }

  /// Exact nearest neighbour by expanding rings of buckets.
  std::size_t nearest(Vec2 p, const std::vector<Node>& nodes) const {
    const int bx = clamp_x(static_cast<int>(std::floor((p.x - lo_.x) / cell_)));
    const int by = clamp_y(static_cast<int>(std::floor((p.y - lo_.y) / cell_)));
    std::size_t best = kNone;
    double best_d = std::numeric_limits<double>::infinity();
    const int max_ring = std::max(nx_, ny_);
    for (int ring = 0; ring <= max_ring; ++ring) {
      // Any bucket in this ring is at least (ring - 1) * cell away.
      if (best != kNone && (ring - 1) * cell_ > std::sqrt(best_d)) break;
      for (int cy = by - ring; cy <= by + ring; ++cy) {
        if (cy < 0 || cy >= ny_) continue;
        for (int cx = bx - ring; cx <= bx + ring; ++cx) {
          if (cx < 0 || cx >= nx_) continue;
          if (std::max(std::abs(cx - bx), std::abs(cy - by)) != ring) continue;
          for (std::size_t id : buckets_[static_cast<std::size_t>(cy) * nx_ + cx]) {
            const Vec2 d = nodes[id].p - p;
            const double dd = d.x * d.x + d.y * d.y;
            if (dd < best_d || (dd == best_d && id < best)) {
              best_d = dd;
              best = id;
            }
          }
        }
      }
    }
    return best;
  }

 private:
  std::size_t bucket(Vec2 p) const {
    const int cx = clamp_x(static_cast<int>(std::floor((p.x - lo_.x) / cell_)));
    const int cy = clamp_y(static_cast<int>(std::floor((p.y - lo_.y) / cell_)));
    return static_cast<std::size_t>(cy) * nx_ + cx;
  }
  int clamp_x(int v) const { return std::clamp(v, 0, nx_ - 1); }
  int clamp_y(int v) const { return std::clamp(v, 0, ny_ - 1); }

  Vec2 lo_;
  double cell_;
  int nx_, ny_;
  std::vector<std::vector<std::size_t>> buckets_;
};

void propagate_cost(std::vector<Node>& nodes, std::size_t root, double delta) {
  std::vector<std::size_t> stack{root};
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    for (std::size_t c : nodes[i].children) {
      nodes[c].cost += delta;
      stack.push_back(c);
    }
  }
}

}  // namespace

Path2D plan_rrt_star(const OccupancyGrid& grid, const Pose2D& start, const Pose2D& goal, const RrtParams& params) {
  params.validate();
  detail::endpoint_cell(grid, start, "start");
  detail::endpoint_cell(grid, goal, "goal");

  const auto& g = grid.geometry();
  std::mt19937_64 rng(params.rng_seed);
  std::uniform_real_distribution<double> ux(g.origin.x, g.origin.x + g.extent_x());
  std::uniform_real_distribution<double> uy(g.origin.y, g.origin.y + g.extent_y());
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const Vec2 goal_p = goal.position();
  std::vector<Node> nodes;
  nodes.reserve(static_cast<std::size_t>(params.max_iterations) + 1);
  nodes.push_back({start.position(), kNone, 0.0, {}});
  NodeIndex index(g.origin, g.extent_x(), g.extent_y(), params.rewire_radius);
  index.insert(0, start.position());
  std::vector<std::size_t> goal_parents;
  if (distance(start.position(), goal_p) <= params.step_size && segment_free(grid, start.position(), goal_p)) {
    goal_parents.push_back(0);
  }

  std::vector<std::size_t> near;
  for (int it = 0; it < params.max_iterations; ++it) {
    const Vec2 sample = unit(rng) < params.goal_bias ? goal_p : Vec2{ux(rng), uy(rng)};
    const std::size_t nearest = index.nearest(sample, nodes);
    const Vec2 from = nodes[nearest].p;
    const double d = distance(from, sample);
    if (d == 0.0) continue;
    const Vec2 q = d <= params.step_size ? sample : from + (params.step_size / d) * (sample - from);
    if (!segment_free(grid, from, q)) continue;

    near.clear();
    const double r2 = params.rewire_radius * params.rewire_radius;
    index.for_each_within(q, params.rewire_radius, [&](std::size_t id) {
      const Vec2 dv = nodes[id].p - q;
      if (dv.x * dv.x + dv.y * dv.y <= r2) near.push_back(id);
    });
    std::sort(near.begin(), near.end());

    std::size_t parent = nearest;
    double best_cost = nodes[nearest].cost + distance(from, q);
    for (std::size_t id : near) {
      if (id == nearest) continue;
      const double c = nodes[id].cost + distance(nodes[id].p, q);
      if (c < best_cost && segment_free(grid, nodes[id].p, q)) {
        best_cost = c;
        parent = id;
      }
    }
    const std::size_t added = nodes.size();
    nodes.push_back({q, parent, best_cost, {}});
    nodes[parent].children.push_back(added);
    index.insert(added, q);

    for (std::size_t id : near) {
      if (id == parent) continue;
      const double c = best_cost + distance(q, nodes[id].p);
      if (c < nodes[id].cost && segment_free(grid, q, nodes[id].p)) {
        auto& siblings = nodes[nodes[id].parent].children;
        siblings.erase(std::find(siblings.begin(), siblings.end(), id));
        const double delta = c - nodes[id].cost;
        nodes[id].parent = added;
        nodes[id].cost = c;
        nodes[added].children.push_back(id);
        propagate_cost(nodes, id, delta);
      }
    }

    if (distance(q, goal_p) <= params.step_size && segment_free(grid, q, goal_p)) goal_parents.push_back(added);
  }

  std::size_t best = kNone;
  double best_total = std::numeric_limits<double>::infinity();
  for (std::size_t id : goal_parents) {
    const double c = nodes[id].cost + distance(nodes[id].p, goal_p);
    if (c < best_total) {
      best_total = c;
      best = id;
    }
  }
  if (best == kNone) throw Error(ErrorCode::NoPath, "RRT*: no connection to the goal");

  std::vector<Vec2> pts{goal_p};
  for (std::size_t i = best; i != kNone; i = nodes[i].parent) pts.push_back(nodes[i].p);
  std::reverse(pts.begin(), pts.end());
  return detail::finish_path(grid, std::move(pts));
}

}  // namespace poa
