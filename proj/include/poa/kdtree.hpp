#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

namespace poa {

/// Static k-d tree over D-dimensional points. Queries return indices into
/// the point array the tree was built from; equal distances resolve to the
/// smaller index.
template <std::size_t D>
class KdTree {
 public:
  using Point = std::array<double, D>;

  KdTree() = default;
  explicit KdTree(std::vector<Point> points) : points_(std::move(points)) {
    order_.resize(points_.size());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    nodes_.reserve(points_.size());
    if (!points_.empty()) root_ = build(0, order_.size(), 0);
  }

  std::size_t size() const { return points_.size(); }
  const Point& point(std::size_t i) const { return points_[i]; }

  /// Index and squared distance of the nearest point; size() when empty.
  std::pair<std::size_t, double> nearest(const Point& q) const {
    Heap heap(1);
    if (root_ != kNull) search(root_, q, heap);
    if (heap.items.empty()) return {points_.size(), std::numeric_limits<double>::infinity()};
    return {heap.items.front().second, heap.items.front().first};
  }

  /// Up to k nearest points as (squared distance, index), closest first.
  std::vector<std::pair<double, std::size_t>> knn(const Point& q, std::size_t k) const {
    Heap heap(k);
    if (root_ != kNull && k > 0) search(root_, q, heap);
    auto out = std::move(heap.items);
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  static constexpr std::size_t kNull = std::numeric_limits<std::size_t>::max();

  struct Node {
    std::size_t point;
    std::size_t axis;
    std::size_t left = kNull;
    std::size_t right = kNull;
  };

  // Bounded max-heap on (distance, index).
  struct Heap {
    explicit Heap(std::size_t cap) : capacity(cap) {}
    std::size_t capacity;
    std::vector<std::pair<double, std::size_t>> items;

    double bound() const {
      return items.size() < capacity ? std::numeric_limits<double>::infinity() : items.front().first;
    }
    void offer(double d, std::size_t idx) {
      const std::pair<double, std::size_t> e{d, idx};
      if (items.size() < capacity) {
        items.push_back(e);
        std::push_heap(items.begin(), items.end());
      } else if (e < items.front()) {
        std::pop_heap(items.begin(), items.end());
        items.back() = e;
        std::push_heap(items.begin(), items.end());
      }
    }
  };

  std::size_t build(std::size_t lo, std::size_t hi, std::size_t depth) {
    if (lo >= hi) return kNull;
    const std::size_t axis = depth % D;
    const std::size_t mid = lo + (hi - lo) / 2;
    std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(lo), order_.begin() + static_cast<std::ptrdiff_t>(mid),
                     order_.begin() + static_cast<std::ptrdiff_t>(hi), [&](std::size_t a, std::size_t b) {
                       if (points_[a][axis] != points_[b][axis]) return points_[a][axis] < points_[b][axis];
                       return a < b;
                     });
    const std::size_t id = nodes_.size();
    nodes_.push_back({order_[mid], axis});
    const std::size_t l = build(lo, mid, depth + 1);
    const std::size_t r = build(mid + 1, hi, depth + 1);
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
  }

  void search(std::size_t n, const Point& q, Heap& heap) const {
    const Node& node = nodes_[n];
    const Point& p = points_[node.point];
    double d = 0.0;
    for (std::size_t k = 0; k < D; ++k) d += (p[k] - q[k]) * (p[k] - q[k]);
    heap.offer(d, node.point);
    const double delta = q[node.axis] - p[node.axis];
    const std::size_t near = delta < 0.0 ? node.left : node.right;
    const std::size_t far = delta < 0.0 ? node.right : node.left;
    if (near != kNull) search(near, q, heap);
    // <= keeps equal-distance candidates on the far side reachable.
    if (far != kNull && delta * delta <= heap.bound()) search(far, q, heap);
  }

  std::vector<Point> points_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
  std::size_t root_ = kNull;
};

}  // namespace poa
