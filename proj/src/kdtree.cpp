#include "mobman/kdtree.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <queue>

namespace mobman {

namespace {
constexpr std::size_t kLeafSize = 12;
}

KdTree::KdTree(std::span<const Point3> points) : points_(points), order_(points.size()) {
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  if (!points_.empty()) root_ = build(0, order_.size());
}

int KdTree::build(std::size_t begin, std::size_t end) {
  Node node;
  node.begin = begin;
  node.end = end;
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(node);
  if (end - begin <= kLeafSize) return id;

  Eigen::Vector3d lo = Eigen::Vector3d::Constant(std::numeric_limits<double>::infinity());
  Eigen::Vector3d hi = -lo;
  for (std::size_t i = begin; i < end; ++i) {
    lo = lo.cwiseMin(points_[order_[i]]);
    hi = hi.cwiseMax(points_[order_[i]]);
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);
  if (hi[axis] - lo[axis] <= 0.0) return id;  // all coincident: keep as leaf

  const std::size_t mid = begin + (end - begin) / 2;
  auto cmp = [&](std::size_t a, std::size_t b) {
    double va = points_[a][axis], vb = points_[b][axis];
    return va < vb || (va == vb && a < b);
  };
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end, cmp);
  const double split = points_[order_[mid]][axis];

  const int left = build(begin, mid);
  const int right = build(mid, end);
  nodes_[id].axis = axis;
  nodes_[id].split = split;
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

std::vector<std::size_t> KdTree::nearest(const Point3& q, std::size_t k) const {
  std::vector<std::size_t> out;
  if (root_ < 0 || k == 0) return out;
  k = std::min(k, points_.size());

  // max-heap on (distance, index)
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry> heap;

  auto visit = [&](auto&& self, int id) -> void {
    const Node& n = nodes_[id];
    if (n.axis < 0) {
      for (std::size_t i = n.begin; i < n.end; ++i) {
        const std::size_t idx = order_[i];
        const double d = (points_[idx] - q).squaredNorm();
        Entry e{d, idx};
        if (heap.size() < k) {
          heap.push(e);
        } else if (e < heap.top()) {
          heap.pop();
          heap.push(e);
        }
      }
      return;
    }
    const double diff = q[n.axis] - n.split;
    const int first = diff < 0 ? n.left : n.right;
    const int second = diff < 0 ? n.right : n.left;
    self(self, first);
    if (heap.size() < k || diff * diff <= heap.top().first) self(self, second);
  };
  visit(visit, root_);

  out.resize(heap.size());
  for (std::size_t i = out.size(); i-- > 0;) {
    out[i] = heap.top().second;
    heap.pop();
  }
  return out;
}

std::pair<std::size_t, double> KdTree::nearest_one(const Point3& q) const {
  auto nn = nearest(q, 1);
  if (nn.empty()) return {0, std::numeric_limits<double>::infinity()};
  return {nn[0], (points_[nn[0]] - q).squaredNorm()};
}

std::vector<std::size_t> KdTree::within(const Point3& q, double radius) const {
  std::vector<std::size_t> out;
  if (root_ < 0) return out;
  const double r2 = radius * radius;
  auto visit = [&](auto&& self, int id) -> void {
    const Node& n = nodes_[id];
    if (n.axis < 0) {
      for (std::size_t i = n.begin; i < n.end; ++i) {
        const std::size_t idx = order_[i];
        if ((points_[idx] - q).squaredNorm() <= r2) out.push_back(idx);
      }
      return;
    }
    const double diff = q[n.axis] - n.split;
    if (diff <= radius) self(self, n.left);
    if (diff >= -radius) self(self, n.right);
  };
  visit(visit, root_);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace mobman
