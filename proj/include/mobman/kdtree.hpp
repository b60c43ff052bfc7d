#pragma once

#include "mobman/geometry.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace mobman {

// Static 3D k-d tree over a borrowed point array. The points must outlive
// the tree. Query results are deterministic: ties in distance are broken by
// smaller point index.
class KdTree {
public:
  explicit KdTree(std::span<const Point3> points);

  /// k nearest neighbours of q, nearest first (includes q itself when q is
  /// one of the indexed points).
  std::vector<std::size_t> nearest(const Point3& q, std::size_t k) const;

  /// All points with |p - q| <= radius, ascending index order.
  std::vector<std::size_t> within(const Point3& q, double radius) const;

  /// Index of the single nearest point and its squared distance.
  std::pair<std::size_t, double> nearest_one(const Point3& q) const;

  std::size_t size() const { return points_.size(); }

private:
  struct Node {
    std::size_t begin = 0, end = 0;  // range into order_
    int axis = -1;                   // -1 for leaf
    double split = 0.0;
    int left = -1, right = -1;
  };

  int build(std::size_t begin, std::size_t end);

  std::span<const Point3> points_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

}  // namespace mobman
