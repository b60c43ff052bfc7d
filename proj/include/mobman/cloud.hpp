#pragma once

#include "mobman/geometry.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mobman {

struct PointCloud {
  std::vector<Point3> points;
  std::vector<Point3> normals;  // empty, or one unit normal per point
  std::string frame = "base_link";

  bool has_normals() const { return !normals.empty(); }
  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }

  /// Throws InvalidArgument when the normals/points pairing or finiteness
  /// invariants are violated.
  void validate() const;
};

// Plane {p : normal.p + offset = 0} with the normal in the +z hemisphere.
struct Plane {
  Point3 normal = Point3::UnitZ();
  double offset = 0.0;
  std::vector<std::size_t> inliers;

  double signed_distance(const Point3& p) const { return normal.dot(p) + offset; }
};

// In-plane 2D frame: world = origin + u * axis_u + v * axis_v.
struct PlaneBasis {
  Point3 origin = Point3::Zero();
  Point3 axis_u = Point3::UnitX();
  Point3 axis_v = Point3::UnitY();

  Point3 normal() const { return axis_u.cross(axis_v); }
  Vec2 project(const Point3& p) const {
    const Point3 d = p - origin;
    return {d.dot(axis_u), d.dot(axis_v)};
  }
  Point3 lift(const Vec2& uv) const { return origin + uv.x() * axis_u + uv.y() * axis_v; }
  double height(const Point3& p) const { return (p - origin).dot(normal()); }

  static PlaneBasis for_plane(const Plane& plane, const Point3& near);
};

// Strictly convex CCW polygon in a plane basis.
struct Polygon2 {
  std::vector<Vec2> vertices;
  PlaneBasis basis;

  double signed_area() const;
  /// Inside or on the boundary, with an absolute tolerance in meters.
  bool contains(const Vec2& p, double tol = 1e-9) const;
  /// Distance from p to the nearest edge (p assumed inside).
  double edge_distance(const Vec2& p) const;
};

struct Cluster {
  std::vector<std::size_t> indices;
  Point3 centroid = Point3::Zero();
};

enum class Axis { X = 0, Y = 1, Z = 2 };

struct PlaneSegmentationParams {
  double dist_thresh = 0.005;
  Point3 ref_axis = Point3::UnitZ();
  double angle_tol = deg2rad(10.0);
  int max_iters = 500;
  std::uint64_t rng_seed = 0;
};

struct ClusterParams {
  double tolerance = 0.02;
  std::size_t min_size = 25;
  std::size_t max_size = 20000;
};

PointCloud voxel_downsample(const PointCloud& cloud, double leaf);

PointCloud passthrough(const PointCloud& cloud, Axis axis, double lo, double hi);

PointCloud estimate_normals(const PointCloud& cloud, std::size_t k);

Plane segment_plane(const PointCloud& cloud, const PlaneSegmentationParams& params);

Polygon2 convex_hull(const Plane& plane, const PointCloud& cloud);

/// Andrew's monotone chain on raw 2D points: CCW, collinear points dropped.
/// Returns fewer than 3 vertices when the input is degenerate.
std::vector<Vec2> convex_hull_2d(std::vector<Vec2> pts);

std::vector<std::size_t> extract_prism(const PointCloud& cloud, const Polygon2& polygon,
                                       double h_min, double h_max);

std::vector<Cluster> euclidean_cluster(const PointCloud& cloud,
                                       std::span<const std::size_t> subset,
                                       const ClusterParams& params);

Point3 centroid_of(const PointCloud& cloud, std::span<const std::size_t> indices);

// ASCII PLY subset: x y z with optional nx ny nz.
PointCloud read_ply(const std::string& path);
PointCloud parse_ply(const std::string& text);
std::string format_ply(const PointCloud& cloud);
void write_ply(const PointCloud& cloud, const std::string& path);

}  // namespace mobman
