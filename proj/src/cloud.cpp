#include "mobman/cloud.hpp"

#include "mobman/error.hpp"
#include "mobman/kdtree.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <random>

namespace mobman {

namespace {

Point3 canonical_normal(Point3 n) {
  n.normalize();
  if (n.z() < 0.0 || (n.z() == 0.0 && (n.y() < 0.0 || (n.y() == 0.0 && n.x() < 0.0)))) n = -n;
  return n;
}

struct PlaneFit {
  Point3 normal;
  double offset;
};

// Total least squares plane through a point set.
PlaneFit fit_plane(const PointCloud& cloud, std::span<const std::size_t> idx) {
  const Point3 c = centroid_of(cloud, idx);
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (std::size_t i : idx) {
    const Point3 d = cloud.points[i] - c;
    cov += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
  const Point3 n = canonical_normal(es.eigenvectors().col(0));
  return {n, -n.dot(c)};
}

std::vector<std::size_t> plane_inliers(const PointCloud& cloud, const Point3& n, double offset,
                                       const PlaneSegmentationParams& p) {
  std::vector<std::size_t> out;
  const double cos_tol = std::cos(p.angle_tol);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (std::abs(n.dot(cloud.points[i]) + offset) > p.dist_thresh) continue;
    if (std::abs(n.dot(cloud.normals[i])) < cos_tol) continue;
    out.push_back(i);
  }
  return out;
}

double cross2(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

}  // namespace

void PointCloud::validate() const {
  for (const auto& p : points)
    if (!p.allFinite()) fail(ErrorCode::InvalidArgument, "point cloud contains a non-finite point");
  if (normals.empty()) return;
  if (normals.size() != points.size())
    fail(ErrorCode::InvalidArgument, "normals/points length mismatch");
  for (const auto& n : normals)
    if (!n.allFinite() || std::abs(n.norm() - 1.0) > 1e-6)
      fail(ErrorCode::InvalidArgument, "normal is not unit length");
}

Point3 centroid_of(const PointCloud& cloud, std::span<const std::size_t> indices) {
  Point3 sum = Point3::Zero();
  for (std::size_t i : indices) sum += cloud.points[i];
  return indices.empty() ? sum : Point3(sum / static_cast<double>(indices.size()));
}

PlaneBasis PlaneBasis::for_plane(const Plane& plane, const Point3& near) {
  PlaneBasis b;
  const Point3 n = plane.normal.normalized();
  b.origin = near - plane.signed_distance(near) * n;
  Point3 u = Point3::UnitX() - Point3::UnitX().dot(n) * n;
  if (u.norm() < 1e-6) u = Point3::UnitY() - Point3::UnitY().dot(n) * n;
  b.axis_u = u.normalized();
  b.axis_v = n.cross(b.axis_u).normalized();
  return b;
}

double Polygon2::signed_area() const {
  double a = 0.0;
  for (std::size_t i = 0, n = vertices.size(); i < n; ++i) {
    const Vec2& p = vertices[i];
    const Vec2& q = vertices[(i + 1) % n];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * a;
}

bool Polygon2::contains(const Vec2& p, double tol) const {
  const std::size_t n = vertices.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = vertices[i];
    const Vec2& b = vertices[(i + 1) % n];
    const double len = (b - a).norm();
    if (cross2(a, b, p) < -tol * len) return false;
  }
  return true;
}

double Polygon2::edge_distance(const Vec2& p) const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0, n = vertices.size(); i < n; ++i) {
    const Vec2& a = vertices[i];
    const Vec2& b = vertices[(i + 1) % n];
    best = std::min(best, cross2(a, b, p) / (b - a).norm());
  }
  return best;
}

PointCloud voxel_downsample(const PointCloud& cloud, double leaf) {
  if (!(leaf > 0.0)) fail(ErrorCode::NonPositiveLeaf, "voxel leaf must be positive");
  struct Acc {
    Point3 sum = Point3::Zero();
    Point3 lo = Point3::Constant(std::numeric_limits<double>::infinity());
    Point3 hi = Point3::Constant(-std::numeric_limits<double>::infinity());
    std::size_t count = 0;
  };
  std::map<std::array<std::int64_t, 3>, Acc> voxels;
  for (const auto& p : cloud.points) {
    const std::array<std::int64_t, 3> key{static_cast<std::int64_t>(std::floor(p.x() / leaf)),
                                          static_cast<std::int64_t>(std::floor(p.y() / leaf)),
                                          static_cast<std::int64_t>(std::floor(p.z() / leaf))};
    Acc& a = voxels[key];
    a.sum += p;
    a.lo = a.lo.cwiseMin(p);
    a.hi = a.hi.cwiseMax(p);
    ++a.count;
  }
  PointCloud out;
  out.frame = cloud.frame;
  out.points.reserve(voxels.size());
  for (const auto& [key, a] : voxels) {
    // rounding in the mean must not leave the member bounding box
    const Point3 c = (a.sum / static_cast<double>(a.count)).cwiseMax(a.lo).cwiseMin(a.hi);
    out.points.push_back(c);
  }
  return out;
}

PointCloud passthrough(const PointCloud& cloud, Axis axis, double lo, double hi) {
  if (lo > hi) fail(ErrorCode::InvertedRange, "passthrough range is inverted");
  const int a = static_cast<int>(axis);
  PointCloud out;
  out.frame = cloud.frame;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const double v = cloud.points[i][a];
    if (v < lo || v > hi) continue;
    out.points.push_back(cloud.points[i]);
    if (cloud.has_normals()) out.normals.push_back(cloud.normals[i]);
  }
  return out;
}

PointCloud estimate_normals(const PointCloud& cloud, std::size_t k) {
  if (k < 3 || cloud.size() < k)
    fail(ErrorCode::TooFewPoints, "normal estimation needs at least k >= 3 points");
  KdTree tree(cloud.points);
  PointCloud out = cloud;
  out.normals.resize(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto nn = tree.nearest(cloud.points[i], k);
    Point3 c = Point3::Zero();
    for (std::size_t j : nn) c += cloud.points[j];
    c /= static_cast<double>(nn.size());
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (std::size_t j : nn) {
      const Point3 d = cloud.points[j] - c;
      cov += d * d.transpose();
    }
    if (cov.trace() <= 0.0)
      fail(ErrorCode::DegenerateNeighborhood,
           "all neighbours of point " + std::to_string(i) + " coincide");
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
    Point3 n = es.eigenvectors().col(0).normalized();
    if (n.dot(-cloud.points[i]) < 0.0) n = -n;  // face the sensor at the origin
    out.normals[i] = n;
  }
  return out;
}

Plane segment_plane(const PointCloud& cloud, const PlaneSegmentationParams& params) {
  if (cloud.size() < 3) fail(ErrorCode::TooFewPoints, "plane segmentation needs >= 3 points");
  if (!cloud.has_normals()) fail(ErrorCode::InvalidArgument, "plane segmentation needs normals");
  if (!(params.dist_thresh > 0.0) || params.max_iters < 1)
    fail(ErrorCode::InvalidArgument, "invalid plane segmentation parameters");

  const std::uint64_t n = cloud.size();
  std::mt19937_64 rng(params.rng_seed);
  Plane best;
  bool found = false;

  for (int it = 0; it < params.max_iters; ++it) {
    const std::uint64_t a = rng() % n, b = rng() % n, c = rng() % n;
    if (a == b || b == c || a == c) continue;
    const Point3& pa = cloud.points[a];
    const Point3 cr = (cloud.points[b] - pa).cross(cloud.points[c] - pa);
    if (cr.norm() < 1e-12) continue;
    const Point3 normal = canonical_normal(cr);
    if (line_angle(normal, params.ref_axis) > params.angle_tol) continue;
    const double offset = -normal.dot(pa);
    auto inl = plane_inliers(cloud, normal, offset, params);
    if (inl.size() < 3) continue;
    if (!found || inl.size() > best.inliers.size()) {
      best.normal = normal;
      best.offset = offset;
      best.inliers = std::move(inl);
      found = true;
    }
  }
  if (!found) fail(ErrorCode::NoAdmissiblePlane, "no admissible plane found");

  // polish the consensus plane by a least-squares fit over its inliers
  for (int round = 0; round < 3; ++round) {
    const PlaneFit fit = fit_plane(cloud, best.inliers);
    if (line_angle(fit.normal, params.ref_axis) > params.angle_tol) break;
    auto inl = plane_inliers(cloud, fit.normal, fit.offset, params);
    if (inl.size() < best.inliers.size()) break;
    best.normal = fit.normal;
    best.offset = fit.offset;
    best.inliers = std::move(inl);
  }
  return best;
}

std::vector<Vec2> convex_hull_2d(std::vector<Vec2> pts) {
  auto less = [](const Vec2& a, const Vec2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  };
  std::sort(pts.begin(), pts.end(), less);
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return {};

  double scale = 0.0;
  for (const auto& p : pts) scale = std::max(scale, (p - pts.front()).squaredNorm());
  const double eps = 1e-12 * scale;

  std::vector<Vec2> h(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross2(h[k - 2], h[k - 1], pts[i]) <= eps) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross2(h[k - 2], h[k - 1], pts[i]) <= eps) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  if (h.size() < 3) return {};
  return h;
}

Polygon2 convex_hull(const Plane& plane, const PointCloud& cloud) {
  if (plane.inliers.size() < 3)
    fail(ErrorCode::DegenerateInliers, "convex hull needs at least 3 inliers");
  Polygon2 poly;
  poly.basis = PlaneBasis::for_plane(plane, centroid_of(cloud, plane.inliers));
  std::vector<Vec2> uv;
  uv.reserve(plane.inliers.size());
  for (std::size_t i : plane.inliers) uv.push_back(poly.basis.project(cloud.points[i]));
  poly.vertices = convex_hull_2d(std::move(uv));
  if (poly.vertices.size() < 3)
    fail(ErrorCode::DegenerateInliers, "plane inliers are collinear");
  return poly;
}

std::vector<std::size_t> extract_prism(const PointCloud& cloud, const Polygon2& polygon,
                                       double h_min, double h_max) {
  if (h_min < 0.0 || !(h_min < h_max))
    fail(ErrorCode::InvertedHeightRange, "prism requires 0 <= h_min < h_max");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const double h = polygon.basis.height(cloud.points[i]);
    if (h < h_min || h > h_max) continue;
    if (polygon.contains(polygon.basis.project(cloud.points[i]))) out.push_back(i);
  }
  return out;
}

std::vector<Cluster> euclidean_cluster(const PointCloud& cloud,
                                       std::span<const std::size_t> subset,
                                       const ClusterParams& params) {
  if (!(params.tolerance > 0.0) || params.min_size < 1 || params.min_size > params.max_size)
    fail(ErrorCode::InvalidArgument, "invalid clustering parameters");
  std::vector<Point3> pts;
  pts.reserve(subset.size());
  for (std::size_t i : subset) pts.push_back(cloud.points[i]);
  KdTree tree(pts);

  std::vector<bool> seen(pts.size(), false);
  std::vector<Cluster> clusters;
  for (std::size_t seed = 0; seed < pts.size(); ++seed) {
    if (seen[seed]) continue;
    std::vector<std::size_t> members{seed};
    seen[seed] = true;
    for (std::size_t head = 0; head < members.size(); ++head) {
      for (std::size_t nb : tree.within(pts[members[head]], params.tolerance)) {
        if (seen[nb]) continue;
        seen[nb] = true;
        members.push_back(nb);
      }
    }
    if (members.size() < params.min_size || members.size() > params.max_size) continue;
    Cluster c;
    c.indices.reserve(members.size());
    for (std::size_t m : members) c.indices.push_back(subset[m]);
    std::sort(c.indices.begin(), c.indices.end());
    c.indices.erase(std::unique(c.indices.begin(), c.indices.end()), c.indices.end());
    c.centroid = centroid_of(cloud, c.indices);
    clusters.push_back(std::move(c));
  }
  std::sort(clusters.begin(), clusters.end(), [](const Cluster& a, const Cluster& b) {
    const auto& p = a.centroid;
    const auto& q = b.centroid;
    if (p.x() != q.x()) return p.x() < q.x();
    if (p.y() != q.y()) return p.y() < q.y();
    if (p.z() != q.z()) return p.z() < q.z();
    return a.indices.front() < b.indices.front();
  });
  return clusters;
}

}  // namespace mobman
