#include "mobman/placement.hpp"

#include "mobman/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace mobman {

SceneModel segment_scene(const PointCloud& raw, const PerceptionConfig& cfg) {
  raw.validate();
  if (raw.empty()) fail(ErrorCode::TooFewPoints, "empty point cloud");
  SceneModel s;
  PointCloud c = voxel_downsample(raw, cfg.leaf);
  if (cfg.use_passthrough)
    c = passthrough(c, cfg.passthrough_axis, cfg.passthrough_lo, cfg.passthrough_hi);
  s.cloud = estimate_normals(c, cfg.normal_k);
  s.plane = segment_plane(s.cloud, cfg.plane);
  s.polygon = convex_hull(s.plane, s.cloud);
  const auto prism = extract_prism(s.cloud, s.polygon, cfg.prism_h_min, cfg.prism_h_max);
  s.clusters = euclidean_cluster(s.cloud, prism, cfg.cluster);
  return s;
}

WorkstationModel workstation_model(const SceneModel& scene) {
  WorkstationModel m;
  m.plane = scene.plane;
  m.polygon = scene.polygon;
  for (const auto& c : scene.clusters) {
    Obstacle2 o;
    o.center = m.polygon.basis.project(c.centroid);
    for (std::size_t i : c.indices)
      o.radius = std::max(o.radius, (m.polygon.basis.project(scene.cloud.points[i]) - o.center).norm());
    m.obstacles.push_back(o);
  }
  return m;
}

WorkstationModel workstation_model(const PointCloud& cloud, const PerceptionConfig& cfg) {
  return workstation_model(segment_scene(cloud, cfg));
}

double placement_margin(const Polygon2& polygon, const std::vector<Obstacle2>& obstacles,
                        const Vec2& p, double d_min, double footprint) {
  double margin = polygon.edge_distance(p) - footprint;
  for (const auto& o : obstacles)
    margin = std::min(margin, (p - o.center).norm() - (o.radius + footprint + d_min));
  return margin;
}

std::vector<PlacementPose> sample_placements(const Polygon2& polygon, const std::vector<Obstacle2>& obstacles,
                                             const PlacementSamplingParams& params) {
  if (!(params.d_min >= 0.0) || !(params.footprint >= 0.0) || params.n < 1)
    fail(ErrorCode::InvalidArgument, "invalid placement sampling parameters");
  if (polygon.vertices.size() < 3) fail(ErrorCode::InvalidArgument, "support polygon is degenerate");

  Vec2 lo = polygon.vertices.front(), hi = lo;
  for (const auto& v : polygon.vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }

  std::mt19937_64 rng(params.rng_seed);
  auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

  const Point3 normal = polygon.basis.normal();
  Eigen::Matrix3d frame;
  frame.col(0) = polygon.basis.axis_u;
  frame.col(1) = polygon.basis.axis_v;
  frame.col(2) = normal;
  const Eigen::Quaterniond q(frame);

  std::vector<PlacementPose> out;
  for (std::size_t attempt = 0; attempt < params.max_attempts && out.size() < params.n; ++attempt) {
    const Vec2 p(lo.x() + (hi.x() - lo.x()) * unit(), lo.y() + (hi.y() - lo.y()) * unit());
    if (!polygon.contains(p, 0.0)) continue;
    const double margin = placement_margin(polygon, obstacles, p, params.d_min, params.footprint);
    if (margin < 0.0) continue;
    PlacementPose pp;
    pp.uv = p;
    pp.clearance = margin;
    pp.pose.position = polygon.basis.lift(p);
    pp.pose.orientation = q.normalized();
    out.push_back(pp);
  }
  if (out.empty()) fail(ErrorCode::NoFreeSpace, "no free placement found");
  return out;
}

Pose placement_target(const PlacementPose& placement, double approach_height) {
  Pose t;
  const Point3 up = placement.pose.orientation * Point3::UnitZ();
  t.position = placement.pose.position + approach_height * up;
  // gripper z points down the plane normal, x along the plane's u axis
  Eigen::Matrix3d r;
  r.col(0) = placement.pose.orientation * Point3::UnitX();
  r.col(2) = -up;
  r.col(1) = r.col(2).cross(r.col(0));
  t.orientation = Eigen::Quaterniond(r).normalized();
  return t;
}

std::vector<PlacementPose> rank_placements(const KinematicChain& chain, const std::vector<PlacementPose>& candidates,
                                           const JointVector& q0, const PlacementRankingParams& params) {
  if (candidates.empty()) fail(ErrorCode::InvalidArgument, "no placement candidates");
  std::vector<PlacementPose> out = candidates;
  bool any = false;
  for (auto& c : out) {
    const IkResult r = ik_dls(chain, placement_target(c, params.approach_height), q0, params.ik);
    c.reach_score = r.success ? 1.0 / (1.0 + r.iterations) : 0.0;
    any = any || r.success;
  }
  if (!any) fail(ErrorCode::NoReachablePlacement, "no placement is reachable");
  std::stable_sort(out.begin(), out.end(), [](const PlacementPose& a, const PlacementPose& b) {
    if (a.reach_score != b.reach_score) return a.reach_score > b.reach_score;
    if (a.clearance != b.clearance) return a.clearance > b.clearance;
    if (a.uv.x() != b.uv.x()) return a.uv.x() < b.uv.x();
    return a.uv.y() < b.uv.y();
  });
  return out;
}

}  // namespace mobman
