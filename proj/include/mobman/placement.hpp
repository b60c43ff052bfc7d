#pragma once

#include "mobman/cloud.hpp"
#include "mobman/kinematics.hpp"

#include <cstdint>
#include <vector>

namespace mobman {

struct Obstacle2 {
  Vec2 center = Vec2::Zero();
  double radius = 0.0;
};

struct PlacementPose {
  Pose pose;
  Vec2 uv = Vec2::Zero();  // position in the support polygon's basis
  double clearance = 0.0;  // smallest margin over the edge and obstacle constraints
  double reach_score = 0.0;
};

struct PerceptionConfig {
  double leaf = 0.005;
  bool use_passthrough = false;
  Axis passthrough_axis = Axis::Z;
  double passthrough_lo = -10.0, passthrough_hi = 10.0;
  std::size_t normal_k = 10;
  PlaneSegmentationParams plane;
  double prism_h_min = 0.01;
  double prism_h_max = 0.5;
  ClusterParams cluster;
};

struct SceneModel {
  PointCloud cloud;  // the processed (filtered, with normals) cloud all indices refer to
  Plane plane;
  Polygon2 polygon;
  std::vector<Cluster> clusters;
};

/// Voxel grid, optional passthrough, normals, plane, hull, prism, clusters.
SceneModel segment_scene(const PointCloud& raw, const PerceptionConfig& cfg);

struct WorkstationModel {
  Plane plane;
  Polygon2 polygon;
  std::vector<Obstacle2> obstacles;
};

WorkstationModel workstation_model(const PointCloud& cloud, const PerceptionConfig& cfg);
WorkstationModel workstation_model(const SceneModel& scene);

struct PlacementSamplingParams {
  double d_min = 0.03;
  double footprint = 0.05;
  std::size_t n = 20;
  std::size_t max_attempts = 10000;
  std::uint64_t rng_seed = 0;
};

/// Margin of a candidate point against every constraint; negative when violated.
double placement_margin(const Polygon2& polygon, const std::vector<Obstacle2>& obstacles,
                        const Vec2& p, double d_min, double footprint);

std::vector<PlacementPose> sample_placements(const Polygon2& polygon, const std::vector<Obstacle2>& obstacles,
                                             const PlacementSamplingParams& params);

struct PlacementRankingParams {
  double approach_height = 0.05;  // end-effector target above the placement point
  IkParams ik;
};

/// Top-down end-effector target used to score reachability of a placement.
Pose placement_target(const PlacementPose& placement, double approach_height);

std::vector<PlacementPose> rank_placements(const KinematicChain& chain, const std::vector<PlacementPose>& candidates,
                                           const JointVector& q0, const PlacementRankingParams& params = {});

}  // namespace mobman
