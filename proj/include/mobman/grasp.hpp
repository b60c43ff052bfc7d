#pragma once

#include "mobman/kinematics.hpp"

#include <vector>

namespace mobman {

enum class Approach { Top, Frontal };

const char* to_string(Approach a);

struct GraspCandidate {
  Pose pregrasp_pose;
  Approach approach = Approach::Top;
  double offset = 0.05;
  double yaw = 0.0;  // rotation about the approach axis relative to nominal
  double score = 0.0;
};

/// Frontal iff height > threshold.
Approach decide_approach(double object_height, double threshold = 0.06);

// Gripper convention: the end-effector z axis is the approach direction and
// the x axis is the nominal closing direction before the yaw sweep.
//
// Top: approach along world -Z, the pose is displaced +Z by offset, and the
// nominal x axis follows the horizontal projection of the object's major
// axis (world X when the major axis is vertical).
// Frontal: approach along the horizontal direction from arm_base to the
// object, displaced back along it by offset, nominal x axis world +Z.
//
// Yaws are spread uniformly over [-spread/2, +spread/2] and returned ordered
// by |yaw| (negative first on ties).
std::vector<GraspCandidate> sample_pregrasp(const Pose& object_pose, Approach approach, double offset,
                                            std::size_t n, double yaw_spread,
                                            const Point3& arm_base = Point3::Zero());

struct ReachableGrasp {
  GraspCandidate candidate;
  IkResult ik;
  std::size_t index = 0;
};

/// First candidate (in order) for which IK succeeds.
ReachableGrasp select_reachable(const KinematicChain& chain, const std::vector<GraspCandidate>& candidates,
                                const JointVector& q0, const IkParams& ik = {});

struct GripperFeedback {
  std::array<double, 2> position{};  // rad, per finger
  std::array<double, 2> force{};     // normalized load in [0, 1]
};

// Finger gap = gap_closed + gap_per_rad * (position[0] + position[1]).
struct GraspMonitorConfig {
  double force_min = 0.3;
  double gap_min = 0.005;
  double gap_max = 0.06;
  double gap_closed = 0.0;
  double gap_per_rad = 0.02;
};

enum class GraspState { Grasped, Empty };

double finger_gap(const GripperFeedback& fb, const GraspMonitorConfig& cfg);
GraspState grasp_monitor(const GripperFeedback& fb, const GraspMonitorConfig& cfg = {});

}  // namespace mobman
