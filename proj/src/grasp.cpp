#include "mobman/grasp.hpp"

#include "mobman/error.hpp"

#include <algorithm>
#include <cmath>

namespace mobman {

const char* to_string(Approach a) { return a == Approach::Top ? "Top" : "Frontal"; }

Approach decide_approach(double object_height, double threshold) {
  if (!(object_height >= 0.0)) fail(ErrorCode::InvalidArgument, "object height must be >= 0");
  return object_height > threshold ? Approach::Frontal : Approach::Top;
}

std::vector<GraspCandidate> sample_pregrasp(const Pose& object_pose, Approach approach, double offset,
                                            std::size_t n, double yaw_spread, const Point3& arm_base) {
  if (n < 1) fail(ErrorCode::InvalidArgument, "need at least one grasp sample");
  if (!(offset > 0.0)) fail(ErrorCode::InvalidArgument, "pre-grasp offset must be positive");

  Point3 dir;      // approach direction (gripper z)
  Point3 nominal;  // gripper x before the yaw sweep
  if (approach == Approach::Top) {
    dir = -Point3::UnitZ();
    const Point3 major = object_pose.orientation * Point3::UnitX();
    nominal = Point3(major.x(), major.y(), 0.0);
    if (nominal.norm() < 1e-9) nominal = Point3::UnitX();
  } else {
    dir = object_pose.position - arm_base;
    dir.z() = 0.0;
    if (dir.norm() < 1e-9) fail(ErrorCode::InvalidArgument, "object is above the arm base");
    nominal = Point3::UnitZ();
  }
  dir.normalize();
  nominal = (nominal - nominal.dot(dir) * dir).normalized();

  Eigen::Matrix3d frame;
  frame.col(0) = nominal;
  frame.col(1) = dir.cross(nominal);
  frame.col(2) = dir;

  std::vector<double> yaws(n);
  for (std::size_t i = 0; i < n; ++i)
    yaws[i] = n == 1 ? 0.0 : -yaw_spread / 2 + yaw_spread * static_cast<double>(i) / static_cast<double>(n - 1);
  std::stable_sort(yaws.begin(), yaws.end(), [](double a, double b) {
    if (std::abs(a) != std::abs(b)) return std::abs(a) < std::abs(b);
    return a < b;
  });

  std::vector<GraspCandidate> out;
  out.reserve(n);
  for (double yaw : yaws) {
    GraspCandidate c;
    c.approach = approach;
    c.offset = offset;
    c.yaw = yaw;
    c.score = std::cos(yaw);
    c.pregrasp_pose.position = object_pose.position - offset * dir;
    const Eigen::Matrix3d r = frame * Eigen::AngleAxisd(yaw, Point3::UnitZ()).toRotationMatrix();
    c.pregrasp_pose.orientation = Eigen::Quaterniond(r).normalized();
    out.push_back(c);
  }
  return out;
}

ReachableGrasp select_reachable(const KinematicChain& chain, const std::vector<GraspCandidate>& candidates,
                                const JointVector& q0, const IkParams& ik) {
  if (candidates.empty()) fail(ErrorCode::InvalidArgument, "no grasp candidates");
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    IkResult r = ik_dls(chain, candidates[i].pregrasp_pose, q0, ik);
    if (r.success) return {candidates[i], r, i};
  }
  fail(ErrorCode::NoReachableCandidate, "none of the grasp candidates is reachable");
}

double finger_gap(const GripperFeedback& fb, const GraspMonitorConfig& cfg) {
  return cfg.gap_closed + cfg.gap_per_rad * (fb.position[0] + fb.position[1]);
}

GraspState grasp_monitor(const GripperFeedback& fb, const GraspMonitorConfig& cfg) {
  const double force = 0.5 * (fb.force[0] + fb.force[1]);
  const double gap = finger_gap(fb, cfg);
  return force >= cfg.force_min && gap >= cfg.gap_min && gap <= cfg.gap_max ? GraspState::Grasped
                                                                             : GraspState::Empty;
}

}  // namespace mobman
