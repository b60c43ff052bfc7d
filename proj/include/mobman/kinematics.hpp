#pragma once

#include "mobman/geometry.hpp"

#include <array>
#include <string>
#include <vector>

namespace mobman {

inline constexpr std::size_t kArmDof = 5;

using JointVector = Eigen::Matrix<double, kArmDof, 1>;
using PoseJacobian = Eigen::Matrix<double, 6, kArmDof>;

// Standard Denavit-Hartenberg row: Rz(theta + theta_offset) Tz(d) Tx(a) Rx(alpha).
struct DhJoint {
  double a = 0, alpha = 0, d = 0, theta_offset = 0;
  double lo = -kPi, hi = kPi;
};

struct KinematicChain {
  std::array<DhJoint, kArmDof> joints{};
  Pose base;

  void validate() const;
  bool within_limits(const JointVector& q, double tol = 0.0) const;
  JointVector clamp(const JointVector& q) const;
  JointVector lower() const;
  JointVector upper() const;
};

/// Parses a JSON array of {a, alpha, d, theta_offset, lo, hi} objects.
KinematicChain chain_from_json(const std::string& text);
std::string chain_to_json(const KinematicChain& chain);

Eigen::Isometry3d fk_transform(const KinematicChain& chain, const JointVector& q);
Pose fk(const KinematicChain& chain, const JointVector& q);

struct IkParams {
  double tol_pos = 5e-4;                  // m
  double tol_ang = deg2rad(0.25);         // rad, on the weighted axes
  int max_iters = 200;
  double lambda = 0.05;
  Eigen::Vector3d orientation_weights{1.0, 1.0, 0.2};  // end-effector frame
  double fd_step = 1e-6;
};

struct IkResult {
  JointVector q = JointVector::Zero();
  bool success = false;
  int iterations = 0;
  double pos_error = 0.0;
  double ang_error = 0.0;  // weighted orientation error norm
};

/// Position error (world) stacked over the weighted end-effector-frame
/// rotation vector taking the current orientation to the target.
Eigen::Matrix<double, 6, 1> pose_error(const Eigen::Isometry3d& current, const Pose& target,
                                       const Eigen::Vector3d& weights);

/// Central-difference Jacobian of [position; end-effector-frame rotation].
PoseJacobian numeric_jacobian(const KinematicChain& chain, const JointVector& q, double step);

/// Damped least squares. Never throws on non-convergence; inspect success.
IkResult ik_dls(const KinematicChain& chain, const Pose& target, const JointVector& q0,
                const IkParams& params = {});

/// The 5-DoF example arm shipped with the repository.
KinematicChain example_chain();

}  // namespace mobman
