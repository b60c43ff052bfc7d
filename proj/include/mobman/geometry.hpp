#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>
#include <numbers>

namespace mobman {

using Point3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;

struct Pose {
  Point3 position = Point3::Zero();
  Eigen::Quaterniond orientation = Eigen::Quaterniond::Identity();

  Eigen::Isometry3d isometry() const {
    Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
    t.linear() = orientation.toRotationMatrix();
    t.translation() = position;
    return t;
  }

  static Pose from_isometry(const Eigen::Isometry3d& t) {
    Pose p;
    p.position = t.translation();
    p.orientation = Eigen::Quaterniond(t.linear()).normalized();
    return p;
  }
};

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
  double r = std::fmod(a + kPi, kTwoPi);
  if (r <= 0.0) r += kTwoPi;
  return r - kPi;
}

/// Wraps an angle into [0, 2pi).
inline double wrap_positive(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r -= kTwoPi;
  return r;
}

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

/// Angle between two lines (direction sign ignored), in [0, pi/2].
inline double line_angle(const Point3& a, const Point3& b) {
  double c = std::abs(a.normalized().dot(b.normalized()));
  return std::acos(std::min(1.0, c));
}

}  // namespace mobman
