#pragma once

#include "mobman/geometry.hpp"

#include <Eigen/Core>

#include <optional>
#include <vector>

namespace mobman {

// ---------------------------------------------------------------------------
// 2D tracking-by-detection

struct Box2D {
  double cx = 0, cy = 0, w = 0, h = 0;  // pixels
};

struct Detection2D {
  Box2D box;
  double score = 1.0;
  double t = 0.0;
  int gt_id = -1;  // simulator ground truth, -1 when unknown
};

double iou(const Box2D& a, const Box2D& b);

// Minimum-cost assignment on a rectangular cost matrix. result[row] is the
// assigned column or -1. Among optimal assignments the one whose column
// sequence (rows in order) is lexicographically smallest is returned.
std::vector<int> hungarian(const Eigen::MatrixXd& cost);

double assignment_cost(const Eigen::MatrixXd& cost, const std::vector<int>& assignment);

using KalmanState = Eigen::Matrix<double, 7, 1>;
using KalmanCov = Eigen::Matrix<double, 7, 7>;

// State [u, v, s, r, du, dv, ds]: center, area, aspect ratio and rates.
struct Track2D {
  int id = 0;
  KalmanState state = KalmanState::Zero();
  KalmanCov covariance = KalmanCov::Identity();
  int hits = 0;
  int age_since_update = 0;
  double last_innovation = 0.0;

  Box2D box() const;
};

struct SortConfig {
  double iou_min = 0.3;
  int max_age = 3;
  int min_hits = 3;
  double dt = 1.0 / 15.0;
  double q_pos = 1.0;     // px^2
  double q_vel = 10.0;    // px^2/s^2
  double r_meas = 1.0;    // px^2
  double p0_pos = 10.0;
  double p0_vel = 1000.0;
};

struct SortStepResult {
  std::vector<int> new_ids;
  std::vector<int> removed_ids;
  // detection index -> track id (matched or spawned)
  std::vector<int> detection_track;
};

class SortTracker {
public:
  explicit SortTracker(SortConfig cfg = {});

  SortStepResult step(const std::vector<Detection2D>& detections);

  const std::vector<Track2D>& tracks() const { return tracks_; }
  const SortConfig& config() const { return cfg_; }
  bool confirmed(const Track2D& t) const { return t.hits >= cfg_.min_hits; }

  // Kalman primitives, exposed for property tests.
  static void predict(Track2D& t, const SortConfig& cfg);
  static void update(Track2D& t, const Box2D& z, const SortConfig& cfg);
  static Track2D spawn(int id, const Box2D& z, const SortConfig& cfg);

private:
  SortConfig cfg_;
  std::vector<Track2D> tracks_;
  int next_id_ = 0;
};

// ---------------------------------------------------------------------------
// 3D nearest-neighbour tracking

struct TimedPoint {
  double t = 0.0;
  Point3 p = Point3::Zero();
};

struct Track3D {
  int id = 0;
  std::vector<TimedPoint> history;
};

struct NnAssociation {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (track, point)
  std::vector<std::size_t> unmatched_tracks;
  std::vector<std::size_t> unmatched_points;
};

// Greedy globally-nearest matching under a distance gate. Matched points are
// appended to their track's history.
NnAssociation associate_nn_3d(std::vector<Track3D>& tracks, const std::vector<TimedPoint>& points,
                              double gate);

class NnTracker3D {
public:
  explicit NnTracker3D(double gate) : gate_(gate) {}

  /// Associates a frame and spawns tracks for unmatched points. Returns the
  /// track id for each input point.
  std::vector<int> step(const std::vector<TimedPoint>& points);

  const std::vector<Track3D>& tracks() const { return tracks_; }

private:
  double gate_;
  std::vector<Track3D> tracks_;
  int next_id_ = 0;
};

// ---------------------------------------------------------------------------
// Rotating-table motion model

struct Circle {
  Vec2 center = Vec2::Zero();
  double radius = 0.0;
};

struct CircularMotion {
  Vec2 center = Vec2::Zero();
  double radius = 0.0;
  double omega = 0.0;   // rad/s, positive counter-clockwise
  double phase0 = 0.0;  // angle at t_ref, in (-pi, pi]
  double t_ref = 0.0;

  double angle_at(double t) const { return phase0 + omega * (t - t_ref); }
  Vec2 position_at(double t) const {
    const double a = angle_at(t);
    return center + radius * Vec2(std::cos(a), std::sin(a));
  }
};

/// Algebraic (Kasa) least-squares circle fit.
Circle fit_circle(const std::vector<Vec2>& points);

CircularMotion estimate_motion(const Track3D& track, std::optional<Vec2> center_hint = {});

double predict_arrival(const CircularMotion& motion, double target_angle, double t_now,
                       double lead, double omega_min = 1e-3);

// ---------------------------------------------------------------------------
// Background change detection

struct Grid2D {
  int rows = 0, cols = 0;
  std::vector<double> values;  // row-major

  double at(int r, int c) const { return values[static_cast<std::size_t>(r) * cols + c]; }
};

struct Roi {
  int row = 0, col = 0, rows = 0, cols = 0;
};

bool change_trigger(const Grid2D& reference, const Grid2D& current, const Roi& roi, double delta,
                    double frac);

}  // namespace mobman
