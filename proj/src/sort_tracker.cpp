#include "mobman/error.hpp"
#include "mobman/tracking.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace mobman {

namespace {

using Meas = Eigen::Matrix<double, 4, 1>;
using MeasMatrix = Eigen::Matrix<double, 4, 7>;

Meas to_measurement(const Box2D& b) { return Meas(b.cx, b.cy, b.w * b.h, b.w / b.h); }

MeasMatrix measurement_matrix() {
  MeasMatrix h = MeasMatrix::Zero();
  h.leftCols<4>().setIdentity();
  return h;
}

}  // namespace

double iou(const Box2D& a, const Box2D& b) {
  const double ix = std::min(a.cx + a.w / 2, b.cx + b.w / 2) - std::max(a.cx - a.w / 2, b.cx - b.w / 2);
  const double iy = std::min(a.cy + a.h / 2, b.cy + b.h / 2) - std::max(a.cy - a.h / 2, b.cy - b.h / 2);
  if (ix <= 0.0 || iy <= 0.0) return 0.0;
  const double inter = ix * iy;
  const double uni = a.w * a.h + b.w * b.h - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

Box2D Track2D::box() const {
  const double s = std::max(state[2], 1e-9);
  const double r = std::max(state[3], 1e-9);
  Box2D b;
  b.cx = state[0];
  b.cy = state[1];
  b.w = std::sqrt(s * r);
  b.h = s / b.w;
  return b;
}

SortTracker::SortTracker(SortConfig cfg) : cfg_(cfg) {
  if (!(cfg_.dt > 0.0) || cfg_.max_age < 0 || cfg_.min_hits < 1 || cfg_.iou_min < 0.0 ||
      cfg_.iou_min > 1.0)
    fail(ErrorCode::InvalidArgument, "invalid SORT configuration");
}

Track2D SortTracker::spawn(int id, const Box2D& z, const SortConfig& cfg) {
  if (!(z.w > 0.0) || !(z.h > 0.0)) fail(ErrorCode::InvalidArgument, "detection box must have w, h > 0");
  Track2D t;
  t.id = id;
  t.state.head<4>() = to_measurement(z);
  t.covariance.setZero();
  t.covariance.diagonal() << cfg.p0_pos, cfg.p0_pos, cfg.p0_pos, cfg.p0_pos, cfg.p0_vel, cfg.p0_vel,
      cfg.p0_vel;
  t.hits = 1;
  t.age_since_update = 0;
  return t;
}

void SortTracker::predict(Track2D& t, const SortConfig& cfg) {
  if (t.state[2] + t.state[6] * cfg.dt <= 0.0) t.state[6] = 0.0;
  KalmanCov f = KalmanCov::Identity();
  f(0, 4) = f(1, 5) = f(2, 6) = cfg.dt;
  KalmanCov q = KalmanCov::Zero();
  q.diagonal() << cfg.q_pos, cfg.q_pos, cfg.q_pos, cfg.q_pos, cfg.q_vel, cfg.q_vel, cfg.q_vel;
  t.state = f * t.state;
  t.covariance = f * t.covariance * f.transpose() + q;
  t.covariance = 0.5 * (t.covariance + t.covariance.transpose()).eval();
  ++t.age_since_update;
}

void SortTracker::update(Track2D& t, const Box2D& z, const SortConfig& cfg) {
  const MeasMatrix h = measurement_matrix();
  const Eigen::Matrix4d r = cfg.r_meas * Eigen::Matrix4d::Identity();
  const Meas y = to_measurement(z) - h * t.state;
  const Eigen::Matrix4d s = h * t.covariance * h.transpose() + r;
  const Eigen::Matrix<double, 7, 4> k = t.covariance * h.transpose() * s.inverse();
  t.state += k * y;
  const KalmanCov ikh = KalmanCov::Identity() - k * h;
  // Joseph form keeps the covariance symmetric positive definite
  t.covariance = ikh * t.covariance * ikh.transpose() + k * r * k.transpose();
  t.covariance = 0.5 * (t.covariance + t.covariance.transpose()).eval();
  t.last_innovation = y.norm();
  ++t.hits;
  t.age_since_update = 0;
}

SortStepResult SortTracker::step(const std::vector<Detection2D>& detections) {
  for (auto& t : tracks_) predict(t, cfg_);

  const auto nt = static_cast<Eigen::Index>(tracks_.size());
  const auto nd = static_cast<Eigen::Index>(detections.size());
  Eigen::MatrixXd cost(nt, nd);
  Eigen::MatrixXd overlap(nt, nd);
  for (Eigen::Index i = 0; i < nt; ++i) {
    const Box2D pb = tracks_[static_cast<std::size_t>(i)].box();
    for (Eigen::Index j = 0; j < nd; ++j) {
      const double o = iou(pb, detections[static_cast<std::size_t>(j)].box);
      overlap(i, j) = o;
      // pairs below the gate are filtered after assignment; the extra unit
      // keeps them behind every admissible pairing
      cost(i, j) = o >= cfg_.iou_min ? 1.0 - o : 2.0;
    }
  }
  const std::vector<int> assignment = hungarian(cost);

  SortStepResult result;
  result.detection_track.assign(detections.size(), -1);
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    const int j = assignment[i];
    if (j < 0 || overlap(static_cast<Eigen::Index>(i), j) < cfg_.iou_min) continue;
    update(tracks_[i], detections[static_cast<std::size_t>(j)].box, cfg_);
    result.detection_track[static_cast<std::size_t>(j)] = tracks_[i].id;
  }

  std::vector<Track2D> kept;
  kept.reserve(tracks_.size() + detections.size());
  for (auto& t : tracks_) {
    if (t.age_since_update > cfg_.max_age)
      result.removed_ids.push_back(t.id);
    else
      kept.push_back(std::move(t));
  }
  tracks_ = std::move(kept);

  for (std::size_t j = 0; j < detections.size(); ++j) {
    if (result.detection_track[j] >= 0) continue;
    const int id = next_id_++;
    tracks_.push_back(spawn(id, detections[j].box, cfg_));
    result.detection_track[j] = id;
    result.new_ids.push_back(id);
  }
  return result;
}

}  // namespace mobman
