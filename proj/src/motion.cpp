#include "mobman/error.hpp"
#include "mobman/tracking.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <tuple>

namespace mobman {

NnAssociation associate_nn_3d(std::vector<Track3D>& tracks, const std::vector<TimedPoint>& points,
                              double gate) {
  if (!(gate > 0.0)) fail(ErrorCode::InvalidArgument, "association gate must be positive");
  std::vector<std::tuple<double, std::size_t, std::size_t>> candidates;
  for (std::size_t i = 0; i < tracks.size(); ++i) {
    if (tracks[i].history.empty()) continue;
    const Point3& last = tracks[i].history.back().p;
    for (std::size_t j = 0; j < points.size(); ++j) {
      const double d = (points[j].p - last).norm();
      if (d <= gate) candidates.emplace_back(d, i, j);
    }
  }
  std::sort(candidates.begin(), candidates.end());

  NnAssociation out;
  std::vector<char> track_used(tracks.size(), 0), point_used(points.size(), 0);
  for (const auto& [d, i, j] : candidates) {
    if (track_used[i] || point_used[j]) continue;
    if (points[j].t <= tracks[i].history.back().t)
      fail(ErrorCode::NonMonotonicTimestamp,
           "point time is not after the last sample of track " + std::to_string(tracks[i].id));
    track_used[i] = point_used[j] = 1;
    out.pairs.emplace_back(i, j);
  }
  for (const auto& [i, j] : out.pairs) tracks[i].history.push_back(points[j]);
  for (std::size_t i = 0; i < tracks.size(); ++i)
    if (!track_used[i]) out.unmatched_tracks.push_back(i);
  for (std::size_t j = 0; j < points.size(); ++j)
    if (!point_used[j]) out.unmatched_points.push_back(j);
  return out;
}

std::vector<int> NnTracker3D::step(const std::vector<TimedPoint>& points) {
  std::vector<int> ids(points.size(), -1);
  const NnAssociation a = associate_nn_3d(tracks_, points, gate_);
  for (const auto& [i, j] : a.pairs) ids[j] = tracks_[i].id;
  for (std::size_t j : a.unmatched_points) {
    Track3D t;
    t.id = next_id_++;
    t.history.push_back(points[j]);
    ids[j] = t.id;
    tracks_.push_back(std::move(t));
  }
  return ids;
}

Circle fit_circle(const std::vector<Vec2>& points) {
  if (points.size() < 3) fail(ErrorCode::CollinearPoints, "circle fit needs at least 3 points");
  Vec2 mean = Vec2::Zero();
  for (const auto& p : points) mean += p;
  mean /= static_cast<double>(points.size());

  // x^2 + y^2 = 2 a x + 2 b y + c in mean-centred coordinates
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd a(n, 3);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vec2 d = points[static_cast<std::size_t>(i)] - mean;
    a(i, 0) = 2.0 * d.x();
    a(i, 1) = 2.0 * d.y();
    a(i, 2) = 1.0;
    rhs(i) = d.squaredNorm();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (!(sv(2) > 1e-10 * sv(0))) fail(ErrorCode::CollinearPoints, "points are collinear");
  const Eigen::Vector3d sol = svd.solve(rhs);

  Circle c;
  c.center = mean + Vec2(sol(0), sol(1));
  const double r2 = sol(2) + sol(0) * sol(0) + sol(1) * sol(1);
  if (!(r2 > 0.0)) fail(ErrorCode::CollinearPoints, "degenerate circle fit");
  c.radius = std::sqrt(r2);
  return c;
}

CircularMotion estimate_motion(const Track3D& track, std::optional<Vec2> center_hint) {
  const auto& h = track.history;
  if (h.size() < 3) fail(ErrorCode::TooFewPoints, "motion estimate needs at least 3 samples");
  for (std::size_t i = 1; i < h.size(); ++i)
    if (!(h[i].t > h[i - 1].t))
      fail(ErrorCode::NonMonotonicTimestamp, "track timestamps must increase");
  if (!(h.back().t - h.front().t > 0.0)) fail(ErrorCode::ZeroTimeSpan, "track spans zero time");

  std::vector<Vec2> xy;
  xy.reserve(h.size());
  for (const auto& s : h) xy.emplace_back(s.p.x(), s.p.y());

  CircularMotion m;
  if (center_hint) {
    m.center = *center_hint;
    double r = 0.0;
    for (const auto& p : xy) r += (p - m.center).norm();
    m.radius = r / static_cast<double>(xy.size());
    if (!(m.radius > 0.0)) fail(ErrorCode::CollinearPoints, "samples coincide with the center");
  } else {
    const Circle c = fit_circle(xy);
    m.center = c.center;
    m.radius = c.radius;
  }

  std::vector<double> theta(xy.size());
  for (std::size_t i = 0; i < xy.size(); ++i) {
    const Vec2 d = xy[i] - m.center;
    const double raw = std::atan2(d.y(), d.x());
    theta[i] = i == 0 ? raw : theta[i - 1] + wrap_angle(raw - theta[i - 1]);
  }

  double tm = 0.0, am = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    tm += h[i].t;
    am += theta[i];
  }
  tm /= static_cast<double>(h.size());
  am /= static_cast<double>(h.size());
  double stt = 0.0, sta = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    stt += (h[i].t - tm) * (h[i].t - tm);
    sta += (h[i].t - tm) * (theta[i] - am);
  }
  m.omega = sta / stt;
  m.t_ref = h.back().t;
  m.phase0 = wrap_angle(am + m.omega * (m.t_ref - tm));
  return m;
}

double predict_arrival(const CircularMotion& motion, double target_angle, double t_now, double lead,
                       double omega_min) {
  if (std::abs(motion.omega) <= omega_min)
    fail(ErrorCode::TableStationary, "table angular rate below the stationary threshold");
  if (lead < 0.0) fail(ErrorCode::InvalidArgument, "lead must be non-negative");
  const double t0 = t_now + lead;
  const double a0 = motion.angle_at(t0);
  const double remaining = motion.omega > 0.0 ? wrap_positive(target_angle - a0)
                                              : wrap_positive(a0 - target_angle);
  return t0 + remaining / std::abs(motion.omega);
}

bool change_trigger(const Grid2D& reference, const Grid2D& current, const Roi& roi, double delta,
                    double frac) {
  auto check = [](const Grid2D& g) {
    if (g.rows < 0 || g.cols < 0 ||
        g.values.size() != static_cast<std::size_t>(g.rows) * static_cast<std::size_t>(g.cols))
      fail(ErrorCode::DimensionMismatch, "grid size does not match its dimensions");
  };
  check(reference);
  check(current);
  if (reference.rows != current.rows || reference.cols != current.cols)
    fail(ErrorCode::DimensionMismatch, "reference and current grids differ in size");
  if (roi.row < 0 || roi.col < 0 || roi.rows < 1 || roi.cols < 1 ||
      roi.row + roi.rows > reference.rows || roi.col + roi.cols > reference.cols)
    fail(ErrorCode::RoiOutOfBounds, "region of interest exceeds the grid");

  std::size_t changed = 0;
  for (int r = roi.row; r < roi.row + roi.rows; ++r)
    for (int c = roi.col; c < roi.col + roi.cols; ++c)
      if (std::abs(current.at(r, c) - reference.at(r, c)) > delta) ++changed;
  const double total = static_cast<double>(roi.rows) * static_cast<double>(roi.cols);
  return static_cast<double>(changed) / total > frac;
}

}  // namespace mobman
