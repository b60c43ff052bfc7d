#include "mobman/recognition.hpp"

#include "mobman/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace mobman {

namespace {

constexpr double kNeutralScore = 0.5;

Point3 sign_fixed(Point3 v) {
  if (v.x() < 0.0 || (v.x() == 0.0 && (v.y() < 0.0 || (v.y() == 0.0 && v.z() < 0.0)))) v = -v;
  return v;
}

}  // namespace

void ObjectScores::validate() const {
  if (scores.empty()) fail(ErrorCode::InvalidArgument, "object scores need at least one label");
  for (const auto& [label, s] : scores)
    if (!std::isfinite(s) || s < 0.0 || s > 1.0)
      fail(ErrorCode::InvalidArgument, "score for '" + label + "' outside [0,1]");
}

PcaResult pca_pose(const PointCloud& cloud, const Cluster& cluster) {
  if (cluster.indices.size() < 3)
    fail(ErrorCode::DegenerateCluster, "PCA needs at least 3 points");
  const Point3 c = centroid_of(cloud, cluster.indices);
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (std::size_t i : cluster.indices) {
    const Point3 d = cloud.points[i] - c;
    cov += d * d.transpose();
  }
  cov /= static_cast<double>(cluster.indices.size());

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
  // eigen returns ascending eigenvalues
  const Eigen::Vector3d ev = es.eigenvalues().reverse().cwiseMax(0.0);
  if (!(ev[0] > 0.0) || ev[1] <= 1e-12 * ev[0])
    fail(ErrorCode::DegenerateCluster, "cluster covariance has rank < 2");

  const Point3 major = sign_fixed(es.eigenvectors().col(2).normalized());
  Point3 middle = es.eigenvectors().col(1);
  middle = sign_fixed((middle - middle.dot(major) * major).normalized());
  Eigen::Matrix3d r;
  r.col(0) = major;
  r.col(1) = middle;
  r.col(2) = major.cross(middle).normalized();

  PcaResult out;
  out.pose.position = c;
  out.pose.orientation = Eigen::Quaterniond(r).normalized();
  out.extents = ev.cwiseSqrt();
  return out;
}

FusionResult fuse(const ObjectScores& scores3d, const ObjectScores& scores2d,
                  const Inventory& inventory) {
  scores3d.validate();
  scores2d.validate();
  if (inventory.empty()) fail(ErrorCode::InvalidArgument, "inventory is empty");

  double total = 0.0;
  FusionResult best;
  double best_score = -1.0;
  // std::set iterates labels in lexicographic order, so strict '>' keeps the
  // smallest label on ties
  for (const auto& label : inventory) {
    auto a = scores3d.scores.find(label);
    auto b = scores2d.scores.find(label);
    double fused = 0.0;
    if (a != scores3d.scores.end() || b != scores2d.scores.end()) {
      const double s3 = a != scores3d.scores.end() ? a->second : kNeutralScore;
      const double s2 = b != scores2d.scores.end() ? b->second : kNeutralScore;
      fused = s3 * s2;
    }
    total += fused;
    if (fused > best_score) {
      best_score = fused;
      best.label = label;
    }
  }
  if (!(total > 0.0)) fail(ErrorCode::NoAdmissibleLabel, "no inventory label has a positive score");
  best.confidence = best_score / total;
  return best;
}

}  // namespace mobman
