#include "mobman/recognition.hpp"
#include "support.hpp"

#include <cmath>

using namespace mobman;
using testing::urand;

namespace {

Cluster all_of(const PointCloud& c) {
  Cluster cl;
  for (std::size_t i = 0; i < c.size(); ++i) cl.indices.push_back(i);
  cl.centroid = centroid_of(c, cl.indices);
  return cl;
}

PointCloud jittered_segment(std::mt19937_64& rng, double yaw) {
  PointCloud c;
  const Eigen::Matrix3d r = Eigen::AngleAxisd(yaw, Point3::UnitZ()).toRotationMatrix();
  for (int i = 0; i < 200; ++i)
    c.points.push_back(r * Point3(urand(rng, -0.05, 0.05), urand(rng, -0.002, 0.002), urand(rng, -0.001, 0.001)));
  return c;
}

ObjectScores scores(std::map<std::string, double> m, ScoreSource src = ScoreSource::ThreeD) {
  ObjectScores s;
  s.scores = std::move(m);
  s.source = src;
  return s;
}

}  // namespace

TEST_CASE("pca_pose: segment along x") {
  std::mt19937_64 rng(1);
  const PointCloud c = jittered_segment(rng, 0.0);
  const PcaResult r = pca_pose(c, all_of(c));
  const Point3 major = r.pose.orientation.toRotationMatrix().col(0);
  CHECK(rad2deg(std::acos(major.dot(Point3::UnitX()))) < 1.0);
  CHECK((r.pose.position - centroid_of(c, all_of(c).indices)).norm() < 1e-15);
}

TEST_CASE("pca_pose: rotated input rotates the axis") {
  std::mt19937_64 rng(1);
  const PointCloud c = jittered_segment(rng, kPi / 4);
  const Point3 major = pca_pose(c, all_of(c)).pose.orientation.toRotationMatrix().col(0);
  CHECK(std::abs(rad2deg(std::atan2(major.y(), major.x())) - 45.0) < 1.0);
}

TEST_CASE("pca_pose: degenerate clusters") {
  PointCloud two;
  two.points = {{0, 0, 0}, {1, 0, 0}};
  CHECK_ERROR(pca_pose(two, all_of(two)), ErrorCode::DegenerateCluster);
  PointCloud line;
  for (int i = 0; i < 10; ++i) line.points.emplace_back(0.1 * i, 0.2 * i, 0);
  CHECK_ERROR(pca_pose(line, all_of(line)), ErrorCode::DegenerateCluster);
}

TEST_CASE("pca_pose: orthonormal right-handed frame, equivariant under rotation") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    PointCloud c;
    const Point3 half(urand(rng, 0.04, 0.1), urand(rng, 0.01, 0.03), urand(rng, 0.002, 0.008));
    for (int i = 0; i < 300; ++i)
      c.points.emplace_back(urand(rng, -half.x(), half.x()), urand(rng, -half.y(), half.y()), urand(rng, -half.z(), half.z()));
    const PcaResult a = pca_pose(c, all_of(c));
    const Eigen::Matrix3d ra = a.pose.orientation.toRotationMatrix();
    CHECK((ra * ra.transpose() - Eigen::Matrix3d::Identity()).norm() < 1e-9);
    CHECK(ra.determinant() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(a.extents[0] >= a.extents[1]);
    CHECK(a.extents[1] >= a.extents[2]);
    CHECK(a.extents[2] >= 0.0);

    const Eigen::Quaterniond q = Eigen::Quaterniond::UnitRandom();
    const Eigen::Matrix3d rot = q.toRotationMatrix();
    PointCloud rc = c;
    for (auto& p : rc.points) p = rot * p + Point3(0.3, -0.2, 0.1);
    const PcaResult b = pca_pose(rc, all_of(rc));
    const Point3 expect = rot * ra.col(0);
    const Point3 got = b.pose.orientation.toRotationMatrix().col(0);
    CHECK(std::abs(std::abs(expect.dot(got)) - 1.0) < 1e-9);
    CHECK((b.extents - a.extents).norm() < 1e-9);
  }
}

TEST_CASE("fuse: product rule with normalized confidence") {
  const FusionResult r = fuse(scores({{"A", 0.8}, {"B", 0.2}}), scores({{"A", 0.9}, {"B", 0.3}}, ScoreSource::TwoD), {"A", "B"});
  CHECK(r.label == "A");
  CHECK(r.confidence == doctest::Approx(0.72 / 0.78).epsilon(1e-12));
}

TEST_CASE("fuse: masking, ties and neutral scores") {
  CHECK_ERROR(fuse(scores({{"A", 0.9}}), scores({{"A", 0.9}}), {"B"}), ErrorCode::NoAdmissibleLabel);
  CHECK(fuse(scores({{"A", 0.5}, {"B", 0.5}}), scores({{"A", 0.5}, {"B", 0.5}}), {"A", "B"}).label == "A");
  // B only scored by the 2D source: 0.5 * 0.9 beats 0.4 * 0.4
  const FusionResult r = fuse(scores({{"A", 0.4}}), scores({{"A", 0.4}, {"B", 0.9}}), {"A", "B"});
  CHECK(r.label == "B");
  CHECK(r.confidence == doctest::Approx(0.45 / (0.45 + 0.16)));
  CHECK_ERROR(fuse(scores({{"A", 1.5}}), scores({{"A", 0.5}}), {"A"}), ErrorCode::InvalidArgument);
  CHECK_ERROR(fuse(scores({}), scores({{"A", 0.5}}), {"A"}), ErrorCode::InvalidArgument);
  CHECK_ERROR(fuse(scores({{"A", 0.5}}), scores({{"A", 0.5}}), {}), ErrorCode::InvalidArgument);
}

TEST_CASE("fuse: argmax stays inside the inventory and ignores source scaling") {
  std::mt19937_64 rng(4);
  const std::vector<std::string> labels{"axis", "bearing", "bolt", "motor", "nut", "screw"};
  for (int trial = 0; trial < 200; ++trial) {
    std::map<std::string, double> s3, s2;
    for (const auto& l : labels) {
      s3[l] = urand(rng, 0.01, 1.0);
      s2[l] = urand(rng, 0.01, 1.0);
    }
    Inventory inv;
    for (const auto& l : labels)
      if (urand(rng, 0, 1) < 0.5) inv.insert(l);
    if (inv.empty()) inv.insert("nut");
    const FusionResult base = fuse(scores(s3), scores(s2), inv);
    CHECK(inv.count(base.label) == 1);
    const double k = urand(rng, 0.05, 1.0);
    for (auto& [l, v] : s2) v *= k;
    CHECK(fuse(scores(s3), scores(s2), inv).label == base.label);
  }
}
