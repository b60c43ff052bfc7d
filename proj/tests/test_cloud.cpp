#include "mobman/cloud.hpp"
#include "mobman/kdtree.hpp"
#include "support.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

using namespace mobman;
using testing::urand;

namespace {

PointCloud random_cloud(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
  PointCloud c;
  for (std::size_t i = 0; i < n; ++i) c.points.emplace_back(urand(rng, lo, hi), urand(rng, lo, hi), urand(rng, lo, hi));
  return c;
}

PointCloud grid_plane(int n, double spacing, double z) {
  PointCloud c;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) c.points.emplace_back(i * spacing, j * spacing, z);
  return c;
}

// every normal points straight up; enough for plane tests that do not
// exercise normal estimation
PointCloud with_up_normals(PointCloud c) {
  c.normals.assign(c.size(), Point3::UnitZ());
  return c;
}

Plane flat_plane(const PointCloud& c) {
  Plane p;
  p.inliers.resize(c.size());
  std::iota(p.inliers.begin(), p.inliers.end(), 0);
  return p;
}

// union-find over all pairs, the slow way
std::vector<std::vector<std::size_t>> union_find_clusters(const PointCloud& c, const std::vector<std::size_t>& subset,
                                                          double tol, std::size_t lo, std::size_t hi) {
  std::vector<std::size_t> parent(subset.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < subset.size(); ++i)
    for (std::size_t j = i + 1; j < subset.size(); ++j)
      if ((c.points[subset[i]] - c.points[subset[j]]).norm() <= tol) parent[find(i)] = find(j);
  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < subset.size(); ++i) groups[find(i)].push_back(subset[i]);
  std::vector<std::vector<std::size_t>> out;
  for (auto& [root, g] : groups) {
    if (g.size() < lo || g.size() > hi) continue;
    std::sort(g.begin(), g.end());
    out.push_back(g);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("voxel_downsample: empty cloud stays empty") {
  CHECK(voxel_downsample(PointCloud{}, 0.01).empty());
}

TEST_CASE("voxel_downsample: cube corners collapse to one centroid") {
  PointCloud c;
  for (int i = 0; i < 8; ++i) c.points.emplace_back(0.01 * (i & 1), 0.01 * ((i >> 1) & 1), 0.01 * ((i >> 2) & 1));
  const PointCloud out = voxel_downsample(c, 0.1);
  REQUIRE(out.size() == 1);
  CHECK((out.points[0] - Point3(0.005, 0.005, 0.005)).norm() < 1e-15);
}

TEST_CASE("voxel_downsample: matches hash binning oracle") {
  std::mt19937_64 rng(7);
  const PointCloud c = random_cloud(rng, 1000, 0.0, 1.0);
  const double leaf = 0.25;
  std::map<std::array<long, 3>, std::pair<Point3, int>> bins;
  for (const auto& p : c.points) {
    auto& b = bins[{static_cast<long>(std::floor(p.x() / leaf)), static_cast<long>(std::floor(p.y() / leaf)),
                    static_cast<long>(std::floor(p.z() / leaf))}];
    if (b.second == 0) b.first = Point3::Zero();
    b.first += p;
    ++b.second;
  }
  const PointCloud out = voxel_downsample(c, leaf);
  REQUIRE(out.size() == bins.size());
  std::vector<Point3> expect;
  for (auto& [k, b] : bins) expect.push_back(b.first / b.second);
  auto lex = [](const Point3& a, const Point3& b) {
    return std::lexicographical_compare(a.data(), a.data() + 3, b.data(), b.data() + 3);
  };
  std::vector<Point3> got = out.points;
  std::sort(expect.begin(), expect.end(), lex);
  std::sort(got.begin(), got.end(), lex);
  for (std::size_t i = 0; i < got.size(); ++i) CHECK((got[i] - expect[i]).norm() < 1e-12);
}

TEST_CASE("voxel_downsample: outputs stay inside their voxel, never grow") {
  std::mt19937_64 rng(11);
  for (double leaf : {0.003, 0.05, 0.3}) {
    const PointCloud c = random_cloud(rng, 500, -1.0, 1.0);
    const PointCloud out = voxel_downsample(c, leaf);
    CHECK(out.size() <= c.size());
    CHECK(out.normals.empty());
    for (const auto& p : out.points) {
      // the voxel owning p contains at least one input point
      const Eigen::Array3d cell = (p.array() / leaf).floor();
      const bool owned = std::any_of(c.points.begin(), c.points.end(),
                                     [&](const Point3& q) { return ((q.array() / leaf).floor() == cell).all(); });
      CHECK(owned);
    }
  }
  CHECK_ERROR(voxel_downsample(PointCloud{}, 0.0), ErrorCode::NonPositiveLeaf);
  CHECK_ERROR(voxel_downsample(PointCloud{}, -1.0), ErrorCode::NonPositiveLeaf);
}

TEST_CASE("passthrough: closed interval, order and normals kept") {
  PointCloud c;
  for (double z : {0.1, 0.5, 0.9, 0.2}) c.points.emplace_back(0, 0, z);
  c.normals = {Point3::UnitX(), Point3::UnitY(), Point3::UnitZ(), -Point3::UnitX()};
  const PointCloud out = passthrough(c, Axis::Z, 0.2, 0.8);
  REQUIRE(out.size() == 2);
  CHECK(out.points[0].z() == 0.5);
  CHECK(out.points[1].z() == 0.2);  // exactly at lo
  CHECK(out.normals[0] == Point3::UnitY());
  CHECK(out.normals[1] == -Point3::UnitX());
  CHECK_ERROR(passthrough(c, Axis::X, 1.0, 0.0), ErrorCode::InvertedRange);
}

TEST_CASE("passthrough: linear scan oracle and idempotence") {
  std::mt19937_64 rng(3);
  const PointCloud c = random_cloud(rng, 400, -1.0, 1.0);
  for (Axis ax : {Axis::X, Axis::Y, Axis::Z}) {
    const PointCloud once = passthrough(c, ax, -0.3, 0.4);
    std::vector<Point3> expect;
    for (const auto& p : c.points)
      if (p[static_cast<int>(ax)] >= -0.3 && p[static_cast<int>(ax)] <= 0.4) expect.push_back(p);
    CHECK(once.points == expect);
    CHECK(passthrough(once, ax, -0.3, 0.4).points == once.points);
  }
}

TEST_CASE("estimate_normals: plane grid faces the origin") {
  const PointCloud out = estimate_normals(grid_plane(10, 0.01, 0.5), 8);
  for (const auto& n : out.normals) CHECK((n - Point3(0, 0, -1)).norm() < 1e-9);
}

TEST_CASE("estimate_normals: sphere normals are radial") {
  // evenly spread (Fibonacci) samples
  PointCloud c;
  const Point3 center(0, 0, 3);
  const int n = 2000;
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / n;
    const double r = std::sqrt(1.0 - z * z);
    c.points.push_back(center + Point3(r * std::cos(golden * i), r * std::sin(golden * i), z));
  }
  const PointCloud out = estimate_normals(c, 10);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Point3 radial = (c.points[i] - center).normalized();
    CHECK(rad2deg(line_angle(out.normals[i], radial)) < 5.0);
    CHECK(std::abs(out.normals[i].norm() - 1.0) < 1e-12);
    CHECK(out.normals[i].dot(-c.points[i]) >= 0.0);
  }
}

TEST_CASE("estimate_normals: degenerate input") {
  PointCloud same;
  same.points.assign(3, Point3(1, 2, 3));
  CHECK_ERROR(estimate_normals(same, 3), ErrorCode::DegenerateNeighborhood);
  CHECK_ERROR(estimate_normals(grid_plane(2, 0.1, 0.0), 5), ErrorCode::TooFewPoints);
  CHECK_ERROR(estimate_normals(grid_plane(3, 0.1, 0.0), 2), ErrorCode::TooFewPoints);
}

TEST_CASE("segment_plane: noiseless horizontal plane") {
  const PointCloud c = with_up_normals(grid_plane(10, 0.02, 0.1));
  const Plane p = segment_plane(c, {});
  CHECK((p.normal - Point3::UnitZ()).norm() < 1e-9);
  CHECK(p.offset == doctest::Approx(-0.1).epsilon(1e-12));
  CHECK(p.inliers.size() == 100);
}

TEST_CASE("segment_plane: outliers do not steal inliers") {
  std::mt19937_64 rng(21);
  PointCloud c = grid_plane(10, 0.03, 0.0);
  const std::size_t n_plane = c.size();
  for (int i = 0; i < 50; ++i) c.points.emplace_back(urand(rng, -0.2, 0.8), urand(rng, -0.2, 0.8), urand(rng, 0.05, 1.0));
  c = estimate_normals(c, 10);
  PlaneSegmentationParams params;
  params.dist_thresh = 0.005;
  params.rng_seed = 4;
  const Plane p = segment_plane(c, params);
  std::size_t hit = 0;
  for (std::size_t i : p.inliers) hit += i < n_plane;
  CHECK(static_cast<double>(hit) / n_plane >= 0.99);
  for (std::size_t i : p.inliers) CHECK(std::abs(p.signed_distance(c.points[i])) <= params.dist_thresh);
  CHECK(line_angle(p.normal, params.ref_axis) <= params.angle_tol);
  CHECK(std::abs(p.normal.norm() - 1.0) < 1e-9);
  CHECK(p.normal.z() > 0.0);
}

TEST_CASE("segment_plane: steep plane is rejected, same seed same plane") {
  PointCloud c;
  const double tilt = deg2rad(30.0);
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) c.points.emplace_back(i * 0.02, j * 0.02 * std::cos(tilt), j * 0.02 * std::sin(tilt));
  c.normals.assign(c.size(), Point3(0, -std::sin(tilt), std::cos(tilt)));
  CHECK_ERROR(segment_plane(c, {}), ErrorCode::NoAdmissiblePlane);

  std::mt19937_64 rng(2);
  PointCloud noisy = grid_plane(12, 0.02, 0.3);
  for (auto& p : noisy.points) p.z() += urand(rng, -0.002, 0.002);
  noisy = with_up_normals(noisy);
  PlaneSegmentationParams params;
  params.rng_seed = 99;
  const Plane a = segment_plane(noisy, params), b = segment_plane(noisy, params);
  CHECK(a.normal == b.normal);
  CHECK(a.offset == b.offset);
  CHECK(a.inliers == b.inliers);
}

TEST_CASE("convex_hull: unit square with interior points") {
  PointCloud c;
  for (auto [x, y] : std::vector<std::pair<double, double>>{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}, {0.2, 0.7}, {0.5, 0}})
    c.points.emplace_back(x, y, 0.0);
  const Polygon2 poly = convex_hull(flat_plane(c), c);
  CHECK(poly.vertices.size() == 4);
  CHECK(poly.signed_area() == doctest::Approx(1.0));
}

TEST_CASE("convex_hull: matches O(n^3) extreme point oracle") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    PointCloud c;
    for (int i = 0; i < 100; ++i) c.points.emplace_back(urand(rng, -1, 1), urand(rng, -1, 1), 0.0);
    const Polygon2 poly = convex_hull(flat_plane(c), c);

    // (i, j) is a hull edge iff every other point lies strictly left of it
    std::set<std::size_t> oracle;
    for (std::size_t i = 0; i < c.size(); ++i)
      for (std::size_t j = 0; j < c.size(); ++j) {
        if (i == j) continue;
        const Vec2 a = c.points[i].head<2>(), b = c.points[j].head<2>();
        bool edge = true;
        for (std::size_t k = 0; k < c.size() && edge; ++k) {
          if (k == i || k == j) continue;
          const Vec2 p = c.points[k].head<2>();
          edge = (b - a).x() * (p - a).y() - (b - a).y() * (p - a).x() > 0;
        }
        if (edge) oracle.insert(i), oracle.insert(j);
      }
    REQUIRE(poly.vertices.size() == oracle.size());
    for (const Vec2& v : poly.vertices) {
      const Point3 w = poly.basis.lift(v);
      const bool match = std::any_of(oracle.begin(), oracle.end(),
                                     [&](std::size_t i) { return (c.points[i] - w).norm() < 1e-12; });
      CHECK(match);
    }
    CHECK(poly.signed_area() > 0.0);
    for (const auto& p : c.points) CHECK(poly.contains(poly.basis.project(p), 1e-12));
  }
}

TEST_CASE("convex_hull: collinear inliers are degenerate") {
  PointCloud c;
  for (int i = 0; i < 5; ++i) c.points.emplace_back(0.1 * i, 0.05 * i, 0.0);
  CHECK_ERROR(convex_hull(flat_plane(c), c), ErrorCode::DegenerateInliers);
}

TEST_CASE("extract_prism: closed height range, boundary inclusive") {
  PointCloud table;
  for (auto [x, y] : std::vector<std::pair<double, double>>{{0, 0}, {1, 0}, {1, 1}, {0, 1}}) table.points.emplace_back(x, y, 0.0);
  const Polygon2 poly = convex_hull(flat_plane(table), table);

  PointCloud q;
  q.points = {{0.5, 0.5, 0.05}, {0.5, 0.5, -0.02}, {1.0, 1.0, 0.01}, {0.5, 0.5, 0.2}, {1.2, 0.5, 0.05}, {0.5, 0.5, 0.21}};
  CHECK(extract_prism(q, poly, 0.01, 0.2) == std::vector<std::size_t>{0, 2, 3});
  CHECK_ERROR(extract_prism(q, poly, 0.2, 0.1), ErrorCode::InvertedHeightRange);
  CHECK_ERROR(extract_prism(q, poly, -0.1, 0.1), ErrorCode::InvertedHeightRange);
}

TEST_CASE("euclidean_cluster: blobs and chains") {
  std::mt19937_64 rng(8);
  PointCloud c;
  for (int i = 0; i < 20; ++i) c.points.emplace_back(urand(rng, 0, 0.01), urand(rng, 0, 0.01), 0);
  for (int i = 0; i < 20; ++i) c.points.emplace_back(0.11 + urand(rng, 0, 0.01), urand(rng, 0, 0.01), 0);
  std::vector<std::size_t> all(c.size());
  std::iota(all.begin(), all.end(), 0);
  ClusterParams params{0.02, 1, 1000};
  auto clusters = euclidean_cluster(c, all, params);
  REQUIRE(clusters.size() == 2);
  CHECK(clusters[0].indices.size() == 20);
  CHECK(clusters[1].indices.size() == 20);
  CHECK(clusters[0].centroid.x() < clusters[1].centroid.x());

  PointCloud chain;
  for (int i = 0; i < 30; ++i) chain.points.emplace_back(0.01 * i, 0, 0);
  std::vector<std::size_t> idx(chain.size());
  std::iota(idx.begin(), idx.end(), 0);
  CHECK(euclidean_cluster(chain, idx, params).size() == 1);
  CHECK(euclidean_cluster(chain, {}, params).empty());
  params.min_size = 31;
  CHECK(euclidean_cluster(chain, idx, params).empty());
}

TEST_CASE("euclidean_cluster: partition equals union-find oracle") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    const PointCloud c = random_cloud(rng, 400, 0.0, 0.3);
    std::vector<std::size_t> subset;
    for (std::size_t i = 0; i < c.size(); i += 1 + (i % 3 == 0)) subset.push_back(i);
    const ClusterParams params{0.03, 3, 200};
    auto clusters = euclidean_cluster(c, subset, params);
    std::vector<std::vector<std::size_t>> got;
    for (auto& cl : clusters) {
      got.push_back(cl.indices);
      CHECK((cl.centroid - centroid_of(c, cl.indices)).norm() < 1e-15);
    }
    std::sort(got.begin(), got.end());
    CHECK(got == union_find_clusters(c, subset, params.tolerance, params.min_size, params.max_size));
    for (std::size_t i = 1; i < clusters.size(); ++i) CHECK(clusters[i - 1].centroid.x() <= clusters[i].centroid.x());
  }
}

TEST_CASE("kdtree: queries agree with linear scans") {
  std::mt19937_64 rng(23);
  const PointCloud c = random_cloud(rng, 300, -1, 1);
  KdTree tree(c.points);
  for (int t = 0; t < 50; ++t) {
    const Point3 q(urand(rng, -1, 1), urand(rng, -1, 1), urand(rng, -1, 1));
    std::vector<std::size_t> order(c.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return (c.points[a] - q).norm() < (c.points[b] - q).norm(); });
    const auto nn = tree.nearest(q, 7);
    CHECK(std::vector<std::size_t>(order.begin(), order.begin() + 7) == nn);
    CHECK(tree.nearest_one(q).first == order[0]);
    std::vector<std::size_t> within;
    for (std::size_t i = 0; i < c.size(); ++i)
      if ((c.points[i] - q).norm() <= 0.4) within.push_back(i);
    CHECK(tree.within(q, 0.4) == within);
  }
}

TEST_CASE("ply: round trip is exact, errors name the line") {
  std::mt19937_64 rng(31);
  PointCloud c = estimate_normals(random_cloud(rng, 50, -1, 1), 5);
  const PointCloud back = parse_ply(format_ply(c));
  CHECK(back.points == c.points);
  CHECK(back.normals == c.normals);

  const std::string hdr = "ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\nproperty float y\nproperty float z\n";
  CHECK(parse_ply(hdr + "end_header\n1 2 3\n").points[0] == Point3(1, 2, 3));
  CHECK_ERROR(parse_ply("ply\nformat binary_little_endian 1.0\n"), ErrorCode::ParseError);
  CHECK_ERROR(parse_ply(hdr + "property float red\nend_header\n1 2 3 4\n"), ErrorCode::ParseError);
  CHECK_ERROR(parse_ply(hdr + "end_header\n1 2\n"), ErrorCode::ParseError);
  CHECK_ERROR(parse_ply(hdr + "end_header\n"), ErrorCode::ParseError);
  try {
    parse_ply(hdr + "end_header\n1 2 x\n");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 8") != std::string::npos);
  }
  CHECK_ERROR(read_ply("/nonexistent/cloud.ply"), ErrorCode::IoError);
}
