#include "mobman/placement.hpp"
#include "mobman/scenario.hpp"
#include "support.hpp"

#include <algorithm>
#include <cmath>

using namespace mobman;

namespace {

Polygon2 unit_square() {
  Polygon2 p;
  p.vertices = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  return p;
}

// Independent margin for the axis-aligned unit square.
double square_margin(const Vec2& p, const std::vector<Obstacle2>& obs, double d_min, double fp) {
  double m = std::min({p.x(), 1 - p.x(), p.y(), 1 - p.y()}) - fp;
  for (const auto& o : obs) m = std::min(m, std::hypot(p.x() - o.center.x(), p.y() - o.center.y()) - o.radius - fp - d_min);
  return m;
}

std::size_t grid_feasible(const std::vector<Obstacle2>& obs, double d_min, double fp, double step) {
  std::size_t n = 0;
  const int k = static_cast<int>(std::lround(1.0 / step));
  for (int i = 0; i <= k; ++i)
    for (int j = 0; j <= k; ++j)
      if (square_margin({i * step, j * step}, obs, d_min, fp) >= 0.0) ++n;
  return n;
}

}  // namespace

TEST_CASE("placement_margin: matches the square oracle") {
  const std::vector<Obstacle2> obs{{{0.3, 0.4}, 0.1}, {{0.7, 0.7}, 0.05}};
  std::mt19937_64 rng(1);
  for (int t = 0; t < 2000; ++t) {
    const Vec2 p(testing::urand(rng, 0, 1), testing::urand(rng, 0, 1));
    CHECK(placement_margin(unit_square(), obs, p, 0.03, 0.05) ==
          doctest::Approx(square_margin(p, obs, 0.03, 0.05)).epsilon(1e-12));
  }
}

TEST_CASE("sample_placements: covered table has no free space") {
  const std::vector<Obstacle2> obs{{{0.5, 0.5}, 0.6}};
  CHECK(grid_feasible(obs, 0.03, 0.05, 0.001) == 0);
  PlacementSamplingParams p;
  CHECK_ERROR(sample_placements(unit_square(), obs, p), ErrorCode::NoFreeSpace);
}

TEST_CASE("sample_placements: every candidate satisfies every constraint") {
  const std::vector<Obstacle2> obs{{{0.5, 0.5}, 0.2}, {{0.15, 0.8}, 0.05}};
  REQUIRE(grid_feasible(obs, 0.03, 0.05, 0.005) > 0);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    PlacementSamplingParams p;
    p.rng_seed = seed;
    const auto out = sample_placements(unit_square(), obs, p);
    CHECK(out.size() == p.n);
    for (const auto& c : out) {
      CHECK(square_margin(c.uv, obs, p.d_min, p.footprint) >= 0.0);
      CHECK(c.clearance == doctest::Approx(square_margin(c.uv, obs, p.d_min, p.footprint)));
      CHECK((c.pose.position - Point3(c.uv.x(), c.uv.y(), 0)).norm() < 1e-12);
    }
  }
}

TEST_CASE("sample_placements: larger d_min shrinks the feasible set") {
  const std::vector<Obstacle2> obs{{{0.5, 0.5}, 0.2}};
  std::size_t prev = grid_feasible(obs, 0.0, 0.05, 0.005);
  for (double d = 0.02; d <= 0.2; d += 0.02) {
    const std::size_t now = grid_feasible(obs, d, 0.05, 0.005);
    CHECK(now <= prev);
    prev = now;
    PlacementSamplingParams p;
    p.d_min = d;
    for (const auto& c : sample_placements(unit_square(), obs, p))
      CHECK(placement_margin(unit_square(), obs, c.uv, d - 0.02, 0.05) >= c.clearance);
  }
}

TEST_CASE("sample_placements: deterministic and validated") {
  PlacementSamplingParams p;
  p.rng_seed = 7;
  const auto a = sample_placements(unit_square(), {}, p);
  const auto b = sample_placements(unit_square(), {}, p);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].uv == b[i].uv);
  p.n = 0;
  CHECK_ERROR(sample_placements(unit_square(), {}, p), ErrorCode::InvalidArgument);
  Polygon2 line;
  line.vertices = {{0, 0}, {1, 0}};
  CHECK_ERROR(sample_placements(line, {}, PlacementSamplingParams{}), ErrorCode::InvalidArgument);
}

TEST_CASE("rank_placements: reachable first, ties broken by clearance then uv") {
  const KinematicChain c = example_chain();
  auto at = [](double x, double y, double z, double clearance) {
    PlacementPose p;
    p.pose.position = Point3(x, y, z);
    p.uv = Vec2(x, y);
    p.clearance = clearance;
    return p;
  };
  // top-down targets on the arm's sagittal plane within reach of the wrist
  const JointVector q = JointVector::Zero();
  const PlacementPose good = at(0.2, 0.0, 0.0, 0.01);
  const PlacementPose far1 = at(5, 0, 0, 0.2), far2 = at(4, 0, 0, 0.2);
  const auto ranked = rank_placements(c, {far1, good, far2}, q);
  REQUIRE(ranked.size() == 3);
  CHECK(ranked[0].reach_score > 0.0);
  CHECK(ranked[1].reach_score == 0.0);
  CHECK(ranked[1].uv.x() == 4.0);  // equal clearance, smaller u first
  CHECK(ranked[2].uv.x() == 5.0);
  CHECK_ERROR(rank_placements(c, {far1, far2}, q), ErrorCode::NoReachablePlacement);
  CHECK_ERROR(rank_placements(c, {}, q), ErrorCode::InvalidArgument);
}

TEST_CASE("workstation_model: obstacle discs around two boxes") {
  WorkstationScenario s;
  SceneObject a, b;
  a.dims = {0.08, 0.04, 0.05};
  a.position = {0.35, -0.15};
  a.yaw = 0.3;
  b.dims = {0.06, 0.06, 0.04};
  b.position = {0.45, 0.15};
  s.objects = {a, b};
  s.seed = 3;
  const WorkstationSample sample = gen_workstation(s);
  const WorkstationModel m = workstation_model(sample.cloud, PerceptionConfig{});
  REQUIRE(m.obstacles.size() == 2);
  for (const auto& obj : s.objects) {
    const double expect = 0.5 * std::hypot(obj.dims.x(), obj.dims.y());
    const auto it = std::min_element(m.obstacles.begin(), m.obstacles.end(), [&](const Obstacle2& l, const Obstacle2& r) {
      return (m.polygon.basis.lift(l.center).head<2>() - obj.position).norm() <
             (m.polygon.basis.lift(r.center).head<2>() - obj.position).norm();
    });
    CHECK((m.polygon.basis.lift(it->center).head<2>() - obj.position).norm() < 0.01);
    CHECK(std::abs(it->radius - expect) <= 0.1 * expect);
  }
}

TEST_CASE("workstation_model: bare table") {
  WorkstationScenario s;
  s.seed = 1;
  const WorkstationModel m = workstation_model(gen_workstation(s).cloud, PerceptionConfig{});
  CHECK(m.obstacles.empty());
  CHECK(m.polygon.vertices.size() >= 4);
  CHECK(std::abs(m.polygon.signed_area()) == doctest::Approx(0.8 * 0.4).epsilon(0.05));
}
