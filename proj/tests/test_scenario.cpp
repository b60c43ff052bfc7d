#include "mobman/scenario.hpp"
#include "support.hpp"

#include <cmath>

using namespace mobman;

namespace {

RttScenario two_objects() {
  RttScenario s;
  s.objects = {{"a", 0.0}, {"b", kPi}};
  s.duration = 20.0;
  s.seed = 5;
  return s;
}

}  // namespace

TEST_CASE("gen_workstation: bare table lies on the plane") {
  WorkstationScenario s;
  s.seed = 2;
  const auto sample = gen_workstation(s);
  REQUIRE(sample.cloud.size() > 100);
  for (std::size_t i = 0; i < sample.cloud.size(); ++i) {
    CHECK(sample.truth.labels[i] == -1);
    CHECK(std::abs(sample.cloud.points[i].z() - s.table_height) < 1e-12);
  }
  // density is samples per square meter of table
  CHECK(static_cast<double>(sample.cloud.size()) == doctest::Approx(s.density * 0.8 * 0.4).epsilon(0.05));
}

TEST_CASE("gen_workstation: label histogram matches the truth counts") {
  const WorkstationScenario s = random_workstation(4, 0.002, 0.05);
  const auto sample = gen_workstation(s);
  REQUIRE(sample.truth.labels.size() == sample.cloud.size());
  std::vector<std::size_t> hist(s.objects.size(), 0);
  std::size_t outliers = 0;
  for (int l : sample.truth.labels) {
    if (l >= 0) ++hist[static_cast<std::size_t>(l)];
    if (l == -2) ++outliers;
  }
  CHECK(hist == sample.truth.object_counts);
  CHECK(outliers == s.outlier_count);
  CHECK(s.objects.size() >= 2);
  CHECK(s.objects.size() <= 4);
  for (std::size_t k = 0; k < s.objects.size(); ++k) CHECK(hist[k] > 50);
}

TEST_CASE("gen_workstation: deterministic per seed, json round trip") {
  const WorkstationScenario s = random_workstation(9, 0.001, 0.02);
  const auto a = gen_workstation(s), b = gen_workstation(s);
  CHECK(a.cloud.points == b.cloud.points);
  CHECK(a.truth.labels == b.truth.labels);
  const WorkstationScenario back = workstation_from_json(workstation_to_json(s));
  CHECK(workstation_to_json(back) == workstation_to_json(s));
  CHECK(gen_workstation(back).cloud.points == a.cloud.points);
  WorkstationScenario other = s;
  other.seed = 10;
  CHECK(gen_workstation(other).cloud.points != a.cloud.points);
  CHECK_ERROR(workstation_from_json("{\"objects\": 3}"), ErrorCode::ParseError);
}

TEST_CASE("gen_rtt_stream: circular motion at the table rate") {
  const RttScenario s = two_objects();
  const RttStream st = gen_rtt_stream(s);
  CHECK(st.points.size() == 301);
  CHECK(st.truth.size() == 2 * 301);
  for (const auto& p : st.truth) {
    const double r = std::hypot(p.p.x() - s.table_center.x(), p.p.y() - s.table_center.y());
    CHECK(r == doctest::Approx(s.table_radius));
  }
  // one full period brings every object back
  const double period = 2 * kPi / s.omega;
  RttScenario exact = s;
  exact.rate = 1.0 / period * 8;  // eight frames per revolution
  exact.duration = period;
  const RttStream rev = gen_rtt_stream(exact);
  REQUIRE(rev.points.size() == 9);
  CHECK((rev.points.front()[0].p - rev.points.back()[0].p).norm() < 1e-9);
  CHECK((rev.points.front()[1].p - rev.points.back()[1].p).norm() < 1e-9);
  // box centres follow the point through the image scale
  const auto& d = st.detections[10][0];
  const auto& q = st.points[10][0];
  CHECK(d.box.cx == doctest::Approx(s.image_center.x() + s.ppm * (q.p.x() - s.table_center.x())));
}

TEST_CASE("gen_rtt_stream: dropout rate") {
  RttScenario s = two_objects();
  s.duration = 200.0;
  s.dropout = 0.2;
  const RttStream st = gen_rtt_stream(s);
  std::size_t kept = 0;
  for (const auto& f : st.points) kept += f.size();
  const double dropped = 1.0 - static_cast<double>(kept) / static_cast<double>(st.truth.size());
  CHECK(std::abs(dropped - 0.2) <= 0.04);
  for (std::size_t k = 0; k < st.points.size(); ++k) CHECK(st.points[k].size() == st.detections[k].size());
}

TEST_CASE("gen_rtt_stream: deterministic, json round trip, validation") {
  RttScenario s = two_objects();
  s.noise_m = 0.003;
  s.noise_px = 2.0;
  const RttStream a = gen_rtt_stream(s), b = gen_rtt_stream(s);
  REQUIRE(a.points.size() == b.points.size());
  for (std::size_t k = 0; k < a.points.size(); ++k)
    for (std::size_t i = 0; i < a.points[k].size(); ++i) CHECK(a.points[k][i].p == b.points[k][i].p);
  CHECK(rtt_to_json(rtt_from_json(rtt_to_json(s))) == rtt_to_json(s));
  s.dropout = 1.5;
  CHECK_ERROR(gen_rtt_stream(s), ErrorCode::InvalidArgument);
  CHECK_ERROR(rtt_from_json("[1, 2"), ErrorCode::ParseError);
}

TEST_CASE("random_map: density, keep-clear discs and determinism") {
  MapScenario m;
  m.keep_clear = {{1.0, 1.0}, {7.0, 7.0}};
  m.seed = 3;
  const OccupancyGrid g = random_map(m);
  CHECK(g.width == 80);
  CHECK(g.height == 80);
  std::size_t occ = 0;
  for (int r = 0; r < g.height; ++r)
    for (int c = 0; c < g.width; ++c) {
      if (g.at(c, r) != Cell::Occupied) continue;
      ++occ;
      for (const auto& k : m.keep_clear) CHECK((g.cell_center(c, r) - k).norm() >= m.clear_radius);
    }
  const double frac = static_cast<double>(occ) / (80.0 * 80.0);
  CHECK(frac >= m.density);
  CHECK(frac < m.density + 0.01);
  CHECK(random_map(m).cells == g.cells);
  m.seed = 4;
  CHECK(random_map(m).cells != g.cells);
  m.density = 1.0;
  CHECK_ERROR(random_map(m), ErrorCode::InvalidArgument);
}
