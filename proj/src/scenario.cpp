#include "mobman/scenario.hpp"

#include "mobman/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <initializer_list>

namespace mobman {

using json = nlohmann::ordered_json;

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

double gaussian(std::mt19937_64& rng, double sigma) {
  // Box-Muller, one variate per call.
  const double u1 = 1.0 - uniform01(rng);
  const double u2 = uniform01(rng);
  return sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

namespace {

std::size_t sample_count(double area, double density) {
  return static_cast<std::size_t>(std::llround(area * density));
}

Point3 place(const SceneObject& o, double z0, double lx, double ly, double lz) {
  const double c = std::cos(o.yaw), s = std::sin(o.yaw);
  return {o.position.x() + c * lx - s * ly, o.position.y() + s * lx + c * ly, z0 + lz};
}

bool in_footprint(const SceneObject& o, const Vec2& p) {
  const Vec2 d = p - o.position;
  if (o.shape == Shape::Cylinder) return d.norm() <= o.dims.x();
  const double c = std::cos(o.yaw), s = std::sin(o.yaw);
  const double lx = c * d.x() + s * d.y(), ly = -s * d.x() + c * d.y();
  return std::abs(lx) <= o.dims.x() / 2 && std::abs(ly) <= o.dims.y() / 2;
}

double footprint_radius(const SceneObject& o) {
  return o.shape == Shape::Cylinder ? o.dims.x() : 0.5 * std::hypot(o.dims.x(), o.dims.y());
}

double surface_area(const SceneObject& o) {
  if (o.shape == Shape::Cylinder) return kPi * o.dims.x() * o.dims.x() + kTwoPi * o.dims.x() * o.dims.y();
  return o.dims.x() * o.dims.y() + 2 * o.dims.z() * (o.dims.x() + o.dims.y());
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) fail(ErrorCode::ParseError, where + ": expected a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return it.key() == a; }))
      fail(ErrorCode::ParseError, where + ": unknown key '" + it.key() + "'");
  }
}

Vec2 vec2(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2) fail(ErrorCode::ParseError, what + " must be [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

json parse(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::ParseError, what + ": " + e.what());
  }
}

}  // namespace

// ---------------------------------------------------------------------------

void WorkstationScenario::validate() const {
  if (!(table_width > 0 && table_depth > 0)) fail(ErrorCode::InvalidArgument, "table extent must be positive");
  if (!(density > 0)) fail(ErrorCode::InvalidArgument, "sample density must be positive");
  if (!(noise_sigma >= 0)) fail(ErrorCode::InvalidArgument, "noise_sigma must be non-negative");
  for (const auto& o : objects) {
    const int n = o.shape == Shape::Box ? 3 : 2;
    for (int k = 0; k < n; ++k)
      if (!(o.dims[k] > 0)) fail(ErrorCode::InvalidArgument, "object '" + o.label + "' needs positive dimensions");
    const Vec2 d = (o.position - table_center).cwiseAbs();
    if (d.x() > table_depth / 2 || d.y() > table_width / 2)
      fail(ErrorCode::InvalidArgument, "object '" + o.label + "' is not on the table surface");
  }
}

std::vector<Point3> sample_object_surface(const SceneObject& o, double z0, double density, std::mt19937_64& rng) {
  std::vector<Point3> out;
  if (o.shape == Shape::Box) {
    const double L = o.dims.x(), W = o.dims.y(), H = o.dims.z();
    for (std::size_t i = 0, n = sample_count(L * W, density); i < n; ++i)
      out.push_back(place(o, z0, uniform(rng, -L / 2, L / 2), uniform(rng, -W / 2, W / 2), H));
    for (int side : {-1, 1}) {
      for (std::size_t i = 0, n = sample_count(W * H, density); i < n; ++i)
        out.push_back(place(o, z0, side * L / 2, uniform(rng, -W / 2, W / 2), uniform(rng, 0, H)));
      for (std::size_t i = 0, n = sample_count(L * H, density); i < n; ++i)
        out.push_back(place(o, z0, uniform(rng, -L / 2, L / 2), side * W / 2, uniform(rng, 0, H)));
    }
  } else {
    const double r = o.dims.x(), H = o.dims.y();
    for (std::size_t i = 0, n = sample_count(kPi * r * r, density); i < n; ++i) {
      const double rad = r * std::sqrt(uniform01(rng)), a = uniform(rng, -kPi, kPi);
      out.push_back(place(o, z0, rad * std::cos(a), rad * std::sin(a), H));
    }
    for (std::size_t i = 0, n = sample_count(kTwoPi * r * H, density); i < n; ++i) {
      const double a = uniform(rng, -kPi, kPi);
      out.push_back(place(o, z0, r * std::cos(a), r * std::sin(a), uniform(rng, 0, H)));
    }
  }
  return out;
}

WorkstationSample gen_workstation(const WorkstationScenario& s) {
  s.validate();
  std::mt19937_64 rng(s.seed);
  WorkstationSample out;
  out.truth.plane.normal = Point3::UnitZ();
  out.truth.plane.offset = -s.table_height;
  auto noisy = [&](const Point3& p) {
    if (s.noise_sigma == 0.0) return p;
    const double dx = gaussian(rng, s.noise_sigma), dy = gaussian(rng, s.noise_sigma), dz = gaussian(rng, s.noise_sigma);
    return Point3(p.x() + dx, p.y() + dy, p.z() + dz);
  };

  const double x0 = s.table_center.x() - s.table_depth / 2, y0 = s.table_center.y() - s.table_width / 2;
  for (std::size_t i = 0, n = sample_count(s.table_width * s.table_depth, s.density); i < n; ++i) {
    const Vec2 p(uniform(rng, x0, x0 + s.table_depth), uniform(rng, y0, y0 + s.table_width));
    const bool covered = std::any_of(s.objects.begin(), s.objects.end(), [&](const SceneObject& o) { return in_footprint(o, p); });
    if (covered) continue;
    out.cloud.points.push_back(noisy(Point3(p.x(), p.y(), s.table_height)));
    out.truth.labels.push_back(-1);
  }
  for (std::size_t k = 0; k < s.objects.size(); ++k) {
    const auto pts = sample_object_surface(s.objects[k], s.table_height, s.density, rng);
    for (const auto& p : pts) {
      out.cloud.points.push_back(noisy(p));
      out.truth.labels.push_back(static_cast<int>(k));
    }
    out.truth.object_counts.push_back(pts.size());
  }
  for (std::size_t i = 0; i < s.outlier_count; ++i) {
    const double x = uniform(rng, x0, x0 + s.table_depth);
    const double y = uniform(rng, y0, y0 + s.table_width);
    const double z = uniform(rng, s.table_height - 0.1, s.table_height + 0.4);
    out.cloud.points.emplace_back(x, y, z);
    out.truth.labels.push_back(-2);
  }
  return out;
}

WorkstationScenario random_workstation(std::uint64_t seed, double noise_sigma, double outlier_fraction) {
  if (!(outlier_fraction >= 0 && outlier_fraction < 1))
    fail(ErrorCode::InvalidArgument, "outlier fraction must be in [0, 1)");
  WorkstationScenario s;
  s.seed = seed;
  s.noise_sigma = noise_sigma;
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  const std::size_t n = 2 + rng() % 3;
  const double margin = 0.04, gap = 0.06;
  for (std::size_t k = 0; k < n; ++k) {
    SceneObject o;
    if (uniform01(rng) < 0.7) {
      o.shape = Shape::Box;
      o.dims = {uniform(rng, 0.06, 0.12), uniform(rng, 0.025, 0.05), uniform(rng, 0.02, 0.05)};
      o.label = "box_" + std::to_string(k);
    } else {
      o.shape = Shape::Cylinder;
      o.dims = {uniform(rng, 0.015, 0.03), uniform(rng, 0.03, 0.1), 0.0};
      o.label = "cylinder_" + std::to_string(k);
    }
    o.yaw = uniform(rng, -kPi, kPi);
    const double r = footprint_radius(o);
    for (int attempt = 0; attempt < 1000; ++attempt) {
      o.position = {uniform(rng, s.table_center.x() - s.table_depth / 2 + r + margin,
                            s.table_center.x() + s.table_depth / 2 - r - margin),
                    uniform(rng, s.table_center.y() - s.table_width / 2 + r + margin,
                            s.table_center.y() + s.table_width / 2 - r - margin)};
      const bool clear = std::all_of(s.objects.begin(), s.objects.end(), [&](const SceneObject& q) {
        return (q.position - o.position).norm() >= r + footprint_radius(q) + gap;
      });
      if (clear) {
        s.objects.push_back(o);
        break;
      }
    }
  }
  double area = s.table_width * s.table_depth;
  for (const auto& o : s.objects) area += surface_area(o);
  const double surface = area * s.density;
  s.outlier_count = static_cast<std::size_t>(std::llround(surface * outlier_fraction / (1.0 - outlier_fraction)));
  return s;
}

WorkstationScenario workstation_from_json(const std::string& text) {
  const json j = parse(text, "workstation scenario");
  WorkstationScenario s;
  try {
    check_keys(j, {"table", "objects", "density", "noise_sigma", "outlier_count", "seed"}, "workstation scenario");
    if (j.contains("table")) {
      const json& t = j["table"];
      check_keys(t, {"center", "width", "depth", "height"}, "table");
      if (t.contains("center")) s.table_center = vec2(t["center"], "table.center");
      s.table_width = t.value("width", s.table_width);
      s.table_depth = t.value("depth", s.table_depth);
      s.table_height = t.value("height", s.table_height);
    }
    for (const json& o : j.value("objects", json::array())) {
      check_keys(o, {"shape", "dims", "position", "yaw", "label"}, "object");
      SceneObject obj;
      const std::string shape = o.value("shape", "box");
      if (shape == "box") {
        obj.shape = Shape::Box;
        if (!o.contains("dims") || o["dims"].size() != 3) fail(ErrorCode::ParseError, "box dims must be [l, w, h]");
        obj.dims = {o["dims"][0].get<double>(), o["dims"][1].get<double>(), o["dims"][2].get<double>()};
      } else if (shape == "cylinder") {
        obj.shape = Shape::Cylinder;
        if (!o.contains("dims") || o["dims"].size() != 2)
          fail(ErrorCode::ParseError, "cylinder dims must be [radius, height]");
        obj.dims = {o["dims"][0].get<double>(), o["dims"][1].get<double>(), 0.0};
      } else {
        fail(ErrorCode::ParseError, "unknown object shape '" + shape + "'");
      }
      if (o.contains("position")) obj.position = vec2(o["position"], "object position");
      obj.yaw = o.value("yaw", 0.0);
      obj.label = o.value("label", "object_" + std::to_string(s.objects.size()));
      s.objects.push_back(obj);
    }
    s.density = j.value("density", s.density);
    s.noise_sigma = j.value("noise_sigma", s.noise_sigma);
    s.outlier_count = j.value("outlier_count", s.outlier_count);
    s.seed = j.value("seed", s.seed);
  } catch (const json::exception& e) {
    fail(ErrorCode::ParseError, std::string("workstation scenario: ") + e.what());
  }
  s.validate();
  return s;
}

std::string workstation_to_json(const WorkstationScenario& s) {
  json objects = json::array();
  for (const auto& o : s.objects) {
    json dims = o.shape == Shape::Box ? json{o.dims.x(), o.dims.y(), o.dims.z()} : json{o.dims.x(), o.dims.y()};
    objects.push_back({{"shape", o.shape == Shape::Box ? "box" : "cylinder"},
                       {"dims", dims},
                       {"position", {o.position.x(), o.position.y()}},
                       {"yaw", o.yaw},
                       {"label", o.label}});
  }
  const json j = {{"table",
                   {{"center", {s.table_center.x(), s.table_center.y()}},
                    {"width", s.table_width},
                    {"depth", s.table_depth},
                    {"height", s.table_height}}},
                  {"objects", objects},
                  {"density", s.density},
                  {"noise_sigma", s.noise_sigma},
                  {"outlier_count", s.outlier_count},
                  {"seed", s.seed}};
  return j.dump(2) + "\n";
}

std::string truth_to_json(const WorkstationTruth& t) {
  const json j = {{"plane",
                   {{"normal", {t.plane.normal.x(), t.plane.normal.y(), t.plane.normal.z()}},
                    {"offset", t.plane.offset}}},
                  {"object_counts", t.object_counts},
                  {"labels", t.labels}};
  return j.dump() + "\n";
}

// ---------------------------------------------------------------------------

void RttScenario::validate() const {
  if (!(table_radius > 0)) fail(ErrorCode::InvalidArgument, "table radius must be positive");
  if (!(rate > 0)) fail(ErrorCode::InvalidArgument, "frame rate must be positive");
  if (!(duration >= 0)) fail(ErrorCode::InvalidArgument, "duration must be non-negative");
  if (!(dropout >= 0 && dropout <= 1)) fail(ErrorCode::InvalidArgument, "dropout must be in [0, 1]");
  if (!(noise_m >= 0 && noise_px >= 0)) fail(ErrorCode::InvalidArgument, "noise must be non-negative");
  if (!(ppm > 0 && object_size > 0)) fail(ErrorCode::InvalidArgument, "ppm and object_size must be positive");
  if (!(gate > 0)) fail(ErrorCode::InvalidArgument, "gate must be positive");
}

std::size_t RttScenario::frames() const {
  return static_cast<std::size_t>(std::floor(duration * rate + 1e-9)) + 1;
}

RttStream gen_rtt_stream(const RttScenario& s) {
  s.validate();
  std::mt19937_64 rng(s.seed);
  RttStream out;
  const std::size_t frames = s.frames();
  out.points.resize(frames);
  out.detections.resize(frames);
  const double side = s.ppm * s.object_size;
  for (std::size_t k = 0; k < frames; ++k) {
    const double t = static_cast<double>(k) / s.rate;
    for (std::size_t i = 0; i < s.objects.size(); ++i) {
      const double a = s.objects[i].angle0 + s.omega * t;
      const Point3 p(s.table_center.x() + s.table_radius * std::cos(a), s.table_center.y() + s.table_radius * std::sin(a),
                     s.table_height);
      const int id = static_cast<int>(i);
      out.truth.push_back({t, id, p});
      if (s.dropout > 0 && uniform01(rng) < s.dropout) continue;
      RttPoint q{t, id, p};
      if (s.noise_m > 0) q.p += Point3(gaussian(rng, s.noise_m), gaussian(rng, s.noise_m), gaussian(rng, s.noise_m));
      out.points[k].push_back(q);
      Detection2D d;
      d.t = t;
      d.gt_id = id;
      d.box.cx = s.image_center.x() + s.ppm * (p.x() - s.table_center.x());
      d.box.cy = s.image_center.y() + s.ppm * (p.y() - s.table_center.y());
      d.box.w = side;
      d.box.h = side;
      if (s.noise_px > 0) {
        d.box.cx += gaussian(rng, s.noise_px);
        d.box.cy += gaussian(rng, s.noise_px);
        d.box.w = std::max(1.0, side + gaussian(rng, s.noise_px));
        d.box.h = std::max(1.0, side + gaussian(rng, s.noise_px));
      }
      out.detections[k].push_back(d);
    }
  }
  return out;
}

RttScenario rtt_from_json(const std::string& text) {
  const json j = parse(text, "rtt scenario");
  RttScenario s;
  try {
    check_keys(j,
               {"table", "omega", "objects", "rate", "duration", "noise_m", "noise_px", "dropout", "ppm", "object_size",
                "image_center", "gate", "seed"},
               "rtt scenario");
    if (j.contains("table")) {
      const json& t = j["table"];
      check_keys(t, {"center", "radius", "height"}, "table");
      if (t.contains("center")) s.table_center = vec2(t["center"], "table.center");
      s.table_radius = t.value("radius", s.table_radius);
      s.table_height = t.value("height", s.table_height);
    }
    s.omega = j.value("omega", s.omega);
    for (const json& o : j.value("objects", json::array())) {
      check_keys(o, {"label", "angle"}, "object");
      s.objects.push_back({o.value("label", "object_" + std::to_string(s.objects.size())), o.value("angle", 0.0)});
    }
    s.rate = j.value("rate", s.rate);
    s.duration = j.value("duration", s.duration);
    s.noise_m = j.value("noise_m", s.noise_m);
    s.noise_px = j.value("noise_px", s.noise_px);
    s.dropout = j.value("dropout", s.dropout);
    s.ppm = j.value("ppm", s.ppm);
    s.object_size = j.value("object_size", s.object_size);
    if (j.contains("image_center")) s.image_center = vec2(j["image_center"], "image_center");
    s.gate = j.value("gate", s.gate);
    s.seed = j.value("seed", s.seed);
  } catch (const json::exception& e) {
    fail(ErrorCode::ParseError, std::string("rtt scenario: ") + e.what());
  }
  s.validate();
  return s;
}

std::string rtt_to_json(const RttScenario& s) {
  json objects = json::array();
  for (const auto& o : s.objects) objects.push_back({{"label", o.label}, {"angle", o.angle0}});
  const json j = {{"table",
                   {{"center", {s.table_center.x(), s.table_center.y()}},
                    {"radius", s.table_radius},
                    {"height", s.table_height}}},
                  {"omega", s.omega},
                  {"objects", objects},
                  {"rate", s.rate},
                  {"duration", s.duration},
                  {"noise_m", s.noise_m},
                  {"noise_px", s.noise_px},
                  {"dropout", s.dropout},
                  {"ppm", s.ppm},
                  {"object_size", s.object_size},
                  {"image_center", {s.image_center.x(), s.image_center.y()}},
                  {"gate", s.gate},
                  {"seed", s.seed}};
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------

OccupancyGrid random_map(const MapScenario& s) {
  if (!(s.width > 0 && s.height > 0 && s.resolution > 0)) fail(ErrorCode::InvalidArgument, "map extent must be positive");
  if (!(s.density >= 0 && s.density < 1)) fail(ErrorCode::InvalidArgument, "obstacle density must be in [0, 1)");
  if (s.block < 1) fail(ErrorCode::InvalidArgument, "obstacle block must be at least one cell");
  const int w = static_cast<int>(std::lround(s.width / s.resolution));
  const int h = static_cast<int>(std::lround(s.height / s.resolution));
  OccupancyGrid g = OccupancyGrid::empty(w, h, s.resolution);
  if (w < s.block || h < s.block) return g;
  std::mt19937_64 rng(s.seed);
  const auto target = static_cast<std::size_t>(std::ceil(s.density * w * h));
  std::size_t occupied = 0;
  for (int attempt = 0; attempt < 100000 && occupied < target; ++attempt) {
    const int c0 = static_cast<int>(rng() % static_cast<std::uint64_t>(w - s.block + 1));
    const int r0 = static_cast<int>(rng() % static_cast<std::uint64_t>(h - s.block + 1));
    bool ok = true;
    for (int r = r0; r < r0 + s.block && ok; ++r)
      for (int c = c0; c < c0 + s.block && ok; ++c)
        for (const auto& k : s.keep_clear)
          if ((g.cell_center(c, r) - k).norm() < s.clear_radius) ok = false;
    if (!ok) continue;
    for (int r = r0; r < r0 + s.block; ++r)
      for (int c = c0; c < c0 + s.block; ++c)
        if (g.at(c, r) != Cell::Occupied) {
          g.at(c, r) = Cell::Occupied;
          ++occupied;
        }
  }
  return g;
}

}  // namespace mobman
