#include "mobman/pipelines.hpp"

#include "mobman/error.hpp"
#include "mobman/execution.hpp"
#include "mobman/grasp.hpp"
#include "mobman/placement.hpp"
#include "mobman/planner.hpp"
#include "mobman/recognition.hpp"
#include "mobman/scenario.hpp"
#include "mobman/tracking.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace mobman::pipelines {

using json = nlohmann::ordered_json;

namespace {

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::ParseError, what + ": " + e.what());
  }
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json vec(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }

json pose_json(const Pose& p) {
  const Eigen::Quaterniond& q = p.orientation;
  return {{"position", vec(p.position)}, {"orientation", {q.w(), q.x(), q.y(), q.z()}}};
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorCode::ParseError, std::string("config key '") + key + "': " + e.what());
  }
}

Axis parse_axis(const std::string& s) {
  if (s == "x") return Axis::X;
  if (s == "y") return Axis::Y;
  if (s == "z") return Axis::Z;
  fail(ErrorCode::ParseError, "passthrough axis must be x, y or z");
}

PerceptionConfig perception_from_json(const json& j) {
  PerceptionConfig c;
  if (j.is_null()) return c;
  if (!j.is_object()) fail(ErrorCode::ParseError, "perception config must be an object");
  c.leaf = get_or(j, "leaf", c.leaf);
  if (j.contains("passthrough")) {
    const json& p = j["passthrough"];
    c.use_passthrough = true;
    c.passthrough_axis = parse_axis(get_or<std::string>(p, "axis", "z"));
    c.passthrough_lo = get_or(p, "min", c.passthrough_lo);
    c.passthrough_hi = get_or(p, "max", c.passthrough_hi);
  }
  c.normal_k = get_or(j, "normal_k", c.normal_k);
  if (j.contains("plane")) {
    const json& p = j["plane"];
    c.plane.dist_thresh = get_or(p, "dist_thresh", c.plane.dist_thresh);
    c.plane.angle_tol = deg2rad(get_or(p, "angle_tol_deg", rad2deg(c.plane.angle_tol)));
    c.plane.max_iters = get_or(p, "max_iters", c.plane.max_iters);
    c.plane.rng_seed = get_or(p, "seed", c.plane.rng_seed);
    if (p.contains("axis")) {
      const auto a = p["axis"].get<std::vector<double>>();
      if (a.size() != 3) fail(ErrorCode::ParseError, "plane.axis must have 3 components");
      c.plane.ref_axis = Point3(a[0], a[1], a[2]);
    }
  }
  if (j.contains("prism")) {
    c.prism_h_min = get_or(j["prism"], "h_min", c.prism_h_min);
    c.prism_h_max = get_or(j["prism"], "h_max", c.prism_h_max);
  }
  if (j.contains("cluster")) {
    const json& p = j["cluster"];
    c.cluster.tolerance = get_or(p, "tolerance", c.cluster.tolerance);
    c.cluster.min_size = get_or(p, "min_size", c.cluster.min_size);
    c.cluster.max_size = get_or(p, "max_size", c.cluster.max_size);
  }
  return c;
}

ObjectScores scores_from_json(const json& j, ScoreSource src) {
  ObjectScores s;
  s.source = src;
  if (!j.is_object()) fail(ErrorCode::ParseError, "scores must be a {\"label\": score} object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!it.value().is_number()) fail(ErrorCode::ParseError, "score for '" + it.key() + "' is not a number");
    s.scores[it.key()] = it.value().get<double>();
  }
  s.validate();
  return s;
}

// Scores for cluster k from a single map or a per-cluster array.
std::optional<ObjectScores> scores_for(const json& j, std::size_t k, std::size_t n, ScoreSource src) {
  if (j.is_null()) return std::nullopt;
  if (j.is_array()) {
    if (j.size() != n)
      fail(ErrorCode::InvalidArgument, "score list has " + std::to_string(j.size()) + " entries for " +
                                           std::to_string(n) + " clusters");
    return scores_from_json(j[k], src);
  }
  return scores_from_json(j, src);
}

JointVector joints_from_json(const json& j, const JointVector& fallback) {
  if (j.is_null()) return fallback;
  const auto v = j.get<std::vector<double>>();
  if (v.size() != kArmDof) fail(ErrorCode::ParseError, "q0 needs " + std::to_string(kArmDof) + " values");
  JointVector q;
  for (std::size_t i = 0; i < kArmDof; ++i) q[static_cast<Eigen::Index>(i)] = v[i];
  return q;
}

json joints_json(const JointVector& q) {
  json out = json::array();
  for (Eigen::Index i = 0; i < q.size(); ++i) out.push_back(q[i]);
  return out;
}

// Arm bent over the front of the base with the gripper pointing down, turned
// toward `toward`. Starting IK from the straight-up zero pose stalls on
// top-down targets (a half-turn orientation error has no preferred axis).
JointVector ready_seed(const KinematicChain& chain, const Point3& toward) {
  JointVector q;
  q << std::atan2(toward.y(), toward.x()), -0.55, -1.08, -1.5, 0.0;
  return chain.clamp(q);
}

// Same, with the gripper pointing forward for frontal approaches.
JointVector frontal_seed(const KinematicChain& chain, const Point3& toward) {
  JointVector q;
  q << std::atan2(toward.y(), toward.x()), -0.85, -1.9, 1.2, 0.0;
  return chain.clamp(q);
}

IkParams ik_from_json(const json& j) {
  IkParams p;
  if (j.is_null()) return p;
  p.tol_pos = get_or(j, "tol_pos", p.tol_pos);
  p.tol_ang = deg2rad(get_or(j, "tol_ang_deg", rad2deg(p.tol_ang)));
  p.max_iters = get_or(j, "max_iters", p.max_iters);
  p.lambda = get_or(j, "lambda", p.lambda);
  return p;
}

json config_or_empty(const std::string& text, const std::string& what) {
  return text.empty() ? json::object() : parse_json(text, what);
}

}  // namespace

// ---------------------------------------------------------------------------

std::string perceive(const PointCloud& cloud, const std::string& config_json, const std::string& scores3d_json,
                     const std::string& scores2d_json, const std::string& inventory_json) {
  const json cfg = config_or_empty(config_json, "perception config");
  const PerceptionConfig pc = perception_from_json(cfg);
  const double grasp_threshold = get_or(cfg, "frontal_height", 0.06);
  const json s3 = scores3d_json.empty() ? json() : parse_json(scores3d_json, "3D scores");
  const json s2 = scores2d_json.empty() ? json() : parse_json(scores2d_json, "2D scores");
  std::optional<Inventory> inventory;
  if (!inventory_json.empty()) {
    const json inv = parse_json(inventory_json, "inventory");
    if (!inv.is_array()) fail(ErrorCode::ParseError, "inventory must be a JSON string array");
    Inventory set;
    for (const auto& l : inv) {
      if (!l.is_string()) fail(ErrorCode::ParseError, "inventory must be a JSON string array");
      set.insert(l.get<std::string>());
    }
    if (set.empty()) fail(ErrorCode::InvalidArgument, "inventory is empty");
    inventory = std::move(set);
  }

  const SceneModel scene = segment_scene(cloud, pc);
  json out;
  out["plane"] = {{"normal", vec(scene.plane.normal)},
                  {"offset", scene.plane.offset},
                  {"inliers", scene.plane.inliers.size()}};
  json polygon = json::array();
  for (const auto& v : scene.polygon.vertices) polygon.push_back(vec(scene.polygon.basis.lift(v)));
  out["polygon"] = polygon;

  json objects = json::array();
  const std::size_t n = scene.clusters.size();
  for (std::size_t k = 0; k < n; ++k) {
    const Cluster& c = scene.clusters[k];
    json o;
    o["id"] = k;
    o["points"] = c.indices.size();
    o["centroid"] = vec(c.centroid);
    double height = 0.0;
    for (std::size_t i : c.indices) height = std::max(height, scene.plane.signed_distance(scene.cloud.points[i]));
    o["height"] = height;
    o["approach"] = to_string(decide_approach(height, grasp_threshold));
    try {
      const PcaResult pca = pca_pose(scene.cloud, c);
      o["pose"] = pose_json(pca.pose);
      o["extents"] = vec(pca.extents);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateCluster) throw;
      o["pose"] = nullptr;
      o["error"] = to_string(e.code());
    }
    const auto a = scores_for(s3, k, n, ScoreSource::ThreeD);
    const auto b = scores_for(s2, k, n, ScoreSource::TwoD);
    if (a.has_value() != b.has_value())
      fail(ErrorCode::InvalidArgument, "classification needs both 3D and 2D scores");
    if (a && b) {
      const ObjectScores& sa = *a;
      const ObjectScores& sb = *b;
      Inventory inv;
      if (inventory) {
        inv = *inventory;
      } else {
        for (const auto& [l, v] : sa.scores) inv.insert(l);
        for (const auto& [l, v] : sb.scores) inv.insert(l);
      }
      try {
        const FusionResult f = fuse(sa, sb, inv);
        o["label"] = f.label;
        o["confidence"] = f.confidence;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NoAdmissibleLabel) throw;
        o["label"] = nullptr;
        o["confidence"] = 0.0;
        o["label_error"] = to_string(e.code());
      }
    }
    objects.push_back(std::move(o));
  }
  out["objects"] = objects;
  return out.dump(2) + "\n";
}

std::string place(const PointCloud& cloud, const std::string& config_json, const std::string& chain_json) {
  const json cfg = config_or_empty(config_json, "placement config");
  const WorkstationModel model = workstation_model(cloud, perception_from_json(cfg.value("perception", json())));
  PlacementSamplingParams sp;
  if (cfg.contains("sampling")) {
    const json& s = cfg["sampling"];
    sp.d_min = get_or(s, "d_min", sp.d_min);
    sp.footprint = get_or(s, "footprint", sp.footprint);
    sp.n = get_or(s, "n", sp.n);
    sp.max_attempts = get_or(s, "max_attempts", sp.max_attempts);
    sp.rng_seed = get_or(s, "seed", sp.rng_seed);
  }
  PlacementRankingParams rp;
  if (cfg.contains("ranking")) {
    rp.approach_height = get_or(cfg["ranking"], "approach_height", rp.approach_height);
    rp.ik = ik_from_json(cfg["ranking"].value("ik", json()));
  }
  const KinematicChain chain = chain_json.empty() ? example_chain() : chain_from_json(chain_json);
  const Point3 middle = chain.base.isometry().inverse() * model.polygon.basis.origin;
  const JointVector q0 = joints_from_json(cfg.value("q0", json()), ready_seed(chain, middle));

  const auto candidates = sample_placements(model.polygon, model.obstacles, sp);
  const auto ranked = rank_placements(chain, candidates, q0, rp);
  json out = json::array();
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    json p = pose_json(ranked[i].pose);
    p["rank"] = i;
    p["uv"] = {ranked[i].uv.x(), ranked[i].uv.y()};
    p["clearance"] = ranked[i].clearance;
    p["reach_score"] = ranked[i].reach_score;
    out.push_back(std::move(p));
  }
  return out.dump(2) + "\n";
}

std::string grasp(const std::string& chain_json, const std::string& pose_json_text, double object_height,
                  const std::string& config_json) {
  const json cfg = config_or_empty(config_json, "grasp config");
  const KinematicChain chain = chain_json.empty() ? example_chain() : chain_from_json(chain_json);
  const auto v = parse_json(pose_json_text, "object pose").get<std::vector<double>>();
  if (v.size() != 3 && v.size() != 7) fail(ErrorCode::ParseError, "object pose needs 3 or 7 numbers");
  Pose object;
  object.position = Point3(v[0], v[1], v[2]);
  if (v.size() == 7) {
    object.orientation = Eigen::Quaterniond(v[3], v[4], v[5], v[6]);
    if (!(object.orientation.norm() > 1e-9)) fail(ErrorCode::InvalidArgument, "object orientation is not a quaternion");
    object.orientation.normalize();
  }
  if (!(object_height > 0)) fail(ErrorCode::InvalidArgument, "object height must be positive");

  const double threshold = get_or(cfg, "frontal_height", 0.06);
  const double offset = get_or(cfg, "offset", 0.05);
  const std::size_t samples = get_or<std::size_t>(cfg, "samples", 9);
  const double spread = deg2rad(get_or(cfg, "spread_deg", 90.0));
  const IkParams ik = ik_from_json(cfg.value("ik", json()));

  const Approach approach = decide_approach(object_height, threshold);
  const auto candidates = sample_pregrasp(object, approach, offset, samples, spread, chain.base.position);
  std::vector<JointVector> seeds;
  if (cfg.contains("q0")) {
    seeds.push_back(joints_from_json(cfg["q0"], JointVector::Zero()));
  } else {
    const Point3 local = chain.base.isometry().inverse() * object.position;
    seeds.push_back(approach == Approach::Top ? ready_seed(chain, local) : frontal_seed(chain, local));
    seeds.push_back(approach == Approach::Top ? frontal_seed(chain, local) : ready_seed(chain, local));
  }
  std::optional<ReachableGrasp> found;
  for (const auto& q0 : seeds) {
    try {
      found = select_reachable(chain, candidates, q0, ik);
      break;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoReachableCandidate || &q0 == &seeds.back()) throw;
    }
  }
  const ReachableGrasp& g = *found;
  json out;
  out["approach"] = to_string(approach);
  out["candidate_index"] = g.index;
  out["candidates"] = candidates.size();
  out["pregrasp"] = pose_json(g.candidate.pregrasp_pose);
  out["yaw"] = g.candidate.yaw;
  out["score"] = g.candidate.score;
  out["joints"] = joints_json(g.ik.q);
  out["ik"] = {{"iterations", g.ik.iterations}, {"pos_error", g.ik.pos_error}, {"ang_error", g.ik.ang_error}};
  return out.dump(2) + "\n";
}

// ---------------------------------------------------------------------------

namespace {

struct AssociationStats {
  std::size_t detections = 0;
  std::size_t id_switches = 0;
  std::size_t correct = 0;
};

// (gt, track) per detection in stream order.
AssociationStats association_stats(const std::vector<std::pair<int, int>>& pairs) {
  AssociationStats st;
  std::map<int, int> last;
  std::map<int, std::map<int, std::size_t>> counts;
  for (const auto& [gt, tr] : pairs) {
    ++st.detections;
    auto it = last.find(gt);
    if (it != last.end() && it->second != tr) ++st.id_switches;
    last[gt] = tr;
    ++counts[gt][tr];
  }
  for (const auto& [gt, per] : counts) {
    std::size_t best = 0;
    for (const auto& [tr, c] : per) best = std::max(best, c);
    st.correct += best;
  }
  return st;
}

std::optional<double> median_omega(const std::vector<Track3D>& tracks, std::size_t min_samples) {
  std::vector<double> est;
  for (const auto& t : tracks) {
    if (t.history.size() < min_samples) continue;
    try {
      est.push_back(estimate_motion(t).omega);
    } catch (const Error&) {
      // too short or degenerate; skipped
    }
  }
  if (est.empty()) return std::nullopt;
  std::sort(est.begin(), est.end());
  const std::size_t m = est.size() / 2;
  return est.size() % 2 ? est[m] : 0.5 * (est[m - 1] + est[m]);
}

RttScenario load_rtt(const std::string& scenario_json, std::optional<std::uint64_t> seed) {
  RttScenario s = rtt_from_json(scenario_json.empty() ? default_rtt_scenario() : scenario_json);
  if (seed) s.seed = *seed;
  return s;
}

}  // namespace

std::string default_rtt_scenario() {
  RttScenario s;
  s.objects = {{"a", 0.0}, {"b", kTwoPi / 3}, {"c", 2 * kTwoPi / 3}};
  s.noise_m = 0.002;
  s.noise_px = 2.0;
  return rtt_to_json(s);
}

RttOutput rtt(const std::string& scenario_json, const std::string& tracker, std::optional<std::uint64_t> seed) {
  if (tracker != "sort" && tracker != "nn") fail(ErrorCode::InvalidArgument, "tracker must be sort or nn");
  const RttScenario s = load_rtt(scenario_json, seed);
  const RttStream stream = gen_rtt_stream(s);

  std::vector<std::pair<int, int>> pairs;
  std::vector<Track3D> metric_tracks;
  std::string tracks = tracker == "sort" ? "t,track_id,cx,cy,w,h\n" : "t,track_id,x,y,z\n";
  std::size_t n_tracks = 0;

  if (tracker == "sort") {
    SortConfig cfg;
    cfg.dt = 1.0 / s.rate;
    SortTracker sort(cfg);
    std::map<int, Track3D> hist;
    for (const auto& frame : stream.detections) {
      const SortStepResult r = sort.step(frame);
      n_tracks += r.new_ids.size();
      for (std::size_t i = 0; i < frame.size(); ++i) {
        const int id = r.detection_track[i];
        pairs.emplace_back(frame[i].gt_id, id);
        // Back-project the detection center onto the table plane.
        const Point3 p(s.table_center.x() + (frame[i].box.cx - s.image_center.x()) / s.ppm,
                       s.table_center.y() + (frame[i].box.cy - s.image_center.y()) / s.ppm, s.table_height);
        hist[id].id = id;
        hist[id].history.push_back({frame[i].t, p});
        for (const auto& t : sort.tracks()) {
          if (t.id != id || !sort.confirmed(t)) continue;
          const Box2D b = t.box();
          tracks += num(frame[i].t) + "," + std::to_string(id) + "," + num(b.cx) + "," + num(b.cy) + "," + num(b.w) +
                    "," + num(b.h) + "\n";
        }
      }
    }
    for (auto& [id, t] : hist) metric_tracks.push_back(std::move(t));
  } else {
    NnTracker3D nn(s.gate);
    for (const auto& frame : stream.points) {
      std::vector<TimedPoint> pts;
      for (const auto& p : frame) pts.push_back({p.t, p.p});
      const auto before = nn.tracks().size();
      const std::vector<int> ids = nn.step(pts);
      n_tracks += nn.tracks().size() - before;
      for (std::size_t i = 0; i < frame.size(); ++i) {
        pairs.emplace_back(frame[i].gt_id, ids[i]);
        tracks += num(frame[i].t) + "," + std::to_string(ids[i]) + "," + num(frame[i].p.x()) + "," +
                  num(frame[i].p.y()) + "," + num(frame[i].p.z()) + "\n";
      }
    }
    metric_tracks = nn.tracks();
  }

  const AssociationStats st = association_stats(pairs);
  RttOutput out;
  out.metrics_csv = "metric,value\n";
  auto row = [&](const char* k, const std::string& v) { out.metrics_csv += std::string(k) + "," + v + "\n"; };
  row("tracker", tracker);
  row("frames", std::to_string(s.frames()));
  row("detections", std::to_string(st.detections));
  row("tracks_created", std::to_string(n_tracks));
  row("id_switches", std::to_string(st.id_switches));
  row("association_accuracy", num(st.detections ? static_cast<double>(st.correct) / st.detections : 1.0));
  row("omega_true", num(s.omega));
  if (const auto w = median_omega(metric_tracks, 10)) {
    row("omega_est", num(*w));
    if (s.omega != 0.0) row("omega_rel_error", num(std::abs(*w - s.omega) / std::abs(s.omega)));
  }
  out.tracks_csv = std::move(tracks);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

DwaConfig dwa_config_from_json(const json& j) {
  DwaConfig c;
  if (j.is_null()) return c;
  c.v_max = get_or(j, "v_max", c.v_max);
  c.v_min = get_or(j, "v_min", c.v_min);
  c.omega_max = get_or(j, "omega_max", c.omega_max);
  c.ax = get_or(j, "ax", c.ax);
  c.ay = get_or(j, "ay", c.ay);
  c.aomega = get_or(j, "aomega", c.aomega);
  c.dt = get_or(j, "dt", c.dt);
  c.horizon = get_or(j, "horizon", c.horizon);
  c.samples_vx = get_or(j, "samples_vx", c.samples_vx);
  c.samples_vy = get_or(j, "samples_vy", c.samples_vy);
  c.samples_omega = get_or(j, "samples_omega", c.samples_omega);
  c.w_goal = get_or(j, "w_goal", c.w_goal);
  c.w_obs = get_or(j, "w_obs", c.w_obs);
  c.w_vel = get_or(j, "w_vel", c.w_vel);
  c.robot_radius = get_or(j, "robot_radius", c.robot_radius);
  c.epsilon = get_or(j, "epsilon", c.epsilon);
  c.validate();
  return c;
}

MapScenario map_from_json(const json& j) {
  MapScenario m;
  if (j.is_null()) return m;
  m.width = get_or(j, "width", m.width);
  m.height = get_or(j, "height", m.height);
  m.resolution = get_or(j, "resolution", m.resolution);
  m.density = get_or(j, "density", m.density);
  m.block = get_or(j, "block", m.block);
  m.clear_radius = get_or(j, "clear_radius", m.clear_radius);
  m.seed = get_or(j, "seed", m.seed);
  return m;
}

}  // namespace

DwaOutput dwa(const std::string& scenario_json, const OccupancyGrid* grid, std::optional<std::uint64_t> seed) {
  const json j = config_or_empty(scenario_json, "dwa scenario");
  const auto start = get_or<std::vector<double>>(j, "start", {1.0, 1.0, 0.0});
  const auto goal = get_or<std::vector<double>>(j, "goal", {6.0, 1.0});
  if (start.size() != 3) fail(ErrorCode::ParseError, "start must be [x, y, theta]");
  if (goal.size() != 2) fail(ErrorCode::ParseError, "goal must be [x, y]");
  const int max_steps = get_or(j, "max_steps", 300);
  const double tol = get_or(j, "goal_tolerance", 0.2);
  const DwaConfig cfg = dwa_config_from_json(j.value("config", json()));

  OccupancyGrid generated;
  if (!grid) {
    MapScenario m = map_from_json(j.value("random", json()));
    if (seed) m.seed = *seed;
    m.keep_clear = {Vec2(start[0], start[1]), Vec2(goal[0], goal[1])};
    generated = random_map(m);
    grid = &generated;
  }
  RobotState s0;
  s0.x = start[0];
  s0.y = start[1];
  s0.theta = start[2];
  const EpisodeResult ep = run_episode(*grid, s0, Vec2(goal[0], goal[1]), cfg, max_steps, tol);

  DwaOutput out;
  out.poses_csv = "step,t,x,y,theta,vx,vy,omega,clearance\n";
  double min_clear = std::numeric_limits<double>::infinity();
  for (const auto& st : ep.steps) {
    out.poses_csv += std::to_string(st.step) + "," + num((st.step + 1) * cfg.dt) + "," + num(st.state.x) + "," +
                     num(st.state.y) + "," + num(st.state.theta) + "," + num(st.cmd.vx) + "," + num(st.cmd.vy) + "," +
                     num(st.cmd.omega) + "," + num(st.clearance) + "\n";
    min_clear = std::min(min_clear, st.clearance);
  }
  json summary = {{"steps", ep.steps.size()},
                  {"reached", ep.reached},
                  {"blocked", ep.blocked},
                  {"final_distance", ep.final_distance}};
  summary["min_clearance"] = ep.steps.empty() ? json(nullptr) : json(min_clear);
  out.summary_json = summary.dump(2) + "\n";
  return out;
}

// ---------------------------------------------------------------------------

std::string plan(const std::string& domain_pddl, const std::string& problem_pddl, const std::string& mode) {
  const pddl::DomainDef d = pddl::parse_domain(domain_pddl);
  const pddl::ProblemDef p = pddl::parse_problem(problem_pddl, d);
  return pddl::format_plan(pddl::plan(d, p, pddl::parse_plan_mode(mode)));
}

std::string execute(const std::string& domain_pddl, const std::string& problem_pddl, const std::string& bindings_json,
                    const std::string& faults_json, int max_replans, const std::string& mode) {
  const pddl::DomainDef d = pddl::parse_domain(domain_pddl);
  const pddl::ProblemDef p = pddl::parse_problem(problem_pddl, d);

  std::map<std::string, ActionBinding> bindings;
  if (!bindings_json.empty()) {
    const json j = parse_json(bindings_json, "bindings");
    if (!j.is_object()) fail(ErrorCode::ParseError, "bindings must be an object keyed by action name");
    for (auto it = j.begin(); it != j.end(); ++it) {
      std::vector<ComponentStatus> script;
      for (const auto& s : it.value().value("script", json::array())) script.push_back(parse_status(s.get<std::string>()));
      bindings[it.key()] = make_binding(d, it.key(), std::move(script), it.value().value("failure_effects", ""));
    }
  }
  // Actions without an explicit binding always succeed.
  for (const auto& a : d.actions)
    if (!bindings.count(a.name)) bindings[a.name] = make_binding(d, a.name);

  FaultScript faults;
  if (!faults_json.empty()) {
    const json j = parse_json(faults_json, "fault script");
    if (!j.is_object()) fail(ErrorCode::ParseError, "fault script must map step indices to statuses");
    for (auto it = j.begin(); it != j.end(); ++it) {
      std::size_t used = 0;
      int step = -1;
      try {
        step = std::stoi(it.key(), &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != it.key().size() || step < 0) fail(ErrorCode::ParseError, "fault script key '" + it.key() + "' is not a step index");
      if (!it.value().is_string()) fail(ErrorCode::ParseError, "fault script values must be status strings");
      faults[step] = parse_status(it.value().get<std::string>());
    }
  }

  ExecutionOptions opts;
  opts.max_replans = max_replans;
  opts.mode = pddl::parse_plan_mode(mode);
  const ExecutionTrace trace = mobman::execute(d, p, bindings, faults, opts);

  std::string out;
  for (const auto& r : trace.records) {
    json added = json::array(), removed = json::array();
    for (const auto& a : r.added) added.push_back(pddl::to_string(a));
    for (const auto& a : r.removed) removed.push_back(pddl::to_string(a));
    const json line = {{"step", r.step},       {"action", r.action},   {"status", to_string(r.status)},
                       {"kb_size", r.kb_size}, {"replans", r.replans}, {"added", added},
                       {"removed", removed}};
    out += line.dump() + "\n";
  }
  json summary = {{"outcome", to_string(trace.outcome)},
                  {"plan_attempts", trace.plan_attempts},
                  {"replans", trace.replans},
                  {"goal_reached", pddl::satisfies(trace.final_kb, p.goal)}};
  if (!trace.message.empty()) summary["message"] = trace.message;
  out += summary.dump() + "\n";
  return out;
}

// ---------------------------------------------------------------------------

GeneratedWorkstation gen_workstation(const std::string& scenario_json, std::optional<std::uint64_t> seed) {
  WorkstationScenario s;
  if (scenario_json.empty()) {
    s = random_workstation(seed.value_or(0), 0.002, 0.1);
  } else {
    s = workstation_from_json(scenario_json);
    if (seed) s.seed = *seed;
  }
  const WorkstationSample w = mobman::gen_workstation(s);
  return {format_ply(w.cloud), truth_to_json(w.truth), workstation_to_json(s)};
}

GeneratedRtt gen_rtt(const std::string& scenario_json, std::optional<std::uint64_t> seed) {
  const RttScenario s = load_rtt(scenario_json, seed);
  const RttStream stream = gen_rtt_stream(s);
  GeneratedRtt out;
  for (const auto& frame : stream.detections)
    for (const auto& d : frame) {
      const json j = {{"t", d.t}, {"cx", d.box.cx}, {"cy", d.box.cy}, {"w", d.box.w},
                      {"h", d.box.h}, {"score", d.score}, {"gt_id", d.gt_id}};
      out.detections_jsonl += j.dump() + "\n";
    }
  for (const auto& frame : stream.points)
    for (const auto& p : frame) {
      const json j = {{"t", p.t}, {"x", p.p.x()}, {"y", p.p.y()}, {"z", p.p.z()}, {"gt_id", p.gt_id}};
      out.points_jsonl += j.dump() + "\n";
    }
  out.truth_csv = "t,gt_id,x,y,z\n";
  for (const auto& p : stream.truth)
    out.truth_csv += num(p.t) + "," + std::to_string(p.gt_id) + "," + num(p.p.x()) + "," + num(p.p.y()) + "," +
                     num(p.p.z()) + "\n";
  return out;
}

GeneratedMap gen_map(const std::string& scenario_json, std::optional<std::uint64_t> seed) {
  const json j = config_or_empty(scenario_json, "map scenario");
  MapScenario m = map_from_json(j.contains("random") ? j["random"] : j);
  if (seed) m.seed = *seed;
  for (const char* key : {"start", "goal"}) {
    if (!j.contains(key)) continue;
    const auto v = j[key].get<std::vector<double>>();
    if (v.size() < 2) fail(ErrorCode::ParseError, std::string(key) + " needs x and y");
    m.keep_clear.emplace_back(v[0], v[1]);
  }
  const OccupancyGrid g = random_map(m);
  return {format_pgm(g), format_grid_meta(g)};
}

}  // namespace mobman::pipelines
