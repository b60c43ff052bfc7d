#include "mobman/mobman.h"

#include "mobman/error.hpp"
#include "mobman/kinematics.hpp"
#include "mobman/pipelines.hpp"
#include "mobman/planner.hpp"
#include "mobman/tracking.hpp"

#include <json.hpp>

#include <cstdlib>
#include <cstring>
#include <new>
#include <optional>
#include <string>

struct mm_cloud {
  mobman::PointCloud cloud;
};

struct mm_chain {
  mobman::KinematicChain chain;
};

struct mm_sort {
  mobman::SortTracker tracker;
  double t = 0.0;
};

struct mm_planner {
  mobman::pddl::DomainDef domain;
  mobman::pddl::ProblemDef problem;
};

namespace {

thread_local std::string g_last_error;

template <class F>
mm_status guard(F&& f) {
  try {
    f();
    g_last_error.clear();
    return MM_OK;
  } catch (const mobman::Error& e) {
    g_last_error = e.what();
    return static_cast<mm_status>(static_cast<int>(e.code()));
  } catch (const nlohmann::json::exception& e) {
    // wrong JSON shape in caller-supplied input
    g_last_error = e.what();
    return MM_PARSE_ERROR;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return MM_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return MM_INTERNAL;
  }
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

std::string opt(const char* s) { return s ? std::string(s) : std::string(); }

void need(const void* p, const char* what) {
  if (!p) mobman::fail(mobman::ErrorCode::InvalidArgument, std::string(what) + " must not be NULL");
}

std::optional<std::uint64_t> seed_of(int64_t seed) {
  if (seed < 0) return std::nullopt;
  return static_cast<std::uint64_t>(seed);
}

mobman::Pose pose_from(const double p[7]) {
  mobman::Pose pose;
  pose.position = mobman::Point3(p[0], p[1], p[2]);
  Eigen::Quaterniond q(p[3], p[4], p[5], p[6]);
  if (!(q.norm() > 1e-9)) mobman::fail(mobman::ErrorCode::InvalidArgument, "target orientation is not a quaternion");
  pose.orientation = q.normalized();
  return pose;
}

}  // namespace

extern "C" {

const char* mm_status_name(mm_status status) {
  if (status == MM_OK) return "Ok";
  if (status == MM_INTERNAL) return "Internal";
  if (status < MM_INVALID_ARGUMENT || status > MM_IO_ERROR) return "Unknown";
  return mobman::to_string(static_cast<mobman::ErrorCode>(status));
}

const char* mm_last_error(void) { return g_last_error.c_str(); }

void mm_string_free(char* s) { std::free(s); }

const char* mm_version(void) { return "1.0.0"; }

mm_status mm_cloud_read_ply(const char* path, mm_cloud** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new mm_cloud{mobman::read_ply(path)};
  });
}

mm_status mm_cloud_parse_ply(const char* text, mm_cloud** out) {
  return guard([&] {
    need(text, "text");
    need(out, "out");
    *out = new mm_cloud{mobman::parse_ply(text)};
  });
}

mm_status mm_cloud_create(const double* xyz, size_t n, mm_cloud** out) {
  return guard([&] {
    if (n > 0) need(xyz, "xyz");
    need(out, "out");
    auto c = std::make_unique<mm_cloud>();
    c->cloud.points.reserve(n);
    for (size_t i = 0; i < n; ++i) c->cloud.points.emplace_back(xyz[3 * i], xyz[3 * i + 1], xyz[3 * i + 2]);
    c->cloud.validate();
    *out = c.release();
  });
}

size_t mm_cloud_size(const mm_cloud* cloud) { return cloud ? cloud->cloud.size() : 0; }

mm_status mm_cloud_write_ply(const mm_cloud* cloud, const char* path) {
  return guard([&] {
    need(cloud, "cloud");
    need(path, "path");
    mobman::write_ply(cloud->cloud, path);
  });
}

void mm_cloud_free(mm_cloud* cloud) { delete cloud; }

mm_status mm_perceive(const mm_cloud* cloud, const char* config_json, const char* scores3d_json,
                      const char* scores2d_json, const char* inventory_json, char** out_json) {
  return guard([&] {
    need(cloud, "cloud");
    need(out_json, "out_json");
    *out_json = dup(mobman::pipelines::perceive(cloud->cloud, opt(config_json), opt(scores3d_json),
                                                opt(scores2d_json), opt(inventory_json)));
  });
}

mm_status mm_place(const mm_cloud* cloud, const char* config_json, const char* chain_json, char** out_json) {
  return guard([&] {
    need(cloud, "cloud");
    need(out_json, "out_json");
    *out_json = dup(mobman::pipelines::place(cloud->cloud, opt(config_json), opt(chain_json)));
  });
}

mm_status mm_chain_from_json(const char* json, mm_chain** out) {
  return guard([&] {
    need(out, "out");
    *out = new mm_chain{json ? mobman::chain_from_json(json) : mobman::example_chain()};
  });
}

mm_status mm_chain_fk(const mm_chain* chain, const double q[5], double pose[7]) {
  return guard([&] {
    need(chain, "chain");
    need(q, "q");
    need(pose, "pose");
    const mobman::JointVector jq = Eigen::Map<const mobman::JointVector>(q);
    const mobman::Pose p = mobman::fk(chain->chain, jq);
    pose[0] = p.position.x();
    pose[1] = p.position.y();
    pose[2] = p.position.z();
    pose[3] = p.orientation.w();
    pose[4] = p.orientation.x();
    pose[5] = p.orientation.y();
    pose[6] = p.orientation.z();
  });
}

mm_status mm_chain_ik(const mm_chain* chain, const double target[7], const double q0[5], double q[5], int* success) {
  return guard([&] {
    need(chain, "chain");
    need(target, "target");
    need(q0, "q0");
    need(q, "q");
    const mobman::IkResult r =
        mobman::ik_dls(chain->chain, pose_from(target), Eigen::Map<const mobman::JointVector>(q0));
    for (Eigen::Index i = 0; i < r.q.size(); ++i) q[i] = r.q[i];
    if (success) *success = r.success ? 1 : 0;
  });
}

void mm_chain_free(mm_chain* chain) { delete chain; }

mm_status mm_grasp(const char* chain_json, const char* pose_json, double object_height, const char* config_json,
                   char** out_json) {
  return guard([&] {
    need(pose_json, "pose_json");
    need(out_json, "out_json");
    *out_json = dup(mobman::pipelines::grasp(opt(chain_json), pose_json, object_height, opt(config_json)));
  });
}

mm_status mm_sort_create(double dt, mm_sort** out) {
  return guard([&] {
    need(out, "out");
    if (!(dt > 0)) mobman::fail(mobman::ErrorCode::InvalidArgument, "dt must be positive");
    mobman::SortConfig cfg;
    cfg.dt = dt;
    *out = new mm_sort{mobman::SortTracker(cfg), 0.0};
  });
}

mm_status mm_sort_step(mm_sort* tracker, const double* boxes, size_t n, int* track_ids) {
  return guard([&] {
    need(tracker, "tracker");
    if (n > 0) {
      need(boxes, "boxes");
      need(track_ids, "track_ids");
    }
    std::vector<mobman::Detection2D> dets(n);
    for (size_t i = 0; i < n; ++i) {
      dets[i].box = {boxes[4 * i], boxes[4 * i + 1], boxes[4 * i + 2], boxes[4 * i + 3]};
      if (!(dets[i].box.w > 0 && dets[i].box.h > 0))
        mobman::fail(mobman::ErrorCode::InvalidArgument, "detection boxes need positive size");
      dets[i].t = tracker->t;
    }
    const auto r = tracker->tracker.step(dets);
    for (size_t i = 0; i < n; ++i) track_ids[i] = r.detection_track[i];
    tracker->t += tracker->tracker.config().dt;
  });
}

size_t mm_sort_track_count(const mm_sort* tracker) { return tracker ? tracker->tracker.tracks().size() : 0; }

void mm_sort_free(mm_sort* tracker) { delete tracker; }

mm_status mm_rtt_run(const char* scenario_json, const char* tracker, int64_t seed, char** metrics_csv,
                     char** tracks_csv) {
  return guard([&] {
    need(tracker, "tracker");
    need(metrics_csv, "metrics_csv");
    const auto r = mobman::pipelines::rtt(opt(scenario_json), tracker, seed_of(seed));
    char* m = dup(r.metrics_csv);
    if (tracks_csv) {
      try {
        *tracks_csv = dup(r.tracks_csv);
      } catch (...) {
        std::free(m);
        throw;
      }
    }
    *metrics_csv = m;
  });
}

mm_status mm_dwa_run(const char* scenario_json, const char* pgm_path, const char* meta_path, int64_t seed,
                     char** poses_csv, char** summary_json) {
  return guard([&] {
    need(poses_csv, "poses_csv");
    if ((pgm_path == nullptr) != (meta_path == nullptr))
      mobman::fail(mobman::ErrorCode::InvalidArgument, "pgm_path and meta_path go together");
    std::optional<mobman::OccupancyGrid> grid;
    if (pgm_path) grid = mobman::read_grid(pgm_path, meta_path);
    const auto r = mobman::pipelines::dwa(opt(scenario_json), grid ? &*grid : nullptr, seed_of(seed));
    char* p = dup(r.poses_csv);
    if (summary_json) {
      try {
        *summary_json = dup(r.summary_json);
      } catch (...) {
        std::free(p);
        throw;
      }
    }
    *poses_csv = p;
  });
}

mm_status mm_planner_create(const char* domain_pddl, const char* problem_pddl, mm_planner** out) {
  return guard([&] {
    need(domain_pddl, "domain_pddl");
    need(problem_pddl, "problem_pddl");
    need(out, "out");
    auto p = std::make_unique<mm_planner>();
    p->domain = mobman::pddl::parse_domain(domain_pddl);
    p->problem = mobman::pddl::parse_problem(problem_pddl, p->domain);
    *out = p.release();
  });
}

mm_status mm_planner_plan(const mm_planner* planner, const char* mode, char** plan_text) {
  return guard([&] {
    need(planner, "planner");
    need(plan_text, "plan_text");
    const auto m = mobman::pddl::parse_plan_mode(mode ? mode : "optimal");
    *plan_text = dup(mobman::pddl::format_plan(mobman::pddl::plan(planner->domain, planner->problem, m)));
  });
}

mm_status mm_planner_validate(const mm_planner* planner, const char* plan_text, int* valid, int* failing_step,
                              char** reason) {
  return guard([&] {
    need(planner, "planner");
    need(plan_text, "plan_text");
    need(valid, "valid");
    const auto v = mobman::pddl::validate(planner->domain, planner->problem, mobman::pddl::parse_plan(plan_text));
    if (reason) *reason = dup(v.reason);
    *valid = v.valid ? 1 : 0;
    if (failing_step) *failing_step = v.failing_step;
  });
}

void mm_planner_free(mm_planner* planner) { delete planner; }

mm_status mm_execute(const char* domain_pddl, const char* problem_pddl, const char* bindings_json,
                     const char* faults_json, int max_replans, const char* mode, char** trace_jsonl) {
  return guard([&] {
    need(domain_pddl, "domain_pddl");
    need(problem_pddl, "problem_pddl");
    need(trace_jsonl, "trace_jsonl");
    *trace_jsonl = dup(mobman::pipelines::execute(domain_pddl, problem_pddl, opt(bindings_json), opt(faults_json),
                                                  max_replans, mode ? mode : "greedy"));
  });
}

mm_status mm_gen_workstation(const char* scenario_json, int64_t seed, char** ply, char** truth_json,
                             char** scenario_out) {
  return guard([&] {
    need(ply, "ply");
    const auto g = mobman::pipelines::gen_workstation(opt(scenario_json), seed_of(seed));
    char* a = dup(g.ply);
    char* b = nullptr;
    char* c = nullptr;
    try {
      if (truth_json) b = dup(g.truth_json);
      if (scenario_out) c = dup(g.scenario_json);
    } catch (...) {
      std::free(a);
      std::free(b);
      throw;
    }
    *ply = a;
    if (truth_json) *truth_json = b;
    if (scenario_out) *scenario_out = c;
  });
}

mm_status mm_gen_rtt(const char* scenario_json, int64_t seed, char** detections_jsonl, char** points_jsonl,
                     char** truth_csv) {
  return guard([&] {
    need(detections_jsonl, "detections_jsonl");
    const auto g = mobman::pipelines::gen_rtt(opt(scenario_json), seed_of(seed));
    char* a = dup(g.detections_jsonl);
    char* b = nullptr;
    char* c = nullptr;
    try {
      if (points_jsonl) b = dup(g.points_jsonl);
      if (truth_csv) c = dup(g.truth_csv);
    } catch (...) {
      std::free(a);
      std::free(b);
      throw;
    }
    *detections_jsonl = a;
    if (points_jsonl) *points_jsonl = b;
    if (truth_csv) *truth_csv = c;
  });
}

mm_status mm_gen_map(const char* scenario_json, int64_t seed, char** pgm, char** meta_json) {
  return guard([&] {
    need(pgm, "pgm");
    const auto g = mobman::pipelines::gen_map(opt(scenario_json), seed_of(seed));
    char* a = dup(g.pgm);
    if (meta_json) {
      try {
        *meta_json = dup(g.meta_json);
      } catch (...) {
        std::free(a);
        throw;
      }
    }
    *pgm = a;
  });
}

}  // extern "C"
