// Command-line front end. Talks to the toolkit only through the C API.

#include "mobman/mobman.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPipeline = 1;
constexpr int kExitUsage = 2;

struct PipelineFailure {
  mm_status status;
  std::string message;
};

struct UsageFailure {
  std::string message;
};

// out.pgm -> out.json, scene.ply -> scene.truth.json
std::string sibling(const std::string& out, const std::string& suffix) {
  std::filesystem::path p(out);
  p.replace_extension();
  return p.string() + suffix;
}

void check(mm_status s) {
  if (s != MM_OK) throw PipelineFailure{s, mm_last_error()};
}

struct Owned {
  char* p = nullptr;
  ~Owned() { mm_string_free(p); }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw PipelineFailure{MM_IO_ERROR, "cannot open " + path};
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string read_opt(const std::string& path) { return path.empty() ? std::string() : read_file(path); }

const char* c_or_null(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

void emit(const std::string& path, const std::string& data) {
  if (path.empty()) {
    std::cout << data;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw PipelineFailure{MM_IO_ERROR, "cannot write " + path};
  f << data;
  if (!f.flush()) throw PipelineFailure{MM_IO_ERROR, "write failed for " + path};
}

int64_t seed_arg(const std::optional<int64_t>& seed) {
  if (!seed) return -1;
  if (*seed < 0) throw UsageFailure{"--seed must be non-negative"};
  return *seed;
}

struct CloudHandle {
  mm_cloud* c = nullptr;
  ~CloudHandle() { mm_cloud_free(c); }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Perception, manipulation, navigation and task-planning toolkit"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  // perceive
  std::string cloud_path, config_path, scores3d_path, scores2d_path, inventory_path, out_path;
  auto* perceive = app.add_subcommand("perceive", "Segment the table, cluster and classify objects");
  perceive->add_option("--cloud", cloud_path, "ASCII PLY cloud")->required()->check(CLI::ExistingFile);
  perceive->add_option("--config", config_path, "Perception config JSON")->check(CLI::ExistingFile);
  perceive->add_option("--scores3d", scores3d_path, "3D classifier scores JSON")->check(CLI::ExistingFile);
  perceive->add_option("--scores2d", scores2d_path, "2D classifier scores JSON")->check(CLI::ExistingFile);
  perceive->add_option("--inventory", inventory_path, "Inventory label array JSON")->check(CLI::ExistingFile);
  perceive->add_option("--out", out_path, "Output JSON (default stdout)");

  // place
  std::string chain_path;
  auto* place = app.add_subcommand("place", "Rank empty-space placements on the table");
  place->add_option("--cloud", cloud_path, "ASCII PLY cloud")->required()->check(CLI::ExistingFile);
  place->add_option("--config", config_path, "Placement config JSON")->check(CLI::ExistingFile);
  place->add_option("--chain", chain_path, "Arm chain JSON (default: bundled arm)")->check(CLI::ExistingFile);
  place->add_option("--out", out_path, "Output JSON (default stdout)");

  // grasp
  std::string pose_text;
  double height = 0.0;
  auto* grasp = app.add_subcommand("grasp", "Choose a reachable pre-grasp pose");
  grasp->add_option("--chain", chain_path, "Arm chain JSON (default: bundled arm)")->check(CLI::ExistingFile);
  grasp->add_option("--pose", pose_text, "Object pose x,y,z[,qw,qx,qy,qz]")->required();
  grasp->add_option("--height", height, "Object height in meters")->required();
  grasp->add_option("--config", config_path, "Grasp config JSON")->check(CLI::ExistingFile);
  grasp->add_option("--out", out_path, "Output JSON (default stdout)");

  // rtt
  std::string scenario_path, tracker = "sort", tracks_path;
  std::optional<int64_t> seed;
  auto* rtt = app.add_subcommand("rtt", "Track a simulated rotating table and report metrics");
  rtt->add_option("--scenario", scenario_path, "Rotating-table scenario JSON")->check(CLI::ExistingFile);
  rtt->add_option("--tracker", tracker, "sort or nn")->check(CLI::IsMember({"sort", "nn"}));
  rtt->add_option("--seed", seed, "Override the scenario seed");
  rtt->add_option("--out", out_path, "Metrics CSV (default stdout)");
  rtt->add_option("--tracks", tracks_path, "Track CSV");

  // dwa
  std::string map_path, meta_path, summary_path;
  auto* dwa = app.add_subcommand("dwa", "Run a closed-loop dynamic-window episode");
  dwa->add_option("--scenario", scenario_path, "Episode JSON")->check(CLI::ExistingFile);
  dwa->add_option("--map", map_path, "Occupancy grid PGM")->check(CLI::ExistingFile);
  dwa->add_option("--meta", meta_path, "Grid sidecar JSON")->check(CLI::ExistingFile);
  dwa->add_option("--seed", seed, "Override the random map seed");
  dwa->add_option("--out", out_path, "Pose log CSV (default stdout)");
  dwa->add_option("--summary", summary_path, "Episode summary JSON");

  // plan
  std::string domain_path, problem_path, mode;
  auto* plan = app.add_subcommand("plan", "Plan with the PDDL subset");
  plan->add_option("--domain", domain_path, "Domain PDDL")->required()->check(CLI::ExistingFile);
  plan->add_option("--problem", problem_path, "Problem PDDL")->required()->check(CLI::ExistingFile);
  plan->add_option("--mode", mode, "optimal or greedy")->check(CLI::IsMember({"optimal", "greedy"}));
  plan->add_option("--out", out_path, "Plan file (default stdout)");

  // exec
  std::string bindings_path, faults_path;
  int max_replans = 3;
  auto* exec = app.add_subcommand("exec", "Execute a plan with failure-triggered replanning");
  exec->add_option("--domain", domain_path, "Domain PDDL")->required()->check(CLI::ExistingFile);
  exec->add_option("--problem", problem_path, "Problem PDDL")->required()->check(CLI::ExistingFile);
  exec->add_option("--bindings", bindings_path, "Action bindings JSON")->check(CLI::ExistingFile);
  exec->add_option("--faults", faults_path, "Fault script JSON")->check(CLI::ExistingFile);
  exec->add_option("--max-replans", max_replans, "Replan budget")->check(CLI::NonNegativeNumber);
  exec->add_option("--mode", mode, "optimal or greedy")->check(CLI::IsMember({"optimal", "greedy"}));
  exec->add_option("--out", out_path, "Trace JSONL (default stdout)");

  // gen
  std::string kind, truth_path, points_path;
  auto* gen = app.add_subcommand("gen", "Generate scenario data with ground truth");
  gen->add_option("--kind", kind, "workstation, rtt or map")
      ->required()
      ->check(CLI::IsMember({"workstation", "rtt", "map"}));
  gen->add_option("--scenario", scenario_path, "Scenario JSON")->check(CLI::ExistingFile);
  gen->add_option("--seed", seed, "Override the scenario seed");
  gen->add_option("--out", out_path, "Primary output (PLY, detections JSONL or PGM)")->required();
  gen->add_option("--truth", truth_path, "Ground truth output (default <stem>.truth.json/.csv)");
  gen->add_option("--points", points_path, "rtt: 3D point stream (default <stem>.points.jsonl)");
  gen->add_option("--meta", meta_path, "map: grid sidecar (default <stem>.json)");

  if (argc > 1 && argv[1][0] != '-') {
    const std::string name = argv[1];
    const auto subs = app.get_subcommands([&](CLI::App* s) { return s->get_name() == name; });
    if (subs.empty()) {
      std::cerr << "usage error: unknown subcommand '" << name << "'\n"
                << "run with --help for usage\n";
      return kExitUsage;
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n" << "run with --help for usage\n";
    return kExitUsage;
  }

  try {
    if (*perceive) {
      CloudHandle cloud;
      check(mm_cloud_read_ply(cloud_path.c_str(), &cloud.c));
      const std::string cfg = read_opt(config_path), s3 = read_opt(scores3d_path), s2 = read_opt(scores2d_path),
                        inv = read_opt(inventory_path);
      Owned out;
      check(mm_perceive(cloud.c, c_or_null(cfg), c_or_null(s3), c_or_null(s2), c_or_null(inv), &out.p));
      emit(out_path, out.str());
    } else if (*place) {
      CloudHandle cloud;
      check(mm_cloud_read_ply(cloud_path.c_str(), &cloud.c));
      const std::string cfg = read_opt(config_path), chain = read_opt(chain_path);
      Owned out;
      check(mm_place(cloud.c, c_or_null(cfg), c_or_null(chain), &out.p));
      emit(out_path, out.str());
    } else if (*grasp) {
      const std::string cfg = read_opt(config_path), chain = read_opt(chain_path);
      const std::string pose = "[" + pose_text + "]";
      if (!nlohmann::json::accept(pose)) throw UsageFailure{"--pose must be comma-separated numbers"};
      Owned out;
      check(mm_grasp(c_or_null(chain), pose.c_str(), height, c_or_null(cfg), &out.p));
      emit(out_path, out.str());
    } else if (*rtt) {
      const std::string scenario = read_opt(scenario_path);
      Owned metrics, tracks;
      check(mm_rtt_run(c_or_null(scenario), tracker.c_str(), seed_arg(seed), &metrics.p, &tracks.p));
      emit(out_path, metrics.str());
      if (!tracks_path.empty()) emit(tracks_path, tracks.str());
    } else if (*dwa) {
      if (map_path.empty() != meta_path.empty()) throw UsageFailure{"--map and --meta must be given together"};
      const std::string scenario = read_opt(scenario_path);
      Owned poses, summary;
      check(mm_dwa_run(c_or_null(scenario), c_or_null(map_path), c_or_null(meta_path), seed_arg(seed), &poses.p,
                       &summary.p));
      emit(out_path, poses.str());
      if (!summary_path.empty())
        emit(summary_path, summary.str());
      else if (!out_path.empty())
        std::cout << summary.str();
    } else if (*plan) {
      const std::string domain = read_file(domain_path), problem = read_file(problem_path);
      mm_planner* planner = nullptr;
      check(mm_planner_create(domain.c_str(), problem.c_str(), &planner));
      std::unique_ptr<mm_planner, void (*)(mm_planner*)> guard(planner, mm_planner_free);
      Owned out;
      check(mm_planner_plan(planner, mode.empty() ? "optimal" : mode.c_str(), &out.p));
      emit(out_path, out.str());
    } else if (*exec) {
      const std::string domain = read_file(domain_path), problem = read_file(problem_path);
      const std::string bindings = read_opt(bindings_path), faults = read_opt(faults_path);
      Owned out;
      check(mm_execute(domain.c_str(), problem.c_str(), c_or_null(bindings), c_or_null(faults), max_replans,
                       mode.empty() ? "greedy" : mode.c_str(), &out.p));
      emit(out_path, out.str());
    } else if (*gen) {
      const std::string scenario = read_opt(scenario_path);
      if (kind == "workstation") {
        Owned ply, truth;
        check(mm_gen_workstation(c_or_null(scenario), seed_arg(seed), &ply.p, &truth.p, nullptr));
        emit(out_path, ply.str());
        emit(truth_path.empty() ? sibling(out_path, ".truth.json") : truth_path, truth.str());
      } else if (kind == "rtt") {
        Owned dets, points, truth;
        check(mm_gen_rtt(c_or_null(scenario), seed_arg(seed), &dets.p, &points.p, &truth.p));
        emit(out_path, dets.str());
        emit(points_path.empty() ? sibling(out_path, ".points.jsonl") : points_path, points.str());
        emit(truth_path.empty() ? sibling(out_path, ".truth.csv") : truth_path, truth.str());
      } else {
        Owned pgm, meta;
        check(mm_gen_map(c_or_null(scenario), seed_arg(seed), &pgm.p, &meta.p));
        emit(out_path, pgm.str());
        emit(meta_path.empty() ? sibling(out_path, ".json") : meta_path, meta.str());
      }
    }
  } catch (const UsageFailure& u) {
    std::cerr << "usage error: " << u.message << "\n";
    return kExitUsage;
  } catch (const PipelineFailure& f) {
    const nlohmann::json err = {{"error", mm_status_name(f.status)}, {"code", static_cast<int>(f.status)},
                                {"message", f.message}};
    std::cerr << err.dump() << "\n";
    return kExitPipeline;
  }
  return kExitOk;
}
