#pragma once

// Text-in, text-out pipelines behind the CLI subcommands and the C API.
// Optional JSON inputs are passed as empty strings when absent. Every output
// is a deterministic function of the inputs.

#include "mobman/cloud.hpp"
#include "mobman/dwa.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace mobman::pipelines {

/// Plane, support polygon and one hypothesis per cluster as JSON. Scores are
/// a {"label": score} map applied to every cluster or an array of such maps,
/// one per cluster; the inventory is a JSON string array.
std::string perceive(const PointCloud& cloud, const std::string& config_json, const std::string& scores3d_json,
                     const std::string& scores2d_json, const std::string& inventory_json);

/// Ranked placements as a JSON array. Uses the bundled arm when chain_json
/// is empty.
std::string place(const PointCloud& cloud, const std::string& config_json, const std::string& chain_json);

/// Chosen pre-grasp candidate and joint solution as JSON. `pose` is
/// [x, y, z] or [x, y, z, qw, qx, qy, qz].
std::string grasp(const std::string& chain_json, const std::string& pose_json, double object_height,
                  const std::string& config_json);

struct RttOutput {
  std::string metrics_csv;  // metric,value
  std::string tracks_csv;
};

/// tracker is "sort" (2D detections) or "nn" (3D points).
RttOutput rtt(const std::string& scenario_json, const std::string& tracker, std::optional<std::uint64_t> seed = {});

struct DwaOutput {
  std::string poses_csv;
  std::string summary_json;
};

/// Closed-loop episode. The map comes from `grid` when given, otherwise from
/// the scenario's "random" block.
DwaOutput dwa(const std::string& scenario_json, const OccupancyGrid* grid, std::optional<std::uint64_t> seed = {});

/// Plan text: one "(action args)" per line and a final "; cost = N".
std::string plan(const std::string& domain_pddl, const std::string& problem_pddl, const std::string& mode);

/// JSON Lines trace, one record per executed step plus a closing summary.
std::string execute(const std::string& domain_pddl, const std::string& problem_pddl, const std::string& bindings_json,
                    const std::string& faults_json, int max_replans, const std::string& mode);

struct GeneratedWorkstation {
  std::string ply;
  std::string truth_json;
  std::string scenario_json;  // the scenario actually used
};

/// From a scenario file, or a random scene (2 mm noise, 10% outliers) when
/// scenario_json is empty.
GeneratedWorkstation gen_workstation(const std::string& scenario_json, std::optional<std::uint64_t> seed = {});

struct GeneratedRtt {
  std::string detections_jsonl;
  std::string points_jsonl;
  std::string truth_csv;
};

GeneratedRtt gen_rtt(const std::string& scenario_json, std::optional<std::uint64_t> seed = {});

struct GeneratedMap {
  std::string pgm;
  std::string meta_json;
};

GeneratedMap gen_map(const std::string& scenario_json, std::optional<std::uint64_t> seed = {});

/// The default three-object rotating-table scenario.
std::string default_rtt_scenario();

}  // namespace mobman::pipelines
