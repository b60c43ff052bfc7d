/* C interface to the mobman toolkit.
 *
 * Every call returns an mm_status. On failure the message of the most recent
 * error on the calling thread is available from mm_last_error(). Strings
 * returned through char** outputs are owned by the caller and released with
 * mm_string_free(). Handles are released with their matching *_free call;
 * passing NULL to any *_free is a no-op.
 */
#ifndef MOBMAN_H
#define MOBMAN_H

#include <stddef.h>
#include <stdint.h>

#if defined(MOBMAN_BUILDING_LIBRARY)
#define MOBMAN_API __attribute__((visibility("default")))
#else
#define MOBMAN_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mm_status {
  MM_OK = 0,
  MM_INVALID_ARGUMENT = 1,
  MM_PARSE_ERROR,
  MM_NON_POSITIVE_LEAF,
  MM_INVERTED_RANGE,
  MM_TOO_FEW_POINTS,
  MM_DEGENERATE_NEIGHBORHOOD,
  MM_NO_ADMISSIBLE_PLANE,
  MM_DEGENERATE_INLIERS,
  MM_INVERTED_HEIGHT_RANGE,
  MM_DEGENERATE_CLUSTER,
  MM_NO_ADMISSIBLE_LABEL,
  MM_NON_MONOTONIC_TIMESTAMP,
  MM_COLLINEAR_POINTS,
  MM_ZERO_TIME_SPAN,
  MM_TABLE_STATIONARY,
  MM_DIMENSION_MISMATCH,
  MM_ROI_OUT_OF_BOUNDS,
  MM_NO_CONVERGENCE,
  MM_NO_REACHABLE_CANDIDATE,
  MM_NO_FREE_SPACE,
  MM_NO_REACHABLE_PLACEMENT,
  MM_TRAJECTORY_LEAVES_MAP,
  MM_NO_ADMISSIBLE_VELOCITY,
  MM_SYNTAX_ERROR,
  MM_UNSUPPORTED_REQUIREMENT,
  MM_ARITY_MISMATCH,
  MM_UNKNOWN_TYPE,
  MM_UNDECLARED_OBJECT,
  MM_UNSOLVABLE,
  MM_UNKNOWN_ACTION,
  MM_REPLAN_BUDGET_EXHAUSTED,
  MM_IO_ERROR,
  MM_INTERNAL = 100
} mm_status;

/* Error name such as "NoFreeSpace"; "Ok" for MM_OK. */
MOBMAN_API const char* mm_status_name(mm_status status);
MOBMAN_API const char* mm_last_error(void);
MOBMAN_API void mm_string_free(char* s);
MOBMAN_API const char* mm_version(void);

/* ---- point clouds ---- */
typedef struct mm_cloud mm_cloud;

MOBMAN_API mm_status mm_cloud_read_ply(const char* path, mm_cloud** out);
MOBMAN_API mm_status mm_cloud_parse_ply(const char* text, mm_cloud** out);
/* xyz holds n interleaved points. */
MOBMAN_API mm_status mm_cloud_create(const double* xyz, size_t n, mm_cloud** out);
MOBMAN_API size_t mm_cloud_size(const mm_cloud* cloud);
MOBMAN_API mm_status mm_cloud_write_ply(const mm_cloud* cloud, const char* path);
MOBMAN_API void mm_cloud_free(mm_cloud* cloud);

/* Optional JSON arguments may be NULL. */
MOBMAN_API mm_status mm_perceive(const mm_cloud* cloud, const char* config_json, const char* scores3d_json,
                                 const char* scores2d_json, const char* inventory_json, char** out_json);
MOBMAN_API mm_status mm_place(const mm_cloud* cloud, const char* config_json, const char* chain_json,
                              char** out_json);

/* ---- arm ---- */
typedef struct mm_chain mm_chain;

/* NULL json selects the bundled 5-DoF arm. */
MOBMAN_API mm_status mm_chain_from_json(const char* json, mm_chain** out);
/* pose: x y z qw qx qy qz */
MOBMAN_API mm_status mm_chain_fk(const mm_chain* chain, const double q[5], double pose[7]);
MOBMAN_API mm_status mm_chain_ik(const mm_chain* chain, const double target[7], const double q0[5], double q[5],
                                 int* success);
MOBMAN_API void mm_chain_free(mm_chain* chain);

/* pose_json: [x, y, z] or [x, y, z, qw, qx, qy, qz]. */
MOBMAN_API mm_status mm_grasp(const char* chain_json, const char* pose_json, double object_height,
                              const char* config_json, char** out_json);

/* ---- tracking ---- */
typedef struct mm_sort mm_sort;

MOBMAN_API mm_status mm_sort_create(double dt, mm_sort** out);
/* boxes holds n rows of cx cy w h; track_ids receives n ids. */
MOBMAN_API mm_status mm_sort_step(mm_sort* tracker, const double* boxes, size_t n, int* track_ids);
MOBMAN_API size_t mm_sort_track_count(const mm_sort* tracker);
MOBMAN_API void mm_sort_free(mm_sort* tracker);

/* seed < 0 keeps the scenario's seed. NULL scenario selects the default one. */
MOBMAN_API mm_status mm_rtt_run(const char* scenario_json, const char* tracker, int64_t seed, char** metrics_csv,
                                char** tracks_csv);

/* ---- navigation ---- */
/* pgm_path/meta_path NULL generates the scenario's random map. */
MOBMAN_API mm_status mm_dwa_run(const char* scenario_json, const char* pgm_path, const char* meta_path, int64_t seed,
                                char** poses_csv, char** summary_json);

/* ---- task planning ---- */
typedef struct mm_planner mm_planner;

MOBMAN_API mm_status mm_planner_create(const char* domain_pddl, const char* problem_pddl, mm_planner** out);
/* mode: "optimal" or "greedy" */
MOBMAN_API mm_status mm_planner_plan(const mm_planner* planner, const char* mode, char** plan_text);
/* failing_step is -1 when the plan runs but leaves the goal unsatisfied. */
MOBMAN_API mm_status mm_planner_validate(const mm_planner* planner, const char* plan_text, int* valid,
                                         int* failing_step, char** reason);
MOBMAN_API void mm_planner_free(mm_planner* planner);

MOBMAN_API mm_status mm_execute(const char* domain_pddl, const char* problem_pddl, const char* bindings_json,
                                const char* faults_json, int max_replans, const char* mode, char** trace_jsonl);

/* ---- scenario generators ---- */
MOBMAN_API mm_status mm_gen_workstation(const char* scenario_json, int64_t seed, char** ply, char** truth_json,
                                        char** scenario_out);
MOBMAN_API mm_status mm_gen_rtt(const char* scenario_json, int64_t seed, char** detections_jsonl,
                                char** points_jsonl, char** truth_csv);
MOBMAN_API mm_status mm_gen_map(const char* scenario_json, int64_t seed, char** pgm, char** meta_json);

#ifdef __cplusplus
}
#endif

#endif /* MOBMAN_H */
