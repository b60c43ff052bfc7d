/* Exercises the shared library through its C header only. */
#include "mobman/mobman.h"

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

static int failures = 0;

#define EXPECT(cond)                                                  \
  do {                                                                \
    if (!(cond)) {                                                    \
      fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                     \
    }                                                                 \
  } while (0)

static char* slurp(const char* rel) {
  char path[1024];
  snprintf(path, sizeof path, "%s/%s", MOBMAN_DATA_DIR, rel);
  FILE* f = fopen(path, "rb");
  if (!f) return NULL;
  fseek(f, 0, SEEK_END);
  long n = ftell(f);
  fseek(f, 0, SEEK_SET);
  char* buf = malloc((size_t)n + 1);
  size_t got = fread(buf, 1, (size_t)n, f);
  buf[got] = '\0';
  fclose(f);
  return buf;
}

static void test_status(void) {
  EXPECT(strcmp(mm_status_name(MM_OK), "Ok") == 0);
  EXPECT(strcmp(mm_status_name(MM_NO_FREE_SPACE), "NoFreeSpace") == 0);
  EXPECT(strcmp(mm_status_name(MM_IO_ERROR), "IoError") == 0);
  EXPECT(mm_version() && mm_version()[0]);
  mm_cloud_free(NULL);
  mm_chain_free(NULL);
  mm_sort_free(NULL);
  mm_planner_free(NULL);
  mm_string_free(NULL);
}

static void test_cloud(void) {
  const double xyz[] = {0, 0, 0, 1, 0, 0, 0, 1, 0};
  mm_cloud* c = NULL;
  EXPECT(mm_cloud_create(xyz, 3, &c) == MM_OK);
  EXPECT(mm_cloud_size(c) == 3);
  mm_cloud_free(c);
  c = NULL;
  EXPECT(mm_cloud_parse_ply("ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\nend_header\n", &c) ==
         MM_PARSE_ERROR);
  EXPECT(c == NULL);
  EXPECT(strlen(mm_last_error()) > 0);
  EXPECT(mm_cloud_read_ply("/nonexistent/cloud.ply", &c) == MM_IO_ERROR);
  EXPECT(mm_cloud_create(NULL, 3, &c) == MM_INVALID_ARGUMENT);
}

static void test_chain(void) {
  mm_chain* arm = NULL;
  EXPECT(mm_chain_from_json(NULL, &arm) == MM_OK);
  const double q[5] = {0.1, 0.3, 0.4, -0.2, 0.5};
  double pose[7];
  EXPECT(mm_chain_fk(arm, q, pose) == MM_OK);
  double sol[5];
  int ok = 0;
  EXPECT(mm_chain_ik(arm, pose, q, sol, &ok) == MM_OK);
  EXPECT(ok == 1);
  double back[7];
  mm_chain_fk(arm, sol, back);
  EXPECT(fabs(back[0] - pose[0]) + fabs(back[1] - pose[1]) + fabs(back[2] - pose[2]) < 1e-3);
  const double far[7] = {10, 0, 0, 1, 0, 0, 0};
  EXPECT(mm_chain_ik(arm, far, q, sol, &ok) == MM_OK);
  EXPECT(ok == 0);
  mm_chain_free(arm);
  arm = NULL;
  EXPECT(mm_chain_from_json("{", &arm) == MM_PARSE_ERROR);
}

static void test_sort(void) {
  mm_sort* t = NULL;
  EXPECT(mm_sort_create(1.0 / 15.0, &t) == MM_OK);
  int ids[1] = {-7};
  for (int k = 0; k < 5; ++k) {
    const double box[4] = {100.0 + 2.0 * k, 100.0, 40.0, 40.0};
    EXPECT(mm_sort_step(t, box, 1, ids) == MM_OK);
    EXPECT(ids[0] == 0);
  }
  EXPECT(mm_sort_track_count(t) == 1);
  const double bad[4] = {0, 0, -1, 1};
  EXPECT(mm_sort_step(t, bad, 1, ids) == MM_INVALID_ARGUMENT);
  mm_sort_free(t);
}

static void test_planner(void) {
  char* domain = slurp("pddl/transport_domain.pddl");
  char* problem = slurp("pddl/p1.pddl");
  EXPECT(domain && problem);
  if (!domain || !problem) return;
  mm_planner* p = NULL;
  EXPECT(mm_planner_create(domain, problem, &p) == MM_OK);
  char* text = NULL;
  EXPECT(mm_planner_plan(p, "optimal", &text) == MM_OK);
  int valid = 0, failing = 0;
  char* reason = NULL;
  EXPECT(mm_planner_validate(p, text, &valid, &failing, &reason) == MM_OK);
  EXPECT(valid == 1);
  mm_string_free(reason);
  mm_string_free(text);
  text = NULL;
  EXPECT(mm_planner_plan(p, "astar", &text) == MM_INVALID_ARGUMENT);
  mm_planner_free(p);

  p = NULL;
  EXPECT(mm_planner_create("(define (domain x) (:requirements :durative-actions))", problem, &p) ==
         MM_UNSUPPORTED_REQUIREMENT);
  EXPECT(strstr(mm_last_error(), "durative-actions") != NULL);

  char* trace = NULL;
  /* budget exhaustion is an outcome recorded in the trace, not an error */
  EXPECT(mm_execute(domain, problem, "{\"grasp-object\": {\"script\": [\"e_failure\"]}}", NULL, 3, "greedy", &trace) ==
         MM_OK);
  EXPECT(trace && strstr(trace, "\"ReplanBudgetExhausted\"") != NULL);
  EXPECT(trace && strstr(trace, "\"plan_attempts\":4") != NULL);
  mm_string_free(trace);
  trace = NULL;
  EXPECT(mm_execute(domain, problem, NULL, NULL, 3, "greedy", &trace) == MM_OK);
  EXPECT(trace && strstr(trace, "place-object") != NULL);
  mm_string_free(trace);
  free(domain);
  free(problem);
}

static void test_generators(void) {
  char *ply = NULL, *truth = NULL, *scenario = NULL;
  EXPECT(mm_gen_workstation(NULL, 3, &ply, &truth, &scenario) == MM_OK);
  mm_cloud* c = NULL;
  EXPECT(mm_cloud_parse_ply(ply, &c) == MM_OK);
  EXPECT(mm_cloud_size(c) > 1000);
  char* perceived = NULL;
  EXPECT(mm_perceive(c, NULL, NULL, NULL, NULL, &perceived) == MM_OK);
  EXPECT(perceived && strstr(perceived, "\"objects\"") != NULL);
  mm_string_free(perceived);
  perceived = NULL;
  /* one score source without the other is rejected */
  EXPECT(mm_perceive(c, NULL, "[{\"nut\": 0.9}]", NULL, NULL, &perceived) == MM_INVALID_ARGUMENT);
  char* placed = NULL;
  EXPECT(mm_place(c, NULL, NULL, &placed) == MM_OK);
  EXPECT(placed && strstr(placed, "\"reach_score\"") != NULL);
  mm_string_free(placed);
  mm_cloud_free(c);
  char* again = NULL;
  char *t2 = NULL, *s2 = NULL;
  mm_gen_workstation(NULL, 3, &again, &t2, &s2);
  EXPECT(strcmp(ply, again) == 0);
  mm_string_free(ply);
  mm_string_free(truth);
  mm_string_free(scenario);
  mm_string_free(again);
  mm_string_free(t2);
  mm_string_free(s2);

  char *metrics = NULL, *tracks = NULL;
  EXPECT(mm_rtt_run(NULL, "nn", 1, &metrics, &tracks) == MM_OK);
  EXPECT(metrics && strstr(metrics, "switches") != NULL);
  mm_string_free(metrics);
  mm_string_free(tracks);
  EXPECT(mm_rtt_run(NULL, "kalman", 1, &metrics, &tracks) == MM_INVALID_ARGUMENT);

  char *pgm = NULL, *meta = NULL;
  EXPECT(mm_gen_map(NULL, 2, &pgm, &meta) == MM_OK);
  EXPECT(pgm && strncmp(pgm, "P2", 2) == 0);
  mm_string_free(pgm);
  mm_string_free(meta);
}

int main(void) {
  test_status();
  test_cloud();
  test_chain();
  test_sort();
  test_planner();
  test_generators();
  if (failures) {
    fprintf(stderr, "%d expectation(s) failed\n", failures);
    return 1;
  }
  printf("c api: all expectations passed\n");
  return 0;
}
