/*
 * srte: segment-routing traffic engineering with path preprocessing.
 *
 * C interface over the C++ core. Objects are opaque handles created by
 * srte_*_create/parse/load functions and released by the matching *_free.
 * Every fallible call returns an srte_status; on failure the message is
 * available from srte_last_error() on the same thread until the next call.
 * Strings returned through char** are heap-allocated and released with
 * srte_string_free().
 */
#ifndef SRTE_SRTE_H
#define SRTE_SRTE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SRTE_API __declspec(dllexport)
#else
#define SRTE_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum srte_status {
  SRTE_OK = 0,
  SRTE_ERR_PARSE = 1,
  SRTE_ERR_INVALID_INSTANCE = 2,
  SRTE_ERR_INVALID_ARGUMENT = 3,
  SRTE_ERR_COMMAND_NOT_FOUND = 4,
  SRTE_ERR_SOLVER_FAILED = 5,
  SRTE_ERR_UNPARSEABLE_OUTPUT = 6,
  SRTE_ERR_INFEASIBLE = 7,
  SRTE_ERR_SEARCH_LIMIT = 8,
  SRTE_ERR_IO = 9,
  SRTE_ERR_NON_UNIQUE_ASSIGNMENT = 10,
  SRTE_ERR_MISSING_VARIABLE = 11,
  SRTE_ERR_DEMAND_MISMATCH = 12,
  SRTE_ERR_SPR_TRIVIAL = 13,
  SRTE_ERR_NO_SOLUTION = 14,
  SRTE_ERR_INTERNAL = 99
} srte_status;

/* Middlepoint value for the plain shortest-path route. */
#define SRTE_DIRECT (-1)

typedef struct srte_instance srte_instance;
typedef struct srte_candidates srte_candidates;
typedef struct srte_solution srte_solution;

SRTE_API const char* srte_last_error(void);
SRTE_API const char* srte_status_name(srte_status status);
SRTE_API void srte_string_free(char* s);

/* ---- Instances: topology + traffic matrix + routing tables ---- */

/* demands_text may be NULL (empty traffic matrix). */
SRTE_API srte_status srte_instance_parse(const char* graph_text, const char* demands_text,
                                         srte_instance** out);
SRTE_API srte_status srte_instance_load(const char* graph_path, const char* demands_path,
                                        srte_instance** out);
/* Synthetic backbone with gravity traffic; total_volume <= 0 scales the
 * traffic so that shortest-path routing has MLU 1. */
SRTE_API srte_status srte_instance_synthetic(int num_nodes, uint64_t seed,
                                             double total_volume, srte_instance** out);
/* Replaces the traffic matrix with gravity-model traffic. */
SRTE_API srte_status srte_instance_set_gravity_traffic(srte_instance* instance,
                                                       double total_volume, uint64_t seed);
SRTE_API void srte_instance_free(srte_instance* instance);

SRTE_API int srte_instance_num_nodes(const srte_instance* instance);
SRTE_API int srte_instance_num_arcs(const srte_instance* instance);
SRTE_API int srte_instance_num_demands(const srte_instance* instance);

/* Newline-separated findings; empty string iff the instance is admissible. */
SRTE_API srte_status srte_instance_validate(const srte_instance* instance, char** report);
/* Parses the files without requiring admissibility and lists every finding.
 * Syntax errors are returned as SRTE_ERR_PARSE. demands_path may be NULL. */
SRTE_API srte_status srte_lint_files(const char* graph_path, const char* demands_path,
                                     char** report);
SRTE_API srte_status srte_instance_graph_text(const srte_instance* instance, char** out);
SRTE_API srte_status srte_instance_demands_text(const srte_instance* instance, char** out);

/* MLU when every demand follows its ECMP shortest paths. */
SRTE_API srte_status srte_spr_mlu(const srte_instance* instance, double* mlu);

/* ---- Candidate middlepoints and preprocessing ---- */

typedef struct srte_filter_config {
  double alpha_sb;           /* >= 1; HUGE_VAL disables stretch bounding */
  int one_hop_extension;     /* boolean */
  double alpha_dp;           /* share of volume pinned to SPR, [0, 1] */
  int centrality_group_size; /* 0 disables the centrality stage */
  /* Comma-separated stage order from {centrality, pinning, stretch,
   * domination}; NULL means "pinning,stretch,domination". */
  const char* stages;
} srte_filter_config;

SRTE_API void srte_filter_config_init(srte_filter_config* config);

typedef struct srte_exclusion_stats {
  int64_t total_paths;
  int64_t remaining_paths;
  double excluded_fraction;
  double preprocess_seconds;
} srte_exclusion_stats;

SRTE_API srte_status srte_full_candidates(const srte_instance* instance,
                                          srte_candidates** out);
/* Runs the configured stages from the full candidate sets. stats may be NULL. */
SRTE_API srte_status srte_preprocess(const srte_instance* instance,
                                     const srte_filter_config* config,
                                     srte_candidates** out, srte_exclusion_stats* stats);
SRTE_API void srte_candidates_free(srte_candidates* cands);

SRTE_API int srte_candidates_count(const srte_candidates* cands, int demand);
SRTE_API int srte_candidates_get(const srte_candidates* cands, int demand, int index);
SRTE_API int srte_candidates_pinned(const srte_candidates* cands, int demand);
/* CSV "demand_id,src,dst,candidate". */
SRTE_API srte_status srte_candidates_dump(const srte_candidates* cands, char** csv);
/* "<stage> <remaining paths>" per line for the stages of srte_preprocess. */
SRTE_API srte_status srte_candidates_stage_counts(const srte_candidates* cands, char** out);

/* Greedy GSP-centrality group; nodes_out must hold `size` ints. */
SRTE_API srte_status srte_centrality_group(const srte_instance* instance, int size,
                                           int* nodes_out);
SRTE_API srte_status srte_group_centrality(const srte_instance* instance, const int* group,
                                           size_t size, double* value);

/* ---- 2SR model and solving ---- */

typedef enum srte_backend { SRTE_BACKEND_EXTERNAL = 0, SRTE_BACKEND_EXACT = 1 } srte_backend;

typedef struct srte_solver_config {
  srte_backend backend;
  /* Command template with {model} {solution} {gap} {time_limit} {threads}
   * placeholders. NULL uses SRTE_SOLVER_CMD or the built-in HiGHS adapter. */
  const char* command;
  double gap;
  double time_limit;
  int threads;
} srte_solver_config;

SRTE_API void srte_solver_config_init(srte_solver_config* config);

/* cands may be NULL for the full candidate sets. */
SRTE_API srte_status srte_write_lp(const srte_instance* instance,
                                   const srte_candidates* cands, char** out);
SRTE_API srte_status srte_solve(const srte_instance* instance, const srte_candidates* cands,
                                const srte_solver_config* config, srte_solution** out);
/* Reads a solution listing produced for the model of (instance, cands). */
SRTE_API srte_status srte_parse_solution(const srte_instance* instance,
                                         const srte_candidates* cands, const char* listing,
                                         srte_solution** out);
SRTE_API void srte_solution_free(srte_solution* solution);

/* 0 when the solver stopped without a feasible assignment. */
SRTE_API int srte_solution_has_assignment(const srte_solution* solution);
SRTE_API double srte_solution_theta(const srte_solution* solution);
/* MLU of the assignment recomputed from the routing tables. */
SRTE_API double srte_solution_evaluated_mlu(const srte_solution* solution);
SRTE_API const char* srte_solution_status(const srte_solution* solution);
SRTE_API double srte_solution_seconds(const srte_solution* solution);
SRTE_API int srte_solution_num_demands(const srte_solution* solution);
SRTE_API int srte_solution_middlepoint(const srte_solution* solution, int demand);

/* ---- Benchmarks ---- */

/* Runs the experiment described by a key-value config and writes the CSV
 * report to csv_path. num_records may be NULL. */
SRTE_API srte_status srte_bench_run(const char* config_text, const char* csv_path,
                                    size_t* num_records);

#ifdef __cplusplus
}
#endif

#endif /* SRTE_SRTE_H */
