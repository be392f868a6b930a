// Copyright 2026 The Spillover Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// C interface to the spillover library.
//
// Conventions shared by every function below:
//  * Units are numbered 1..n. Assignment and outcome arrays are indexed
//    0..n-1 in the usual C way, with element k describing unit k+1.
//  * Functions return an sp_status. On failure the out-parameters are left
//    untouched and sp_last_error_message() describes the problem.
//  * Objects are opaque and immutable once created. A handle may be shared
//    between threads; each must be released with its matching *_free call.

#ifndef SPILLOVER_SPILLOVER_H_
#define SPILLOVER_SPILLOVER_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(SPILLOVER_BUILDING_LIBRARY)
#define SP_API __declspec(dllexport)
#else
#define SP_API __declspec(dllimport)
#endif
#else
#define SP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sp_status {
  SP_OK = 0,
  SP_ERR_INVALID_ARGUMENT = 1,
  SP_ERR_OUT_OF_RANGE = 2,
  SP_ERR_INFEASIBLE = 3,
  SP_ERR_PRECONDITION = 4,
  SP_ERR_CONFIG = 5,
  SP_ERR_IO = 6,
  SP_ERR_VERIFICATION_FAILED = 7,
  SP_ERR_INTERNAL = 8
} sp_status;

typedef struct sp_graph sp_graph;
typedef struct sp_model sp_model;
typedef struct sp_design sp_design;

SP_API const char* sp_version(void);
SP_API const char* sp_status_name(sp_status status);
// Message for the most recent failure on the calling thread ("" if none).
SP_API const char* sp_last_error_message(void);

// ---- interference graphs ---------------------------------------------------
// neighbors(i) are the units whose treatment may affect unit i.

SP_API sp_status sp_graph_create_empty(size_t n, sp_graph** out);
// edges holds `count` pairs (i, j), flattened, meaning j is a neighbor of i.
SP_API sp_status sp_graph_create_from_edges(size_t n, const uint32_t* edges,
                                            size_t count, sp_graph** out);
SP_API sp_status sp_graph_create_circulant(size_t n, size_t half_width,
                                           sp_graph** out);
SP_API sp_status sp_graph_create_complete(size_t n, sp_graph** out);
SP_API sp_status sp_graph_load(const char* path, sp_graph** out);
SP_API void sp_graph_free(sp_graph* graph);

SP_API size_t sp_graph_size(const sp_graph* graph);
SP_API size_t sp_graph_edge_count(const sp_graph* graph);
SP_API sp_status sp_graph_degree(const sp_graph* graph, size_t unit,
                                 size_t* out);
SP_API sp_status sp_graph_has_edge(const sp_graph* graph, size_t unit,
                                   size_t neighbor, int* out);
// *out = 1 when every edge of `inner` is also an edge of `outer`.
SP_API sp_status sp_graph_contains(const sp_graph* outer, const sp_graph* inner,
                                   int* out);

// ---- outcome models --------------------------------------------------------

// General model: y = fn(user, unit, w, n) where w has n entries of 0 or 1.
typedef double (*sp_outcome_fn)(void* user, size_t unit, const uint8_t* w,
                                size_t n);
// Anonymous model: y = fn(user, unit, own treatment, treated neighbors).
typedef double (*sp_response_fn)(void* user, size_t unit, int own,
                                 size_t treated_neighbors);

SP_API sp_status sp_model_create_general(const char* name,
                                         const sp_graph* dependencies,
                                         sp_outcome_fn fn, void* user,
                                         sp_model** out);
SP_API sp_status sp_model_create_anonymous(const char* name,
                                           const sp_graph* dependencies,
                                           sp_response_fn fn, void* user,
                                           sp_model** out);
SP_API sp_status sp_model_linear_in_means(const sp_graph* graph, double beta1,
                                          double beta2, double beta3,
                                          sp_model** out);
// nu is row-major n x n and may be NULL for no interference.
SP_API sp_status sp_model_saturated_linear(size_t n, const double* alpha,
                                           const double* beta,
                                           const double* nu, sp_model** out);
// clusters holds a label per unit, or NULL for contiguous blocks of m.
SP_API sp_status sp_model_four_type(size_t n, size_t m,
                                    const double* treated_exposed,
                                    const double* treated,
                                    const double* exposed, const double* none,
                                    const uint32_t* clusters, sp_model** out);
// graph may be NULL for the default 500-unit circulant graph.
SP_API sp_status sp_model_fig1_setting(int setting, const sp_graph* graph,
                                       sp_model** out);
SP_API sp_status sp_model_diverging(size_t n, double pi0, sp_model** out);
SP_API sp_status sp_model_peer_count(size_t n, sp_model** out);
SP_API void sp_model_free(sp_model* model);

SP_API size_t sp_model_size(const sp_model* model);
SP_API const char* sp_model_name(const sp_model* model);
// Copy of the model's dependency graph; free with sp_graph_free.
SP_API sp_status sp_model_dependencies(const sp_model* model, sp_graph** out);
SP_API sp_status sp_model_closed_form(const sp_model* model, int* available,
                                      double* ade, double* aie);
// y_out receives n outcomes. sigma > 0 adds seeded Gaussian noise.
SP_API sp_status sp_model_evaluate(const sp_model* model, const uint8_t* w,
                                   size_t n, double sigma, uint64_t seed,
                                   double* y_out);

typedef enum sp_violation_kind {
  SP_VIOLATION_NONE = 0,
  SP_VIOLATION_DEPENDENCY = 1,
  SP_VIOLATION_ANONYMITY = 2
} sp_violation_kind;

typedef struct sp_locality_result {
  int passed;
  size_t probes;
  sp_violation_kind violation;
  size_t unit;   // affected unit, when a violation was found
  size_t other;  // unit whose flip or swap moved it
} sp_locality_result;

// claimed may be NULL to probe against the model's own dependency graph.
SP_API sp_status sp_check_locality(const sp_model* model,
                                   const sp_graph* claimed, size_t probes,
                                   uint64_t seed, sp_locality_result* out);

// ---- designs ---------------------------------------------------------------

SP_API sp_status sp_design_bernoulli(size_t n, const double* pi,
                                     sp_design** out);
SP_API sp_status sp_design_bernoulli_constant(size_t n, double pi,
                                              sp_design** out);
// clusters holds a label per unit, or NULL for contiguous blocks of m.
SP_API sp_status sp_design_two_stage(size_t n, size_t m, double rho,
                                     const uint32_t* clusters,
                                     sp_design** out);
SP_API void sp_design_free(sp_design* design);

SP_API size_t sp_design_size(const sp_design* design);
// Short label such as "bernoulli:pi=0.5"; valid until the next call on
// this thread.
SP_API const char* sp_design_describe(const sp_design* design);
// Draw number `stream` from the design under `seed`; w_out receives n flags.
SP_API sp_status sp_design_sample(const sp_design* design, uint64_t seed,
                                  uint64_t stream, uint8_t* w_out, size_t n);
SP_API sp_status sp_design_marginal(const sp_design* design, size_t unit,
                                    double* out);

// ---- estimands -------------------------------------------------------------

typedef enum sp_method {
  SP_METHOD_AUTO = 0,
  SP_METHOD_EXACT = 1,
  SP_METHOD_BINOMIAL = 2,
  SP_METHOD_MONTE_CARLO = 3
} sp_method;

typedef struct sp_estimands {
  double ade;
  double aie;
  double aoe;
  double inf;  // NaN when the design is not Bernoulli
  double se_ade;
  double se_aie;
  double se_aoe;
  uint64_t replications;
  sp_method method;  // the method actually used, never SP_METHOD_AUTO
} sp_estimands;

// workers = 0 is treated as 1.
SP_API sp_status sp_estimands_compute(const sp_model* model,
                                      const sp_design* design,
                                      sp_method method, uint64_t replications,
                                      uint64_t seed, unsigned workers,
                                      sp_estimands* out);
SP_API sp_status sp_mean_outcome(const sp_model* model,
                                 const sp_design* design, double* out);
SP_API sp_status sp_hh_de(const sp_model* model, const sp_design* design,
                          unsigned workers, double* out);
SP_API sp_status sp_ie(const sp_model* model, const double* pi,
                       const double* pi_prime, size_t n, unsigned workers,
                       double* out);
SP_API sp_status sp_inf_analytic(const sp_model* model, const double* pi,
                                 size_t n, unsigned workers, double* out);
// monte_carlo = 0 differences the exact mean outcome; otherwise common
// random numbers with `replications` draws are used and *standard_error is
// filled (it may be NULL).
SP_API sp_status sp_inf_finite_difference(const sp_model* model,
                                          const double* pi, size_t n,
                                          double step, int monte_carlo,
                                          uint64_t replications, uint64_t seed,
                                          unsigned workers, double* value,
                                          double* standard_error);

// ---- estimators ------------------------------------------------------------

SP_API sp_status sp_ht_ade(const uint8_t* w, const double* y, const double* pi,
                           size_t n, double* out);
SP_API sp_status sp_ht_aie(const uint8_t* w, const double* y, const double* pi,
                           size_t n, const sp_graph* graph, double* out);

typedef struct sp_replication {
  double target_ade;
  double target_aie;
  double mean_ade;
  double sd_ade;
  double se_ade;
  double mean_aie;
  double sd_aie;
  double se_aie;
  uint64_t replications;
  uint64_t seed;
  int graph_not_superset;  // analyst graph misses a true dependency
  int target_monte_carlo;  // targets are themselves Monte Carlo estimates
} sp_replication;

// analyst_graph may be NULL to use the model's own dependency graph.
SP_API sp_status sp_replicate(const sp_model* model, const sp_design* design,
                              const sp_graph* analyst_graph, double sigma,
                              uint64_t replications, uint64_t seed,
                              size_t locality_probes, unsigned workers,
                              sp_replication* out);

// ---- config-driven tasks ---------------------------------------------------

typedef enum sp_task {
  SP_TASK_ESTIMANDS = 0,
  SP_TASK_ESTIMATORS = 1,
  SP_TASK_FIG1 = 2,
  SP_TASK_VERIFY_THEOREM1 = 3,
  SP_TASK_VALIDATE_CONFIG = 4
} sp_task;

// Unset fields (NULL strings, has_seed = 0, zero counts) keep the config's
// values.
typedef struct sp_run_options {
  const char* config_path;
  int has_seed;
  uint64_t seed;
  const char* output;
  const char* method;
  uint64_t replications;
  unsigned workers;
} sp_run_options;

SP_API sp_status sp_task_from_name(const char* name, sp_task* out);
// Runs a task. Results go to the configured output, or stdout when none is
// set. A failed theorem battery returns SP_ERR_VERIFICATION_FAILED.
SP_API sp_status sp_run_task(sp_task task, const sp_run_options* options);
// One-line summary of the last sp_run_task on this thread.
SP_API const char* sp_last_run_summary(void);
SP_API sp_status sp_validate_config(const char* config_path);

#ifdef __cplusplus
}  // extern "C"
#endif

#endif  // SPILLOVER_SPILLOVER_H_
