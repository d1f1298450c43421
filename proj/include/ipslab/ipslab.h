#ifndef IPSLAB_IPSLAB_H
#define IPSLAB_IPSLAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(IPSLAB_BUILDING)
#define IPSLAB_API __attribute__((visibility("default")))
#else
#define IPSLAB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes returned by every fallible call. On failure a message is
 * available from ipslab_last_error() on the calling thread. */
typedef enum ipslab_status {
  IPSLAB_OK = 0,
  IPSLAB_ERR_DOMAIN = 1,
  IPSLAB_ERR_UNSUPPORTED = 2,
  IPSLAB_ERR_PARSE = 3,
  IPSLAB_ERR_CAPACITY = 4,
  IPSLAB_ERR_INFEASIBLE = 5,
  IPSLAB_ERR_NUMERIC = 6,
  IPSLAB_ERR_INVALID_ARGUMENT = 7,
  IPSLAB_ERR_INTERNAL = 8
} ipslab_status;

/* Opaque handles. */
typedef struct ipslab_rule ipslab_rule;
typedef struct ipslab_trajectory ipslab_trajectory;

IPSLAB_API const char* ipslab_version(void);
IPSLAB_API const char* ipslab_status_string(ipslab_status status);
/* Message of the last failed call on this thread; empty if none. */
IPSLAB_API const char* ipslab_last_error(void);
/* Releases strings and buffers returned through char** out-parameters. */
IPSLAB_API void ipslab_free_string(char* text);
/* Worker threads for replica and sweep loops; 0 restores the default
 * (IPS_LAB_THREADS or the hardware concurrency). */
IPSLAB_API void ipslab_set_threads(size_t workers);

/* ---- rules ---------------------------------------------------------- */

/* {"nn2":[p11,p10,p01,p00]}, {"preset":"name"} or
 * {"alphabet":q,"offsets":[...],"period":p,"tables":[[[row]...]...]}. */
IPSLAB_API ipslab_status ipslab_rule_from_json(const char* json, ipslab_rule** out);
IPSLAB_API ipslab_status ipslab_rule_from_nn2(double p11, double p10, double p01, double p00, ipslab_rule** out);
IPSLAB_API ipslab_status ipslab_rule_from_preset(const char* name, ipslab_rule** out);
IPSLAB_API ipslab_status ipslab_rule_two_stage(double lam, double gam, double del, int n_size, ipslab_rule** out);
IPSLAB_API ipslab_status ipslab_rule_time_scale(const ipslab_rule* rule, double lambda, ipslab_rule** out);
IPSLAB_API ipslab_status ipslab_rule_flip_states(const ipslab_rule* rule, ipslab_rule** out);
IPSLAB_API ipslab_status ipslab_rule_alternating_flip(const ipslab_rule* rule, ipslab_rule** out);
IPSLAB_API ipslab_status ipslab_rule_to_json(const ipslab_rule* rule, char** json_out);
/* {"alphabet","period","positive_rates","monotone","weakly_monotone"} plus
 * "gray_region" for homogeneous nearest-neighbor binary rules. */
IPSLAB_API ipslab_status ipslab_rule_classify(const ipslab_rule* rule, double eps, char** json_out);
IPSLAB_API void ipslab_rule_free(ipslab_rule* rule);
/* JSON object mapping preset names to [p11,p10,p01,p00]. */
IPSLAB_API ipslab_status ipslab_preset_names(char** json_out);
/* {"face","params","lambda"} for a non-identity nearest-neighbor rule. */
IPSLAB_API ipslab_status ipslab_project_to_face(double p11, double p10, double p01, double p00, char** json_out);

/* ---- criteria ------------------------------------------------------- */

typedef struct ipslab_criterion_options {
  int search;          /* nonzero: search the basis grids instead of using x/y */
  int full_grid;       /* search x and y over [-1,1] instead of the defaults */
  double step;         /* grid step for full_grid */
  double eps;          /* strictness of alpha < 1 */
  const double* x;     /* basis values per non-minimal letter (letters entries) */
  const double* y;
  size_t letters;
} ipslab_criterion_options;

IPSLAB_API void ipslab_criterion_options_init(ipslab_criterion_options* options);
/* CriterionReport JSON; *pass receives 1 for pass and 0 for fail. A search
 * that finds nothing reports {"verdict":"fail","basis":null,...}. */
IPSLAB_API ipslab_status ipslab_criterion(const ipslab_rule* rule, const ipslab_criterion_options* options,
                                          char** json_out, int* pass);
IPSLAB_API ipslab_status ipslab_pca_criterion(const ipslab_rule* rule, double x, double y, char** json_out,
                                              int* pass);
IPSLAB_API ipslab_status ipslab_decompose(const ipslab_rule* rule, int cancellative, int extended, char** json_out,
                                          int* feasible);
IPSLAB_API ipslab_status ipslab_two_stage(double lam, double gam, double del, int n_size, char** json_out,
                                          int* dies_out);
/* Sweep spec JSON -> CSV text and binary PGM bytes (length in *pgm_len). */
IPSLAB_API ipslab_status ipslab_sweep(const char* spec_json, char** csv_out, char** pgm_out, size_t* pgm_len);

/* ---- simulation ----------------------------------------------------- */

typedef struct ipslab_sim_options {
  size_t n;              /* ring size */
  double t_max;          /* continuous-time horizon */
  size_t steps;          /* synchronous steps (PCA) */
  uint64_t seed;
  double rate;           /* per-site clock rate */
  const char* init_json; /* initial law JSON, NULL for all zeros */
} ipslab_sim_options;

IPSLAB_API void ipslab_sim_options_init(ipslab_sim_options* options);
IPSLAB_API ipslab_status ipslab_simulate(const ipslab_rule* rule, const ipslab_sim_options* options,
                                         ipslab_trajectory** out);
IPSLAB_API ipslab_status ipslab_simulate_pca(const ipslab_rule* rule, const ipslab_sim_options* options,
                                             ipslab_trajectory** out);
IPSLAB_API ipslab_status ipslab_trajectory_info(const ipslab_trajectory* traj, size_t* sites, size_t* events,
                                                double* t_max);
IPSLAB_API ipslab_status ipslab_trajectory_state(const ipslab_trajectory* traj, double t, int* symbols,
                                                 size_t capacity);
IPSLAB_API ipslab_status ipslab_trajectory_events_csv(const ipslab_trajectory* traj, char** csv_out);
IPSLAB_API ipslab_status ipslab_trajectory_pgm(const ipslab_trajectory* traj, size_t frames, int binary,
                                               char** pgm_out, size_t* pgm_len);
IPSLAB_API void ipslab_trajectory_free(ipslab_trajectory* traj);

/* ---- oracle and estimators ------------------------------------------ */

typedef struct ipslab_oracle_options {
  size_t n;
  double t;
  size_t replicas;
  uint64_t seed;
  double lambda;         /* > 0 adds the time-scaling comparison */
  int cone;              /* nonzero: also check the backward cone sampler */
  const char* init_json; /* NULL for all zeros */
} ipslab_oracle_options;

IPSLAB_API void ipslab_oracle_options_init(ipslab_oracle_options* options);
IPSLAB_API ipslab_status ipslab_oracle_check(const ipslab_rule* rule, const ipslab_oracle_options* options,
                                             char** json_out);
/* Exact law at time t as CSV state_index,probability. */
IPSLAB_API ipslab_status ipslab_exact_distribution(const ipslab_rule* rule, size_t n, double t,
                                                   const char* init_json, char** csv_out);

typedef enum ipslab_estimate_kind {
  IPSLAB_ESTIMATE_COVARIANCE = 0,
  IPSLAB_ESTIMATE_DISAGREEMENT = 1,
  IPSLAB_ESTIMATE_BOUNDARY = 2
} ipslab_estimate_kind;

typedef struct ipslab_estimate_options {
  ipslab_estimate_kind kind;
  size_t n;
  const double* t_grid;
  size_t t_count;
  size_t replicas;
  uint64_t seed;
  double basis_x;        /* f = g = chi at the center site for this basis */
  double basis_y;
  const char* init_json; /* NULL for i.i.d. uniform */
} ipslab_estimate_options;

IPSLAB_API void ipslab_estimate_options_init(ipslab_estimate_options* options);
/* CSV (t,mean,stderr,bound for covariance; t,density,stderr for
 * disagreement; t,symbol,from_min,from_min_stderr,from_max,from_max_stderr
 * for boundary) and a JSON summary. */
IPSLAB_API ipslab_status ipslab_estimate(const ipslab_rule* rule, const ipslab_estimate_options* options,
                                         char** csv_out, char** json_out);

#ifdef __cplusplus
}
#endif

#endif /* IPSLAB_IPSLAB_H */
