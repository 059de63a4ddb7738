#ifndef SQD_SQD_H
#define SQD_SQD_H

/* C interface to the social-learning quickest detection toolkit.
 *
 * Handles are opaque. Every function returning sqd_status leaves a message
 * for sqd_last_error() (thread-local) on failure. Strings returned through
 * char** are owned by the caller and released with sqd_string_free().
 *
 * Indexing: grid points, states and observations are 0-based; region labels
 * run 1..Y+1 and global decisions are 1 (stop) or 2 (continue). */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SQD_API __declspec(dllexport)
#else
#define SQD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sqd_status {
    SQD_OK = 0,
    SQD_E_INVALID_ARGUMENT = 1,
    SQD_E_VALIDATION = 2,
    SQD_E_UNSUPPORTED = 3,
    SQD_E_NUMERIC = 4,
    SQD_E_INTERNAL = 5
} sqd_status;

#define SQD_SUMMARY_SCHEMA_VERSION 1

typedef struct sqd_model sqd_model;
typedef struct sqd_solution sqd_solution;

SQD_API const char* sqd_version(void);
SQD_API const char* sqd_last_error(void);
SQD_API void sqd_string_free(char* s);

/* ---- models ---- */

/* Accepts the model JSON or the sensing JSON (keys B1, B2). Shape errors
 * return SQD_E_VALIDATION; invariants are checked by sqd_model_validate. */
SQD_API sqd_status sqd_model_from_json(const char* json, sqd_model** out);
SQD_API sqd_status sqd_model_from_preset(const char* name, sqd_model** out);
SQD_API void sqd_model_free(sqd_model* m);

/* Newline-separated preset names. */
SQD_API sqd_status sqd_preset_names(char** out);
/* JSON object with name, description, grid, horizon, expected, model. */
SQD_API sqd_status sqd_preset_info(const char* name, char** out_json);

SQD_API sqd_status sqd_model_to_json(const sqd_model* m, char** out);
SQD_API sqd_status sqd_model_dims(const sqd_model* m, int* X, int* Y, int* A);
SQD_API int sqd_model_is_sensing(const sqd_model* m);

/* *ok = 1 when valid; *report lists violations one per line. */
SQD_API sqd_status sqd_model_validate(const sqd_model* m, int* ok, char** report);

/* JSON array of {name, status, witness, margin}; status is "pass", "fail"
 * or "n/a". Sensing models get the sensing condition set. */
SQD_API sqd_status sqd_model_check(const sqd_model* m, double slack, char** out_json);

/* One row per region: region, lower_n_*, upper_n_*, R_i_a (A = 2 only). */
SQD_API sqd_status sqd_model_partition_csv(const sqd_model* m, char** out_csv);
/* Normals, region selectors and likelihoods, nesting verdict (A = 2 only). */
SQD_API sqd_status sqd_model_partition_json(const sqd_model* m, char** out_json);
/* Region label 1..Y+1 of a belief (A = 2 only). */
SQD_API sqd_status sqd_model_classify(const sqd_model* m, const double* pi, size_t n, int* label);

/* C = d e1 - (I - rho P) f; `out` holds X entries. */
SQD_API sqd_status sqd_model_transformed_cost(const sqd_model* m, double* out, size_t n);
SQD_API sqd_status sqd_ph_pmf(const sqd_model* m, int k, double* out);

/* d / (f2 (1 - rho) + d), X = 2 and P = I only. */
SQD_API sqd_status sqd_sequential_threshold(const sqd_model* m, double* out);
/* d / (d + f2 (1 - rho P22)), X = 2 only. */
SQD_API sqd_status sqd_geometric_threshold(const sqd_model* m, double* out);
/* JSON with eta1, eta2, q and the residuals; X = Y = A = 2 only. */
SQD_API sqd_status sqd_fixed_points(const sqd_model* m, char** out_json);

/* ---- value iteration ---- */

typedef enum sqd_solver {
    SQD_SOLVER_SOCIAL = 0,
    SQD_SOLVER_CLASSICAL = 1,
    SQD_SOLVER_SENSING = 2
} sqd_solver;

typedef struct sqd_solve_options {
    int grid;       /* X = 2: points on pi(2); X = 3: lattice density */
    int horizon;
    double tol;     /* 0 disables early stopping */
    int nearest;    /* 1: nearest-neighbour instead of linear interpolation */
    int zero_init;  /* 1: V0 = 0 instead of -f' pi */
    double beta;    /* operating-cost weight */
} sqd_solve_options;

SQD_API void sqd_solve_options_default(sqd_solve_options* opt);

SQD_API sqd_status sqd_solve(const sqd_model* m, sqd_solver solver, const sqd_solve_options* opt,
                             sqd_solution** out);
SQD_API void sqd_solution_free(sqd_solution* s);

SQD_API size_t sqd_solution_size(const sqd_solution* s);
SQD_API int sqd_solution_dim(const sqd_solution* s);
SQD_API int sqd_solution_iterations(const sqd_solution* s);
SQD_API double sqd_solution_sup_delta(const sqd_solution* s);
/* Copies grid point i (dim entries). */
SQD_API sqd_status sqd_solution_point(const sqd_solution* s, size_t i, double* pi, size_t n);
/* Each non-null array receives sqd_solution_size() entries. */
SQD_API sqd_status sqd_solution_arrays(const sqd_solution* s, double* V, double* Vbar, int* mu,
                                       int* region);
/* Columns: index, pi_1..pi_X, V, Vbar, mu, region. */
SQD_API sqd_status sqd_solution_value_csv(const sqd_solution* s, char** out_csv);
/* Schema-versioned summary: iterations, sup_delta, stop intervals (X = 2) or
 * line scans (X = 3). */
SQD_API sqd_status sqd_solution_summary_json(const sqd_solution* s, char** out_json);

/* min over the grid of V_social - V_classical. */
SQD_API sqd_status sqd_blackwell_gap(const sqd_solution* social, const sqd_solution* classical,
                                     double* out);

/* Small-eps bound report as JSON (X = 2, rho < 1). */
SQD_API sqd_status sqd_bound_check(const sqd_model* m, const sqd_solve_options* opt, char** out_json);

/* ---- threshold optimization ---- */

typedef struct sqd_spsa_options {
    int iterations;
    double a, c, A, alpha, gamma;  /* A < 0: 10% of iterations */
    double calibrate_step;         /* > 0 rescales a from the initial gradient */
    int priors;
    int heldout;
    int eval_every;
    uint64_t seed;
    const double* theta0;          /* X-1 entries or NULL */
} sqd_spsa_options;

SQD_API void sqd_spsa_options_default(sqd_spsa_options* opt);
/* out_json: theta_star, best_cost; out_trace_csv: iteration, theta_1.., cost. */
SQD_API sqd_status sqd_spsa(const sqd_model* m, const sqd_spsa_options* opt, char** out_json,
                            char** out_trace_csv);

/* 1 stop, 2 continue; theta has X-1 entries. */
SQD_API sqd_status sqd_linear_decide(const double* theta, size_t n, const double* pi, int* u);

/* ---- simulation ---- */

typedef enum sqd_policy_kind {
    SQD_POLICY_GRID = 0,     /* nearest grid point of `solution` */
    SQD_POLICY_MYOPIC = 1,   /* stop iff C' pi >= 0 */
    SQD_POLICY_LINEAR = 2,   /* linear threshold `theta` */
    SQD_POLICY_STOP = 3,
    SQD_POLICY_CONTINUE = 4
} sqd_policy_kind;

typedef struct sqd_policy {
    sqd_policy_kind kind;
    const sqd_solution* solution;
    const double* theta;
    size_t theta_len;
} sqd_policy;

/* out_json: estimates with standard errors; out_runs_csv (may be NULL):
 * replication, tau, tau0, delay, false_alarm, cost. */
SQD_API sqd_status sqd_simulate(const sqd_model* m, const sqd_policy* policy, long replications,
                                uint64_t seed, long cap, char** out_json, char** out_runs_csv);

/* ---- presets ---- */

/* Runs a preset and its structural checks. *ok = 1 when every check holds;
 * out_solution (may be NULL) receives the solved policy. */
SQD_API sqd_status sqd_reproduce(const char* name, int grid, int horizon, int* ok, char** out_json,
                                 sqd_solution** out_solution);

#ifdef __cplusplus
}
#endif

#endif
