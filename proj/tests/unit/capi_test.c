/* Exercises the C header from a C translation unit. */
#include <sqd/sqd.h>

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

static int failures = 0;

#define EXPECT(cond)                                                  \
    do {                                                              \
        if (!(cond)) {                                                \
            fprintf(stderr, "%s:%d: %s\n", __FILE__, __LINE__, #cond); \
            ++failures;                                               \
        }                                                             \
    } while (0)

static const char* kModel =
    "{\"X\":2,\"Y\":2,\"A\":2,\"P\":[[1,0],[0.05,0.95]],\"B\":[[0.9,0.1],[0.1,0.9]],"
    "\"c\":[[1,2],[-1,-3.57]],\"f\":[0,3],\"d\":1.25,\"rho\":0.99,\"pi0\":[0,1]}";

int main(void) {
    sqd_model* m = NULL;
    EXPECT(sqd_model_from_json(kModel, &m) == SQD_OK);
    EXPECT(m != NULL);

    int X = 0, Y = 0, A = 0;
    EXPECT(sqd_model_dims(m, &X, &Y, &A) == SQD_OK);
    EXPECT(X == 2 && Y == 2 && A == 2);

    int ok = 0;
    char* report = NULL;
    EXPECT(sqd_model_validate(m, &ok, &report) == SQD_OK);
    EXPECT(ok == 1);
    sqd_string_free(report);

    double C[2];
    EXPECT(sqd_model_transformed_cost(m, C, 2) == SQD_OK);
    EXPECT(fabs(C[0] - 1.25) < 1e-12);
    EXPECT(sqd_model_transformed_cost(m, C, 1) == SQD_E_INVALID_ARGUMENT);

    double nu = 0.0;
    EXPECT(sqd_ph_pmf(m, 2, &nu) == SQD_OK);
    EXPECT(fabs(nu - 0.95 * 0.05) < 1e-12);

    sqd_solve_options opt;
    sqd_solve_options_default(&opt);
    opt.grid = 100;
    sqd_solution* s = NULL;
    EXPECT(sqd_solve(m, SQD_SOLVER_SOCIAL, &opt, &s) == SQD_OK);
    EXPECT(sqd_solution_size(s) == 100);
    EXPECT(sqd_solution_dim(s) == 2);
    EXPECT(sqd_solution_iterations(s) == 200);

    double* V = malloc(100 * sizeof(double));
    int* mu = malloc(100 * sizeof(int));
    EXPECT(sqd_solution_arrays(s, V, NULL, mu, NULL) == SQD_OK);
    EXPECT(mu[0] == 1);
    for (int i = 0; i < 100; ++i) EXPECT(V[i] <= 0.0);
    free(V);
    free(mu);

    double pi[2];
    EXPECT(sqd_solution_point(s, 99, pi, 2) == SQD_OK);
    EXPECT(fabs(pi[1] - 1.0) < 1e-12);
    EXPECT(sqd_solution_point(s, 100, pi, 2) == SQD_E_INVALID_ARGUMENT);

    char* summary = NULL;
    EXPECT(sqd_solution_summary_json(s, &summary) == SQD_OK);
    EXPECT(summary && strstr(summary, "\"schema_version\": 1") != NULL);
    sqd_string_free(summary);

    sqd_solution* c = NULL;
    EXPECT(sqd_solve(m, SQD_SOLVER_CLASSICAL, &opt, &c) == SQD_OK);
    double gap = -1.0;
    EXPECT(sqd_blackwell_gap(s, c, &gap) == SQD_OK);
    EXPECT(gap >= -1e-9);
    sqd_solution* none = NULL;
    EXPECT(sqd_solve(m, SQD_SOLVER_SENSING, &opt, &none) == SQD_E_INVALID_ARGUMENT);
    EXPECT(none == NULL);

    sqd_policy p;
    memset(&p, 0, sizeof p);
    p.kind = SQD_POLICY_GRID;
    p.solution = s;
    char* sim = NULL;
    char* runs = NULL;
    EXPECT(sqd_simulate(m, &p, 200, 3, 0, &sim, &runs) == SQD_OK);
    EXPECT(sim && strstr(sim, "mean_delay") != NULL);
    EXPECT(runs && strncmp(runs, "replication,tau,tau0,delay,false_alarm,cost", 43) == 0);
    sqd_string_free(sim);
    sqd_string_free(runs);

    double theta = 0.5;
    int u = 0;
    double belief[2] = {0.6, 0.4};
    EXPECT(sqd_linear_decide(&theta, 1, belief, &u) == SQD_OK);
    EXPECT(u == 1);

    sqd_solution_free(s);
    sqd_solution_free(c);
    sqd_model_free(m);

    /* Error paths */
    sqd_model* bad = NULL;
    EXPECT(sqd_model_from_json("{ nope", &bad) == SQD_E_VALIDATION);
    EXPECT(strlen(sqd_last_error()) > 0);
    EXPECT(sqd_model_from_json("{\"X\": 2}", &bad) == SQD_E_VALIDATION);
    EXPECT(strstr(sqd_last_error(), "config key") != NULL);
    EXPECT(sqd_model_from_json(NULL, &bad) == SQD_E_INVALID_ARGUMENT);
    EXPECT(sqd_model_from_preset("nope", &bad) == SQD_E_INVALID_ARGUMENT);

    sqd_model* pre = NULL;
    EXPECT(sqd_model_from_preset("example2-p3", &pre) == SQD_OK);
    char* part = NULL;
    EXPECT(sqd_model_partition_csv(pre, &part) == SQD_OK);
    EXPECT(part && strncmp(part, "region,", 7) == 0);
    sqd_string_free(part);
    double e2[3] = {0.0, 1.0, 0.0};
    int label = 0;
    EXPECT(sqd_model_classify(pre, e2, 3, &label) == SQD_OK);
    EXPECT(label >= 1 && label <= 6);
    sqd_model_free(pre);

    char* names = NULL;
    EXPECT(sqd_preset_names(&names) == SQD_OK);
    EXPECT(names && strstr(names, "example1\n") != NULL);
    sqd_string_free(names);

    if (failures) fprintf(stderr, "%d failure(s)\n", failures);
    return failures ? 1 : 0;
}
