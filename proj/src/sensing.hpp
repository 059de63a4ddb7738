#pragma once

#include "dp.hpp"
#include "filters.hpp"
#include "linalg.hpp"
#include "model.hpp"
#include "orders.hpp"

namespace sqd {

// Two sensing modes with their own observation matrices. base.B is the
// reference channel for the Blackwell comparison; when no factorization is
// given it is a copy of B1.
struct SensingModel {
    DetectionModel base;
    Matrix B1;
    Matrix B2;
    bool has_factor = false;
    Matrix Q1;  // B1 = B Q1 when has_factor
    Matrix Q2;
};

ValidationReport validate_sensing(const SensingModel& sm);
void require_valid_sensing(const SensingModel& sm);

const Matrix& mode_matrix(const SensingModel& sm, int a);

// argmin_a c_a' P' pi over the two modes (0-based), ties to mode 0.
int mode_select(const Vec& pi, const SensingModel& sm);

// B^(a)_y P' pi / sigma. Throws on sigma == 0.
FilterOutput mode_filter(const Vec& pi, int y, int a, const SensingModel& sm);

BranchFn sensing_branches(const SensingModel& sm);

PolicySolution value_iterate_sensing(const SensingModel& sm, const SimplexGrid& grid,
                                     const SolveOptions& opt);

// Largest y (0-based) with a positive entry in column y of the matrix.
int y_max(const Matrix& B);

// Entries: A1(B1), A1(B2), A2, A3, C1, C1@ymax, C2, C2@ymax, ymax-consistency.
AssumptionReport check_sensing_assumptions(const SensingModel& sm, double slack = kOrderSlack);

}  // namespace sqd
