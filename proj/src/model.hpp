#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "linalg.hpp"
#include "random.hpp"

namespace sqd {

// Indexing convention: states, observations and local decisions are zero-based
// in code (state 0 is the absorbing "changed" state). Region labels run
// 1..Y+1 and the global decision u is 1 (stop) or 2 (continue).

inline constexpr double kRowSumTol = 1e-10;
inline constexpr double kNegClamp = 1e-14;
inline constexpr double kBeliefTol = 1e-12;

struct DetectionModel {
    int X = 0;
    int Y = 0;
    int A = 0;
    Matrix P;  // X x X
    Matrix B;  // X x Y
    Matrix c;  // X x A
    Vec f;     // X
    double d = 0.0;
    double rho = 0.0;
    Vec pi0;   // X
};

struct Violation {
    std::string field;
    int row = -1;
    int col = -1;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
    std::string to_string() const;
};

ValidationReport validate_model(const DetectionModel& m);
// Throws Error(Errc::validation) listing every violation.
void require_valid(const DetectionModel& m);

// Zeroes entries of P, B and pi0 in [-1e-14, 0).
void clamp_tiny_negatives(DetectionModel& m);

// Shared pieces of validation, reused by the sensing model.
void check_stochastic(const Matrix& M, const std::string& name, ValidationReport& r);
void check_belief(const Vec& v, const std::string& name, ValidationReport& r);

bool is_belief(const Vec& v, double tol = kBeliefTol);

// C = d e1 - (I - rho P) f.
Vec transformed_cost(const DetectionModel& m);

// Transient block of P (states 2..X) and its absorption column.
Matrix ph_transient_block(const DetectionModel& m);
Vec ph_absorption_column(const DetectionModel& m);

// nu_k = pibar0' Pbar^{k-1} Plow; k = 0 returns pi0(1).
double ph_pmf(const DetectionModel& m, int k);
// nu_0..nu_K in one pass.
Vec ph_pmf_table(const DetectionModel& m, int K);

// Spectral radius of the transient block below 1 - 1e-12. Uses the
// Gelfand bound ||Pbar^n||^(1/n) >= spectral radius, so a true answer is
// never wrong.
bool change_time_finite(const DetectionModel& m);

// Absorption time of the chain started from pi0 (zero-based step count).
long sample_change_time(const DetectionModel& m, Rng& rng);

}  // namespace sqd
