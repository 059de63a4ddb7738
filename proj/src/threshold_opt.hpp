#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "linalg.hpp"
#include "model.hpp"
#include "random.hpp"

namespace sqd {

// theta has X-1 entries. Stop (u = 1) iff
//   pi(2) + sum_{i=1}^{X-2} theta(i) pi(i+2) <= theta(X-1)
// (1-based as written; code indexes theta and pi from 0).
struct LinearThreshold {
    Vec theta;
};

int linear_decide(const LinearThreshold& t, const Vec& pi);

struct ThetaCheck {
    bool ok = true;
    std::string witness;
};

// theta(X-1) > 0, theta(X-2) >= 1, 0 <= theta(i) <= theta(X-2) for i < X-2.
ThetaCheck validate_theta(const LinearThreshold& t);

inline constexpr double kThetaFloor = 1e-6;

// theta(X-1) >= 1e-6, theta(X-2) >= 1, then theta(i) clamped into [0, theta(X-2)].
LinearThreshold project_theta(const LinearThreshold& t);

// Uniform draw on the face {pi(1) = 0}.
Vec sample_prior(int X, Rng& rng);

struct PathCost {
    double cost = 0.0;
    long steps = 0;  // epochs before the stop decision
    bool stopped = false;
    bool truncated = false;  // no stop by max_horizon with rho = 1
};

// Discounted transformed cost sum_{k<tau} rho^k C' pi_k of one sample path
// under the linear policy. Ends at the stop decision, when the discounted
// tail rho^k max|C| / (1 - rho) drops below 1e-8, or at max_horizon.
PathCost sample_path_cost(const LinearThreshold& t, const Vec& pi0, const DetectionModel& m,
                          Rng& rng, long max_horizon = 100000);

struct SpsaConfig {
    int iterations = 300;
    double a = 0.16;
    double c = 0.1;
    double A = -1.0;  // negative: 10% of iterations
    double alpha = 0.602;
    double gamma = 0.101;
    // If > 0, `a` is replaced so the first step moves theta by about this much,
    // using the mean |gradient| over `calibration_draws` estimates at theta0.
    double calibrate_step = 0.0;
    int calibration_draws = 10;
    int priors = 200;       // sample paths per cost estimate
    int heldout = 2000;     // sample paths for the held-out comparison
    int eval_every = 10;    // held-out evaluation period
    long max_horizon = 100000;
    std::uint64_t seed = 1;
    Vec theta0;  // empty: default start
};

struct SpsaTraceRow {
    int iteration = 0;
    Vec theta;
    double cost = 0.0;  // mean of the paired estimates at this iterate
};

struct SpsaResult {
    LinearThreshold theta_star;
    double best_cost = 0.0;  // held-out
    std::vector<SpsaTraceRow> trace;
    int truncated_paths = 0;
    double a_used = 0.0;
};

// Mean of sample_path_cost over `n` priors drawn from seeds (master, base + i).
double estimate_cost(const LinearThreshold& t, const DetectionModel& m, int n,
                     std::uint64_t master, std::uint64_t base, long max_horizon,
                     int* truncated = nullptr);

SpsaResult spsa_optimize(const DetectionModel& m, const SpsaConfig& cfg);

}  // namespace sqd
