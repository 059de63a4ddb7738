#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "dp.hpp"
#include "linalg.hpp"
#include "model.hpp"
#include "random.hpp"
#include "threshold_opt.hpp"

namespace sqd {

// Global decision over beliefs: 1 stop, 2 continue.
using Policy = std::function<int(const Vec& pi)>;

Policy constant_policy(int u);
// Nearest grid point's decision.
Policy grid_policy(const PolicySolution& sol);
// Stop iff C' pi >= 0.
Policy myopic_policy(const DetectionModel& m);
Policy threshold_policy(const LinearThreshold& t);
// X = 2: stop iff pi(2) <= threshold.
Policy scalar_threshold_policy(double threshold);

inline constexpr long kSimCap = 1000000;

struct SimOptions {
    long cap = kSimCap;
    bool record_path = false;
};

// Epochs are zero-based: x_0 ~ pi0, pi_k is the public belief about x_k and
// u_k = policy(pi_k). tau = first k with u_k = 1; tau0 = first k with x_k = 1.
struct RunRecord {
    long tau = 0;
    long tau0 = -1;  // -1 if the change did not occur within the cap
    bool truncated = false;
    bool cascade = false;  // some epoch before tau had an uninformative selector
    bool false_alarm = false;
    long delay = 0;  // (tau - tau0)^+
    double cost = 0.0;              // sum_{k<tau} rho^k C' pi_k
    double belief_cost = 0.0;       // sum_{k<tau} rho^k d pi_k(1) + rho^tau f' pi_tau
    double realized_cost = 0.0;     // sum_{k<tau} rho^k d 1{x_k=1} + rho^tau f(x_tau)
    std::vector<Vec> beliefs;       // record_path only
    std::vector<int> actions;       // local decisions a_1..a_tau (0-based), record_path only
    std::vector<int> states;        // x_0..x_tau (0-based), record_path only
};

RunRecord simulate_run(const DetectionModel& m, const Policy& policy, Rng& rng,
                       const SimOptions& opt = {});

struct Estimate {
    double mean = 0.0;
    double se = 0.0;
};

struct SimReplicate {
    long tau = 0, tau0 = -1, delay = 0;
    bool false_alarm = false, cascade = false, truncated = false;
    double cost = 0.0, belief_cost = 0.0, realized_cost = 0.0;
};

struct SimReport {
    long replications = 0;
    Estimate mean_delay;
    Estimate false_alarm_prob;
    Estimate mean_discounted_cost;  // transformed scale
    Estimate mean_belief_cost;      // untransformed, belief-weighted
    Estimate mean_realized_cost;    // untransformed, realized states
    Estimate mean_tau;
    double cascade_rate = 0.0;
    long truncated = 0;
    std::vector<SimReplicate> runs;
};

// Replication i uses stream_rng(master, i).
SimReport monte_carlo(const DetectionModel& m, const Policy& policy, long n,
                      std::uint64_t master, const SimOptions& opt = {});

// Mean and standard error using pairwise summation.
Estimate estimate_of(const std::vector<double>& xs);

}  // namespace sqd
