#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "linalg.hpp"
#include "model.hpp"

namespace sqd {

// X = 2: `resolution` uniform points on pi(2) in [0,1].
// X = 3: lattice (i/m, j/m, (m-i-j)/m) with m = `resolution`.
struct SimplexGrid {
    int X = 0;
    int resolution = 0;
    std::vector<Vec> points;

    static SimplexGrid make(int X, int resolution);
    std::size_t size() const { return points.size(); }
    // Spacing in barycentric coordinates between neighbouring points.
    double step() const;
    // X = 3 only: index of lattice point (i, j).
    std::size_t lattice_index(int i, int j) const;
};

enum class Interpolation { linear, nearest };
enum class InitialValue { neg_false_alarm, zero };

struct Stencil {
    std::array<std::uint32_t, 3> idx{};
    std::array<double, 3> w{};
    int n = 0;
};

Stencil locate(const SimplexGrid& grid, const Vec& pi, Interpolation mode);
std::size_t nearest_point(const SimplexGrid& grid, const Vec& pi);
double interpolate(const SimplexGrid& grid, const Vec& values, const Vec& pi, Interpolation mode);

struct SolveOptions {
    int horizon = 200;
    double tol = 0.0;  // stop early once sup-delta < tol (0 disables)
    Interpolation interp = Interpolation::linear;
    InitialValue init = InitialValue::neg_false_alarm;
    double beta = 0.0;  // weight of the expected operating cost in C(pi, 2)
};

struct PolicySolution {
    std::string kind;  // "social", "classical", "sensing" or "evaluation"
    SimplexGrid grid;
    Vec V;             // transformed scale
    Vec Vbar;          // V + f' pi
    Vec Q2;            // continue value from the last sweep
    std::vector<int> mu;      // 1 stop, 2 continue
    std::vector<int> region;  // polytope label per point, 0 when undefined
    int iterations = 0;
    double final_sup_delta = 0.0;
};

// Continuation branches at a belief: (probability, successor belief).
using Branches = std::vector<std::pair<double, Vec>>;
using BranchFn = std::function<void(const Vec& pi, Branches& out)>;

BranchFn social_branches(const DetectionModel& m);
BranchFn classical_branches(const DetectionModel& m);

// Expected operating cost sum_y min_a c_a' B_y P' pi.
double operating_cost(const DetectionModel& m, const Vec& pi);

// Bellman iteration V <- min{C(pi,2) + rho sum_b sigma_b V(T_b), 0}.
PolicySolution bellman_solve(const DetectionModel& m, const SimplexGrid& grid,
                             const SolveOptions& opt, const BranchFn& branches,
                             const std::string& kind);

PolicySolution value_iterate_social(const DetectionModel& m, const SimplexGrid& grid,
                                    const SolveOptions& opt);
PolicySolution value_iterate_classical(const DetectionModel& m, const SimplexGrid& grid,
                                       const SolveOptions& opt);

// Value of a fixed grid policy under the social-learning dynamics, from V0 = 0.
PolicySolution evaluate_policy(const DetectionModel& m, const SimplexGrid& grid,
                               const std::vector<int>& mu, const SolveOptions& opt);

struct StopInterval {
    double lo = 0.0, hi = 0.0;
    std::size_t first = 0, last = 0;  // grid indices
};

struct LineScan {
    int lines = 0;          // lines with at least two scanned points
    int max_switches = 0;
    int lines_over_one = 0;  // lines with more than one switch
    std::string worst_line;
};

struct StoppingSummary {
    std::vector<StopInterval> intervals;  // X = 2
    int crossings = 0;                    // X = 2
    std::vector<std::size_t> boundary;    // X = 3: stop points with a continue neighbour
    LineScan through_e1;                  // X = 3
    LineScan through_eX;                  // X = 3
};

// `keep` restricts line scans to selected grid points (e.g. one polytope).
StoppingSummary stopping_set(const PolicySolution& sol,
                             const std::function<bool(std::size_t)>& keep = {});
LineScan scan_lines(const PolicySolution& sol, int apex,
                    const std::function<bool(std::size_t)>& keep = {});

double blackwell_gap(const PolicySolution& social, const PolicySolution& classical);

// Largest violation of midpoint concavity over grid triples (X = 2); positive
// means some V(mid) < (V(lo) + V(hi))/2.
double max_midpoint_concavity_violation(const PolicySolution& sol);

// X = 2, P = I: d / (f2 (1 - rho) + d).
double sequential_threshold(const DetectionModel& m);
// min{0, C' pi / (1 - rho)}, valid on the cascade intervals when P = I.
double sequential_value(const DetectionModel& m, const Vec& pi);
// X = 2: d / (d + f2 (1 - rho P22)).
double geometric_threshold(const DetectionModel& m);

struct BoundReport {
    double eps = 0.0;
    double rhs = 0.0;
    double max_lhs = 0.0;
    std::size_t qualifying = 0;
    std::size_t agree = 0;
    std::size_t total = 0;
    bool holds = false;
    PolicySolution mu0;    // eps = 0 model
    PolicySolution mueps;  // eps model
    PolicySolution eval0;  // mu0 evaluated under the eps model
};

BoundReport corollary_bound_check(const DetectionModel& m_eps, const SimplexGrid& grid,
                                  const SolveOptions& opt);

}  // namespace sqd
