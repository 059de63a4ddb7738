#include "presets.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "error.hpp"
#include "geometry.hpp"

namespace sqd {

namespace {

DetectionModel two_state(const Matrix& B, double p22, const Matrix& c, double rho, double d, double f2) {
    DetectionModel m;
    m.X = 2;
    m.Y = static_cast<int>(B.cols());
    m.A = static_cast<int>(c.cols());
    m.P = Matrix{{1.0, 0.0}, {1.0 - p22, p22}};
    m.B = B;
    m.c = c;
    m.f = {0.0, f2};
    m.d = d;
    m.rho = rho;
    m.pi0 = {0.0, 1.0};
    return m;
}

const Matrix kSocialCost{{1.0, 2.0}, {-1.0, -3.57}};

std::vector<ExperimentPreset> build() {
    std::vector<ExperimentPreset> out;
    out.push_back({"example1", "geometric change time, E{tau0} = 20, rho = 0.99",
                   two_state(Matrix{{0.9, 0.1}, {0.1, 0.9}}, 0.95, kSocialCost, 0.99, 1.25, 3.0), 500, 200,
                   "stopping set is a union of at least two disjoint intervals; value function non-concave"});
    for (int k = 1; k <= 4; ++k) {
        std::string expected = "sup-delta below 1e-12; at most one switch per line through e1 and e3 inside P_{Y+1}";
        if (k == 2 || k == 3) expected += "; stopping boundary is the hyperplane C' pi = 0";
        out.push_back({"example2-p" + std::to_string(k), "phase-type change time, X = 3, Y = 5, transition matrix " + std::to_string(k),
                       example2_model(k), 50, 200, expected});
    }
    out.push_back({"bound-eps", "small change probability eps = 0.005, rho = 0.8",
                   two_state(Matrix{{0.85, 0.15}, {0.15, 0.85}}, 0.995, kSocialCost, 0.8, 1.8, 2.0), 500, 200,
                   "Vbar of the eps = 0 policy exceeds the optimum by at most 4 rho eps max(d, f2) / (1 - rho)^2"});
    out.push_back({"myopic-fig5", "geometric change time with P22 = 0.75, rho = 0.8",
                   two_state(Matrix{{0.85, 0.15}, {0.15, 0.85}}, 0.75, kSocialCost, 0.8, 1.8, 2.0), 500, 200,
                   "single stop interval ending at d / (d + f2 (1 - rho P22)) within one grid step"});
    out.push_back({"spsa-x2", "two-state model with a single threshold, used for SPSA",
                   two_state(Matrix{{0.7, 0.3}, {0.3, 0.7}}, 0.9, Matrix{{1.0, 2.0}, {-1.0, -1.5}}, 0.8, 0.3, 2.0),
                   500, 200, "single stop interval [0, pi*]"});
    return out;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

}  // namespace

Matrix example2_observations() {
    Matrix B(3, 5);
    for (std::size_t i = 0; i < 3; ++i) {
        const double centre = i == 0 ? 1.0 : 5.0;
        double tot = 0.0;
        for (std::size_t y = 0; y < 5; ++y) {
            double v = std::exp(-std::pow(static_cast<double>(y + 1) - centre, 2) / 6.0);
            B(i, y) = v;
            tot += v;
        }
        for (std::size_t y = 0; y < 5; ++y) B(i, y) /= tot;
    }
    return B;
}

DetectionModel example2_model(int which) {
    DetectionModel m;
    m.X = 3;
    m.Y = 5;
    m.A = 2;
    switch (which) {
        case 1: m.P = Matrix{{1, 0, 0}, {0.1, 0.9, 0}, {0.1, 0.9, 0}}; break;
        case 2: m.P = Matrix{{1, 0, 0}, {0.1, 0.5, 0.4}, {0, 0.1, 0.9}}; break;
        case 3: m.P = Matrix{{1, 0, 0}, {0.1, 0.7, 0.2}, {0, 0.4, 0.6}}; break;
        case 4: m.P = Matrix{{1, 0, 0}, {0.1, 0.45, 0.45}, {0.05, 0.40, 0.55}}; break;
        default: throw Error(Errc::invalid_argument, "example 2 has transition matrices 1..4");
    }
    m.B = example2_observations();
    m.c = Matrix{{4, 50}, {2, 0}, {2, 0}};
    m.f = {0.0, 20.0, 25.0};
    m.d = 1.5;
    m.rho = 0.9;
    m.pi0 = {0.0, 0.03, 0.97};
    return m;
}

const std::vector<ExperimentPreset>& presets() {
    static const std::vector<ExperimentPreset> all = build();
    return all;
}

const ExperimentPreset& find_preset(const std::string& name) {
    for (const auto& p : presets())
        if (p.name == name) return p;
    throw Error(Errc::invalid_argument, "unknown preset '" + name + "'");
}

bool ReproResult::ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const ReproCheck& c) { return c.ok; });
}

HyperplaneCheck hyperplane_boundary_check(const DetectionModel& m, const PolicySolution& sol) {
    const Vec C = transformed_cost(m);
    HyperplaneCheck h;
    h.delta = sol.grid.step() * (*std::max_element(C.begin(), C.end()) - *std::min_element(C.begin(), C.end()));
    bool first = true;
    for (std::size_t g = 0; g < sol.grid.size(); ++g) {
        double v = dot(C, sol.grid.points[g]);
        bool bad = false;
        if (v >= 0.0 && sol.mu[g] != 1) {
            ++h.stop_mismatch;
            bad = true;
        } else if (v < -h.delta && sol.mu[g] != 2) {
            ++h.continue_mismatch;
            bad = true;
        }
        if (bad && first) {
            h.first_bad = g;
            first = false;
        }
    }
    return h;
}

LineCheck line_monotonicity_check(const DetectionModel& m, const PolicySolution& sol) {
    const int last = m.Y + 1;
    auto keep = [&sol, last](std::size_t g) { return sol.region[g] == last; };
    return {scan_lines(sol, 0, keep), scan_lines(sol, sol.grid.X - 1, keep)};
}

ReproResult reproduce(const std::string& name, int grid, int horizon) {
    const ExperimentPreset& p = find_preset(name);
    SolveOptions opt;
    opt.horizon = horizon > 0 ? horizon : p.horizon;
    const SimplexGrid g = SimplexGrid::make(p.model.X, grid > 0 ? grid : p.grid);
    ReproResult r;
    r.preset = name;
    if (name == "bound-eps") {
        BoundReport b = corollary_bound_check(p.model, g, opt);
        r.solution = b.mueps;
        r.checks.push_back({"bound", b.holds,
                            "max LHS " + fmt(b.max_lhs) + " vs RHS " + fmt(b.rhs) + " over " +
                                std::to_string(b.qualifying) + " points"});
        return r;
    }
    r.solution = value_iterate_social(p.model, g, opt);
    const PolicySolution& s = r.solution;
    if (name == "example1") {
        StoppingSummary ss = stopping_set(s);
        r.checks.push_back({"multi-interval", ss.intervals.size() >= 2,
                            std::to_string(ss.intervals.size()) + " stop intervals"});
        double viol = max_midpoint_concavity_violation(s);
        r.checks.push_back({"non-concave", viol > 1e-6, "max midpoint violation " + fmt(viol)});
    } else if (name == "myopic-fig5" || name == "spsa-x2") {
        StoppingSummary ss = stopping_set(s);
        bool one = ss.intervals.size() == 1;
        r.checks.push_back({"single-interval", one, std::to_string(ss.intervals.size()) + " stop intervals"});
        if (name == "myopic-fig5") {
            double target = geometric_threshold(p.model);
            double hi = one ? ss.intervals.front().hi : -1.0;
            r.checks.push_back({"threshold", one && std::abs(hi - target) <= g.step() + 1e-12,
                                "upper endpoint " + fmt(hi) + " vs " + fmt(target)});
        }
    } else {
        r.checks.push_back({"convergence", s.final_sup_delta < 1e-12, "sup-delta " + fmt(s.final_sup_delta)});
        LineCheck lc = line_monotonicity_check(p.model, s);
        r.checks.push_back({"line-monotone", lc.ok(),
                            "max switches " + std::to_string(lc.e1.max_switches) + " (e1), " +
                                std::to_string(lc.eX.max_switches) + " (e3)"});
        if (name == "example2-p2" || name == "example2-p3") {
            HyperplaneCheck h = hyperplane_boundary_check(p.model, s);
            r.checks.push_back({"hyperplane", h.ok(),
                                std::to_string(h.stop_mismatch) + " stop and " + std::to_string(h.continue_mismatch) +
                                    " continue mismatches"});
        }
    }
    return r;
}

}  // namespace sqd
