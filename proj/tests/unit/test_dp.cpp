#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>

#include "dp.hpp"
#include "error.hpp"
#include "filters.hpp"
#include "geometry.hpp"
#include "helpers.hpp"
#include "presets.hpp"

using namespace sqd;

TEST_CASE("grid construction") {
    SimplexGrid g2 = SimplexGrid::make(2, 11);
    CHECK(g2.size() == 11);
    CHECK(g2.points[3][1] == doctest::Approx(0.3));
    CHECK(g2.step() == doctest::Approx(0.1));
    SimplexGrid g3 = SimplexGrid::make(3, 10);
    CHECK(g3.size() == 66);
    for (int i = 0; i <= 10; ++i)
        for (int j = 0; i + j <= 10; ++j) {
            const Vec& p = g3.points[g3.lattice_index(i, j)];
            CHECK(p[0] == doctest::Approx(i / 10.0));
            CHECK(p[1] == doctest::Approx(j / 10.0));
            CHECK(testing::is_simplex_point(p));
        }
    CHECK_THROWS_AS(SimplexGrid::make(4, 10), Error);
}

TEST_CASE("interpolation is exact for affine functions") {
    Rng rng = stream_rng(41, 0);
    for (int X : {2, 3}) {
        SimplexGrid g = SimplexGrid::make(X, X == 2 ? 37 : 13);
        Vec w = testing::random_belief(static_cast<std::size_t>(X), rng);
        for (double& v : w) v = 5.0 * v - 2.0;
        Vec values;
        for (const Vec& p : g.points) values.push_back(dot(w, p));
        for (int t = 0; t < 200; ++t) {
            Vec pi = testing::random_belief(static_cast<std::size_t>(X), rng);
            CHECK(interpolate(g, values, pi, Interpolation::linear) == doctest::Approx(dot(w, pi)).epsilon(1e-12));
            Stencil s = locate(g, pi, Interpolation::linear);
            double tot = 0.0;
            for (int k = 0; k < s.n; ++k) {
                CHECK(s.w[static_cast<std::size_t>(k)] >= -1e-12);
                tot += s.w[static_cast<std::size_t>(k)];
            }
            CHECK(tot == doctest::Approx(1.0));
        }
    }
}

TEST_CASE("nearest point is the closest grid point") {
    Rng rng = stream_rng(42, 0);
    SimplexGrid g = SimplexGrid::make(3, 9);
    for (int t = 0; t < 100; ++t) {
        Vec pi = testing::random_belief(3, rng);
        std::size_t best = 0;
        double bestd = 1e9;
        for (std::size_t i = 0; i < g.size(); ++i) {
            double d = 0.0;
            for (std::size_t k = 0; k < 3; ++k) d += std::pow(g.points[i][k] - pi[k], 2);
            if (d < bestd) {
                bestd = d;
                best = i;
            }
        }
        CHECK(max_abs_diff(g.points[nearest_point(g, pi)], g.points[best]) < 1e-12);
    }
}

namespace {

// Exact finite-horizon recursion on continuous beliefs, no grid.
double exact_value(const DetectionModel& m, const Vec& pi, int n, bool social) {
    if (n == 0) return 0.0;
    double cont = dot(transformed_cost(m), pi);
    if (social) {
        Vec sig = decision_probs(pi, m);
        for (int a = 0; a < m.A; ++a)
            if (sig[static_cast<std::size_t>(a)] > 1e-14)
                cont += m.rho * sig[static_cast<std::size_t>(a)] * exact_value(m, social_filter(pi, a, m).posterior, n - 1, true);
    } else {
        Vec sig = observation_probs(pi, m);
        for (int y = 0; y < m.Y; ++y)
            if (sig[static_cast<std::size_t>(y)] > 1e-14)
                cont += m.rho * sig[static_cast<std::size_t>(y)] * exact_value(m, hmm_filter(pi, y, m).posterior, n - 1, false);
    }
    return std::min(cont, 0.0);
}

}  // namespace

TEST_CASE("grid value iteration tracks the exact recursion") {
    DetectionModel m = testing::two_state(0.8, 0.9, 0.9, 1.0, 2.0);
    SolveOptions opt;
    opt.horizon = 7;
    opt.init = InitialValue::zero;
    SimplexGrid g = SimplexGrid::make(2, 4001);
    PolicySolution social = value_iterate_social(m, g, opt);
    PolicySolution classical = value_iterate_classical(m, g, opt);
    for (std::size_t i : {200u, 1000u, 2000u, 2800u, 3600u, 4000u}) {
        const Vec& pi = g.points[i];
        CHECK(social.V[i] == doctest::Approx(exact_value(m, pi, 7, true)).epsilon(2e-3));
        CHECK(classical.V[i] == doctest::Approx(exact_value(m, pi, 7, false)).epsilon(2e-3));
    }
}

TEST_CASE("value iteration invariants") {
    DetectionModel m = testing::example1();
    SolveOptions opt;
    SimplexGrid g = SimplexGrid::make(2, 200);
    PolicySolution s = value_iterate_social(m, g, opt);
    Vec fpi;
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(s.V[i] <= 0.0);
        CHECK(s.Vbar[i] == doctest::Approx(s.V[i] + dot(m.f, g.points[i])));
        CHECK((s.mu[i] == 1) == (s.Q2[i] >= 0.0));
        CHECK(s.region[i] >= 1);
    }
    // pi = e1 is always a stop.
    CHECK(s.mu[0] == 1);
    CHECK(s.iterations == 200);

    SolveOptions early = opt;
    early.tol = 1e-6;
    PolicySolution e = value_iterate_social(m, g, early);
    CHECK(e.iterations < 200);
    CHECK(e.final_sup_delta < 1e-6);
}

TEST_CASE("Blackwell gap is nonnegative on random two-state models") {
    Rng rng = stream_rng(43, 0);
    SimplexGrid g = SimplexGrid::make(2, 101);
    SolveOptions opt;
    opt.horizon = 60;
    for (int t = 0; t < 8; ++t) {
        DetectionModel m = testing::random_model(2, 2 + t % 2, rng);
        double gap = blackwell_gap(value_iterate_social(m, g, opt), value_iterate_classical(m, g, opt));
        CHECK(gap >= -1e-9);
    }
    CHECK_THROWS(blackwell_gap(value_iterate_social(testing::example1(), g, opt),
                               value_iterate_social(testing::example1(), SimplexGrid::make(2, 50), opt)));
}

TEST_CASE("with P = I cascade beliefs have the closed-form value") {
    DetectionModel m = testing::two_state(0.8, 1.0, 0.9, 1.0, 2.0);
    SimplexGrid g = SimplexGrid::make(2, 301);
    SolveOptions opt;
    opt.horizon = 400;
    PolicySolution s = value_iterate_social(m, g, opt);
    int checked = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (s.region[i] == 2) continue;
        ++checked;
        CHECK(s.V[i] == doctest::Approx(sequential_value(m, g.points[i])).epsilon(1e-9));
        // Oracle: the frozen belief pays C' pi forever or stops now.
        const Vec C = transformed_cost(m);
        CHECK(s.V[i] == doctest::Approx(std::min(0.0, dot(C, g.points[i]) / (1.0 - m.rho))).epsilon(1e-9));
    }
    CHECK(checked > 50);
}

TEST_CASE("closed-form thresholds") {
    DetectionModel m = testing::two_state(0.8, 1.0, 0.9, 1.0, 2.0);
    CHECK(sequential_threshold(m) == doctest::Approx(1.0 / (2.0 * 0.1 + 1.0)));
    DetectionModel g = find_preset("myopic-fig5").model;
    CHECK(geometric_threshold(g) == doctest::Approx(1.8 / (1.8 + 2.0 * (1.0 - 0.8 * 0.75))));
    CHECK_THROWS(sequential_threshold(testing::example1()));
}

TEST_CASE("stopping summary on a synthetic policy") {
    PolicySolution s;
    s.grid = SimplexGrid::make(2, 10);
    s.mu = {1, 1, 2, 2, 1, 2, 2, 1, 1, 1};
    s.V.assign(10, 0.0);
    StoppingSummary ss = stopping_set(s);
    REQUIRE(ss.intervals.size() == 3);
    CHECK(ss.intervals[1].first == 4);
    CHECK(ss.crossings == 4);
}

TEST_CASE("concavity check detects a kink") {
    PolicySolution s;
    s.grid = SimplexGrid::make(2, 5);
    s.Vbar = {0.0, 1.0, 0.0, 1.0, 0.0};
    s.V = s.Vbar;
    CHECK(max_midpoint_concavity_violation(s) > 0.5);
    s.Vbar = {0.0, 0.75, 1.0, 0.75, 0.0};
    s.V = s.Vbar;
    CHECK(max_midpoint_concavity_violation(s) <= 1e-12);
}

TEST_CASE("line scans count switches along rays") {
    PolicySolution s;
    s.grid = SimplexGrid::make(3, 6);
    s.mu.resize(s.grid.size());
    // Stop iff pi(1) >= 0.5: every ray through e3 switches once.
    for (std::size_t i = 0; i < s.grid.size(); ++i) s.mu[i] = s.grid.points[i][0] >= 0.5 ? 1 : 2;
    LineScan l = scan_lines(s, 2);
    CHECK(l.lines > 0);
    CHECK(l.max_switches <= 1);
    // Stripes along pi(1) break monotonicity.
    for (std::size_t i = 0; i < s.grid.size(); ++i) {
        int k = static_cast<int>(std::lround(s.grid.points[i][0] * 6));
        s.mu[i] = k % 2 == 0 ? 1 : 2;
    }
    CHECK(scan_lines(s, 2).max_switches > 1);
}

TEST_CASE("policy evaluation reproduces the optimum for the optimal policy") {
    DetectionModel m = testing::two_state(0.8, 0.9, 0.9, 1.0, 2.0);
    SimplexGrid g = SimplexGrid::make(2, 201);
    SolveOptions opt;
    opt.horizon = 300;
    PolicySolution s = value_iterate_social(m, g, opt);
    PolicySolution e = evaluate_policy(m, g, s.mu, opt);
    CHECK(max_abs_diff(s.V, e.V) < 1e-6);
    std::vector<int> always_stop(g.size(), 1);
    PolicySolution z = evaluate_policy(m, g, always_stop, opt);
    CHECK(max_abs(z.V) == 0.0);
}
