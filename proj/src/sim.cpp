#include "sim.hpp"

#include <cmath>
#include <utility>

#include "error.hpp"
#include "filters.hpp"

namespace sqd {

Policy constant_policy(int u) {
    return [u](const Vec&) { return u; };
}

Policy grid_policy(const PolicySolution& sol) {
    return [&sol](const Vec& pi) { return sol.mu[nearest_point(sol.grid, pi)]; };
}

Policy myopic_policy(const DetectionModel& m) {
    Vec C = transformed_cost(m);
    return [C](const Vec& pi) { return dot(C, pi) >= 0.0 ? 1 : 2; };
}

Policy threshold_policy(const LinearThreshold& t) {
    return [t](const Vec& pi) { return linear_decide(t, pi); };
}

Policy scalar_threshold_policy(double threshold) {
    return [threshold](const Vec& pi) { return pi[1] <= threshold ? 1 : 2; };
}

namespace {

bool uninformative(const Vec& pi, const DetectionModel& m) {
    DecisionSelector s = decision_selector(pi, m);
    for (int a : s.action)
        if (a != s.action.front()) return false;
    return true;
}

}  // namespace

RunRecord simulate_run(const DetectionModel& m, const Policy& policy, Rng& rng, const SimOptions& opt) {
    const Vec C = transformed_cost(m);
    RunRecord r;
    Vec pi = m.pi0;
    std::size_t x = draw_index(m.pi0, rng);
    double disc = 1.0;
    if (x == 0) r.tau0 = 0;
    long k = 0;
    for (;; ++k) {
        if (opt.record_path) {
            r.beliefs.push_back(pi);
            r.states.push_back(static_cast<int>(x));
        }
        if (policy(pi) == 1) break;
        if (k >= opt.cap) {
            r.truncated = true;
            break;
        }
        if (uninformative(pi, m)) r.cascade = true;
        r.cost += disc * dot(C, pi);
        r.belief_cost += disc * m.d * pi[0];
        if (x == 0) r.realized_cost += disc * m.d;
        disc *= m.rho;
        x = draw_index(m.P.row(x), rng);
        if (x == 0 && r.tau0 < 0) r.tau0 = k + 1;
        std::size_t y = draw_index(m.B.row(x), rng);
        int a = local_decision(pi, static_cast<int>(y), m);
        if (opt.record_path) r.actions.push_back(a);
        pi = social_filter(pi, a, m).posterior;
    }
    r.tau = k;
    r.belief_cost += disc * dot(m.f, pi);
    r.realized_cost += disc * m.f[x];
    // Keep the chain running after the stop to locate the change.
    for (long j = k; r.tau0 < 0 && j < opt.cap; ++j) {
        x = draw_index(m.P.row(x), rng);
        if (x == 0) r.tau0 = j + 1;
    }
    r.false_alarm = r.tau0 < 0 || r.tau < r.tau0;
    r.delay = r.tau0 >= 0 && r.tau > r.tau0 ? r.tau - r.tau0 : 0;
    return r;
}

namespace {

double pairwise_sum(const double* p, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += p[i];
        return s;
    }
    std::size_t h = n / 2;
    return pairwise_sum(p, h) + pairwise_sum(p + h, n - h);
}

}  // namespace

Estimate estimate_of(const std::vector<double>& xs) {
    Estimate e;
    const std::size_t n = xs.size();
    if (n == 0) return e;
    e.mean = pairwise_sum(xs.data(), n) / static_cast<double>(n);
    if (n < 2) return e;
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) sq[i] = (xs[i] - e.mean) * (xs[i] - e.mean);
    double var = pairwise_sum(sq.data(), n) / static_cast<double>(n - 1);
    e.se = std::sqrt(var / static_cast<double>(n));
    return e;
}

SimReport monte_carlo(const DetectionModel& m, const Policy& policy, long n, std::uint64_t master,
                      const SimOptions& opt) {
    require_valid(m);
    if (n < 1) throw Error(Errc::invalid_argument, "replications must be >= 1");
    SimReport rep;
    rep.replications = n;
    rep.runs.reserve(static_cast<std::size_t>(n));
    SimOptions o = opt;
    o.record_path = false;
    std::vector<double> delay, fa, cost, bcost, rcost, tau;
    long cascades = 0;
    for (long i = 0; i < n; ++i) {
        Rng rng = stream_rng(master, static_cast<std::uint64_t>(i));
        RunRecord r = simulate_run(m, policy, rng, o);
        rep.runs.push_back({r.tau, r.tau0, r.delay, r.false_alarm, r.cascade, r.truncated, r.cost,
                            r.belief_cost, r.realized_cost});
        delay.push_back(static_cast<double>(r.delay));
        fa.push_back(r.false_alarm ? 1.0 : 0.0);
        cost.push_back(r.cost);
        bcost.push_back(r.belief_cost);
        rcost.push_back(r.realized_cost);
        tau.push_back(static_cast<double>(r.tau));
        if (r.cascade) ++cascades;
        if (r.truncated) ++rep.truncated;
    }
    rep.mean_delay = estimate_of(delay);
    rep.false_alarm_prob = estimate_of(fa);
    rep.mean_discounted_cost = estimate_of(cost);
    rep.mean_belief_cost = estimate_of(bcost);
    rep.mean_realized_cost = estimate_of(rcost);
    rep.mean_tau = estimate_of(tau);
    rep.cascade_rate = static_cast<double>(cascades) / static_cast<double>(n);
    return rep;
}

}  // namespace sqd
