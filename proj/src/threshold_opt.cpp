#include "threshold_opt.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "error.hpp"
#include "filters.hpp"

namespace sqd {

int linear_decide(const LinearThreshold& t, const Vec& pi) {
    const std::size_t X = t.theta.size() + 1;
    double lhs = pi[1];
    for (std::size_t i = 0; i + 2 < X; ++i) lhs += t.theta[i] * pi[i + 2];
    return lhs <= t.theta[X - 2] ? 1 : 2;
}

ThetaCheck validate_theta(const LinearThreshold& t) {
    ThetaCheck r;
    const std::size_t n = t.theta.size();
    std::ostringstream os;
    if (n == 0) {
        r.ok = false;
        r.witness = "theta is empty";
        return r;
    }
    if (!(t.theta[n - 1] > 0.0)) {
        os << "theta(" << n << ") = " << t.theta[n - 1] << " must be > 0";
    } else if (n >= 2 && !(t.theta[n - 2] >= 1.0)) {
        os << "theta(" << n - 1 << ") = " << t.theta[n - 2] << " must be >= 1";
    } else {
        for (std::size_t i = 0; i + 2 < n; ++i) {
            if (t.theta[i] < 0.0) {
                os << "theta(" << i + 1 << ") = " << t.theta[i] << " must be >= 0";
                break;
            }
            if (t.theta[i] > t.theta[n - 2]) {
                os << "theta(" << i + 1 << ") = " << t.theta[i] << " exceeds theta(" << n - 1
                   << ") = " << t.theta[n - 2];
                break;
            }
        }
    }
    r.witness = os.str();
    r.ok = r.witness.empty();
    return r;
}

LinearThreshold project_theta(const LinearThreshold& t) {
    LinearThreshold p = t;
    const std::size_t n = p.theta.size();
    if (n == 0) return p;
    p.theta[n - 1] = std::max(p.theta[n - 1], kThetaFloor);
    if (n >= 2) {
        p.theta[n - 2] = std::max(p.theta[n - 2], 1.0);
        for (std::size_t i = 0; i + 2 < n; ++i) p.theta[i] = std::clamp(p.theta[i], 0.0, p.theta[n - 2]);
    }
    return p;
}

Vec sample_prior(int X, Rng& rng) {
    Vec pi(static_cast<std::size_t>(X), 0.0);
    double tot = 0.0;
    for (std::size_t i = 1; i < pi.size(); ++i) {
        pi[i] = exponential1(rng);
        tot += pi[i];
    }
    for (std::size_t i = 1; i < pi.size(); ++i) pi[i] /= tot;
    return pi;
}

PathCost sample_path_cost(const LinearThreshold& t, const Vec& pi0, const DetectionModel& m,
                          Rng& rng, long max_horizon) {
    const Vec C = transformed_cost(m);
    const double cmax = max_abs(C);
    PathCost out;
    Vec pi = pi0;
    std::size_t x = draw_index(pi0, rng);
    double disc = 1.0;
    for (long k = 0; k < max_horizon; ++k) {
        if (linear_decide(t, pi) == 1) {
            out.stopped = true;
            out.steps = k;
            return out;
        }
        out.cost += disc * dot(C, pi);
        disc *= m.rho;
        if (m.rho < 1.0 && disc * cmax / (1.0 - m.rho) < 1e-8) {
            out.steps = k + 1;
            return out;
        }
        x = draw_index(m.P.row(x), rng);
        std::size_t y = draw_index(m.B.row(x), rng);
        int a = local_decision(pi, static_cast<int>(y), m);
        pi = social_filter(pi, a, m).posterior;
    }
    out.steps = max_horizon;
    out.truncated = !(m.rho < 1.0);
    return out;
}

double estimate_cost(const LinearThreshold& t, const DetectionModel& m, int n,
                     std::uint64_t master, std::uint64_t base, long max_horizon, int* truncated) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        Rng rng = stream_rng(master, base + static_cast<std::uint64_t>(i));
        Vec pi0 = sample_prior(m.X, rng);
        PathCost pc = sample_path_cost(t, pi0, m, rng, max_horizon);
        if (pc.truncated && truncated) ++*truncated;
        total += pc.cost;
    }
    return total / n;
}

SpsaResult spsa_optimize(const DetectionModel& m, const SpsaConfig& cfg) {
    require_valid(m);
    if (!(cfg.a > 0.0) || !(cfg.c > 0.0) || !(cfg.alpha > 0.0) || !(cfg.gamma > 0.0))
        throw Error(Errc::invalid_argument, "SPSA gains must be positive");
    if (cfg.iterations < 1 || cfg.priors < 1 || cfg.heldout < 1 || cfg.eval_every < 1)
        throw Error(Errc::invalid_argument, "SPSA counts must be positive");
    const std::size_t n = static_cast<std::size_t>(m.X) - 1;
    LinearThreshold theta;
    if (cfg.theta0.empty()) {
        theta.theta.assign(n, 0.5);
        if (n >= 2) theta.theta[n - 2] = 1.0;
    } else {
        if (cfg.theta0.size() != n) throw Error(Errc::invalid_argument, "theta0 must have X-1 entries");
        theta.theta = cfg.theta0;
    }
    theta = project_theta(theta);
    const double A = cfg.A < 0.0 ? 0.1 * cfg.iterations : cfg.A;
    const std::uint64_t heldout_master = splitmix64(cfg.seed ^ 0x5eed5eed5eed5eedULL);
    const std::uint64_t delta_master = splitmix64(cfg.seed + 0x9e3779b97f4a7c15ULL);

    SpsaResult res;
    double a = cfg.a;
    auto gradient = [&](const LinearThreshold& at, int it, double cn, std::uint64_t master, Vec& g) {
        Rng drng = stream_rng(delta_master, static_cast<std::uint64_t>(it));
        Vec delta(n);
        for (double& d : delta) d = uniform01(drng) < 0.5 ? -1.0 : 1.0;
        LinearThreshold plus = at, minus = at;
        for (std::size_t i = 0; i < n; ++i) {
            plus.theta[i] += cn * delta[i];
            minus.theta[i] -= cn * delta[i];
        }
        plus = project_theta(plus);
        minus = project_theta(minus);
        // Common random numbers: both sides replay the same prior and path seeds.
        const std::uint64_t base = static_cast<std::uint64_t>(it) * static_cast<std::uint64_t>(cfg.priors);
        const double jp = estimate_cost(plus, m, cfg.priors, master, base, cfg.max_horizon, &res.truncated_paths);
        const double jm = estimate_cost(minus, m, cfg.priors, master, base, cfg.max_horizon, &res.truncated_paths);
        g.resize(n);
        for (std::size_t i = 0; i < n; ++i) g[i] = (jp - jm) / (2.0 * cn * delta[i]);
        return 0.5 * (jp + jm);
    };
    if (cfg.calibrate_step > 0.0) {
        const std::uint64_t calib_master = splitmix64(cfg.seed ^ 0xca11b7a7e0000000ULL);
        double mag = 0.0;
        Vec g;
        for (int k = 0; k < cfg.calibration_draws; ++k) {
            gradient(theta, k, cfg.c, calib_master, g);
            mag += max_abs(g);
        }
        mag /= std::max(1, cfg.calibration_draws);
        if (mag > 0.0) a = cfg.calibrate_step * std::pow(1.0 + A, cfg.alpha) / mag;
    }
    res.a_used = a;
    auto heldout = [&](const LinearThreshold& t) {
        return estimate_cost(t, m, cfg.heldout, heldout_master, 0, cfg.max_horizon, &res.truncated_paths);
    };
    res.theta_star = theta;
    res.best_cost = heldout(theta);

    for (int it = 0; it < cfg.iterations; ++it) {
        const double an = a / std::pow(it + 1 + A, cfg.alpha);
        const double cn = cfg.c / std::pow(it + 1, cfg.gamma);
        Vec g;
        const double j = gradient(theta, it, cn, cfg.seed, g);
        res.trace.push_back({it, theta.theta, j});
        for (std::size_t i = 0; i < n; ++i) theta.theta[i] -= an * g[i];
        theta = project_theta(theta);
        if ((it + 1) % cfg.eval_every == 0 || it + 1 == cfg.iterations) {
            double h = heldout(theta);
            if (h < res.best_cost) {
                res.best_cost = h;
                res.theta_star = theta;
            }
        }
    }
    return res;
}

}  // namespace sqd
