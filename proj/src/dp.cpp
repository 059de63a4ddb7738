#include "dp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "error.hpp"
#include "filters.hpp"
#include "geometry.hpp"

namespace sqd {

SimplexGrid SimplexGrid::make(int X, int resolution) {
    SimplexGrid g;
    g.X = X;
    g.resolution = resolution;
    if (X == 2) {
        if (resolution < 2) throw Error(Errc::invalid_argument, "X=2 grid needs at least 2 points");
        for (int i = 0; i < resolution; ++i) {
            double p = static_cast<double>(i) / (resolution - 1);
            g.points.push_back({1.0 - p, p});
        }
    } else if (X == 3) {
        if (resolution < 1) throw Error(Errc::invalid_argument, "X=3 lattice density must be >= 1");
        const double m = resolution;
        for (int i = 0; i <= resolution; ++i)
            for (int j = 0; j <= resolution - i; ++j)
                g.points.push_back({i / m, j / m, (resolution - i - j) / m});
    } else {
        throw Error(Errc::unsupported, "grids are implemented for X = 2 and X = 3");
    }
    return g;
}

double SimplexGrid::step() const {
    return X == 2 ? 1.0 / (resolution - 1) : 1.0 / resolution;
}

std::size_t SimplexGrid::lattice_index(int i, int j) const {
    const auto m = static_cast<std::size_t>(resolution);
    const auto ii = static_cast<std::size_t>(i);
    const std::size_t offset = ii * (m + 1) - (ii == 0 ? 0 : ii * (ii - 1) / 2);
    return offset + static_cast<std::size_t>(j);
}

namespace {

void push(Stencil& s, std::size_t idx, double w) {
    s.idx[static_cast<std::size_t>(s.n)] = static_cast<std::uint32_t>(idx);
    s.w[static_cast<std::size_t>(s.n)] = w;
    ++s.n;
}

void tidy(Stencil& s) {
    double tot = 0.0;
    for (int k = 0; k < s.n; ++k) {
        s.w[static_cast<std::size_t>(k)] = std::max(0.0, s.w[static_cast<std::size_t>(k)]);
        tot += s.w[static_cast<std::size_t>(k)];
    }
    for (int k = 0; k < s.n; ++k) s.w[static_cast<std::size_t>(k)] /= tot;
}

// Scaled lattice coordinates (u, v) = m (pi(1), pi(2)), projected into the triangle.
std::pair<double, double> lattice_coords(const SimplexGrid& grid, const Vec& pi) {
    const double m = grid.resolution;
    double u = std::max(0.0, pi[0]) * m;
    double v = std::max(0.0, pi[1]) * m;
    if (u + v > m) {
        double s = m / (u + v);
        u *= s;
        v *= s;
    }
    return {u, v};
}

}  // namespace

std::size_t nearest_point(const SimplexGrid& grid, const Vec& pi) {
    if (grid.X == 2) {
        double x = std::clamp(pi[1], 0.0, 1.0) * (grid.resolution - 1);
        return static_cast<std::size_t>(std::lround(x));
    }
    const int m = grid.resolution;
    auto [u, v] = lattice_coords(grid, pi);
    int i0 = std::min(static_cast<int>(std::floor(u)), m);
    int j0 = std::min(static_cast<int>(std::floor(v)), m - i0);
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = grid.lattice_index(i0, j0);
    for (int i = i0; i <= i0 + 1; ++i)
        for (int j = j0; j <= j0 + 1; ++j) {
            if (i > m || j + i > m) continue;
            double du = i - u, dv = j - v, dw = (m - i - j) - (m - u - v);
            double d2 = du * du + dv * dv + dw * dw;
            if (d2 < best) {
                best = d2;
                arg = grid.lattice_index(i, j);
            }
        }
    return arg;
}

Stencil locate(const SimplexGrid& grid, const Vec& pi, Interpolation mode) {
    Stencil s;
    if (mode == Interpolation::nearest) {
        push(s, nearest_point(grid, pi), 1.0);
        return s;
    }
    if (grid.X == 2) {
        const int N = grid.resolution;
        double x = std::clamp(pi[1], 0.0, 1.0) * (N - 1);
        int j = std::min(static_cast<int>(std::floor(x)), N - 2);
        double t = x - j;
        push(s, static_cast<std::size_t>(j), 1.0 - t);
        if (t > 0.0) push(s, static_cast<std::size_t>(j + 1), t);
        tidy(s);
        return s;
    }
    const int m = grid.resolution;
    auto [u, v] = lattice_coords(grid, pi);
    int i0 = std::min(static_cast<int>(std::floor(u)), m);
    int j0 = std::min(static_cast<int>(std::floor(v)), m - i0);
    double fu = u - i0, fv = v - j0;
    if (i0 + j0 == m) {
        push(s, grid.lattice_index(i0, j0), 1.0);
    } else if (fu + fv <= 1.0 || i0 + j0 + 1 == m) {
        push(s, grid.lattice_index(i0, j0), 1.0 - fu - fv);
        push(s, grid.lattice_index(i0 + 1, j0), fu);
        push(s, grid.lattice_index(i0, j0 + 1), fv);
    } else {
        push(s, grid.lattice_index(i0 + 1, j0 + 1), fu + fv - 1.0);
        push(s, grid.lattice_index(i0 + 1, j0), 1.0 - fv);
        push(s, grid.lattice_index(i0, j0 + 1), 1.0 - fu);
    }
    tidy(s);
    return s;
}

double interpolate(const SimplexGrid& grid, const Vec& values, const Vec& pi, Interpolation mode) {
    Stencil s = locate(grid, pi, mode);
    double out = 0.0;
    for (int k = 0; k < s.n; ++k)
        out += s.w[static_cast<std::size_t>(k)] * values[s.idx[static_cast<std::size_t>(k)]];
    return out;
}

BranchFn social_branches(const DetectionModel& m) {
    return [&m](const Vec& pi, Branches& out) {
        out.clear();
        const Vec pred = predict(pi, m);
        const Matrix Bs = decision_selector(pi, m).Bs;
        for (std::size_t a = 0; a < Bs.cols(); ++a) {
            Vec u(pred.size());
            for (std::size_t i = 0; i < u.size(); ++i) u[i] = Bs(i, a) * pred[i];
            double s = sum(u);
            if (s < kSigmaFloor) continue;
            for (double& x : u) x /= s;
            out.emplace_back(s, std::move(u));
        }
    };
}

BranchFn classical_branches(const DetectionModel& m) {
    return [&m](const Vec& pi, Branches& out) {
        out.clear();
        const Vec pred = predict(pi, m);
        for (std::size_t y = 0; y < m.B.cols(); ++y) {
            Vec u(pred.size());
            for (std::size_t i = 0; i < u.size(); ++i) u[i] = m.B(i, y) * pred[i];
            double s = sum(u);
            if (s < kSigmaFloor) continue;
            for (double& x : u) x /= s;
            out.emplace_back(s, std::move(u));
        }
    };
}

double operating_cost(const DetectionModel& m, const Vec& pi) {
    const Vec pred = predict(pi, m);
    double total = 0.0;
    for (std::size_t y = 0; y < m.B.cols(); ++y) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < m.c.cols(); ++a) {
            double v = 0.0;
            for (std::size_t i = 0; i < pred.size(); ++i) v += m.c(i, a) * m.B(i, y) * pred[i];
            best = std::min(best, v);
        }
        total += best;
    }
    return total;
}

namespace {

struct Kernel {
    std::vector<std::size_t> start;
    std::vector<std::uint32_t> idx;
    std::vector<double> w;
};

Kernel build_kernel(const SimplexGrid& grid, const BranchFn& branches, Interpolation mode) {
    Kernel K;
    K.start.reserve(grid.size() + 1);
    K.start.push_back(0);
    Branches br;
    for (const Vec& pi : grid.points) {
        branches(pi, br);
        for (const auto& [sigma, post] : br) {
            Stencil s = locate(grid, post, mode);
            for (int k = 0; k < s.n; ++k) {
                K.idx.push_back(s.idx[static_cast<std::size_t>(k)]);
                K.w.push_back(sigma * s.w[static_cast<std::size_t>(k)]);
            }
        }
        K.start.push_back(K.idx.size());
    }
    return K;
}

double apply_row(const Kernel& K, std::size_t g, const Vec& V) {
    double s = 0.0;
    for (std::size_t e = K.start[g]; e < K.start[g + 1]; ++e) s += K.w[e] * V[K.idx[e]];
    return s;
}

Vec continue_costs(const DetectionModel& m, const SimplexGrid& grid, const SolveOptions& opt) {
    const Vec C = transformed_cost(m);
    Vec q(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
        q[g] = dot(C, grid.points[g]);
        if (opt.beta != 0.0) q[g] += opt.beta * operating_cost(m, grid.points[g]);
    }
    return q;
}

void check_inputs(const DetectionModel& m, const SimplexGrid& grid, const SolveOptions& opt) {
    require_valid(m);
    if (opt.horizon < 1) throw Error(Errc::invalid_argument, "horizon must be >= 1");
    if (grid.X != m.X) throw Error(Errc::invalid_argument, "grid dimension does not match the model");
}

void finish(PolicySolution& sol, const DetectionModel& m) {
    sol.Vbar.resize(sol.V.size());
    for (std::size_t g = 0; g < sol.V.size(); ++g) sol.Vbar[g] = sol.V[g] + dot(m.f, sol.grid.points[g]);
    sol.region.assign(sol.V.size(), 0);
    if (m.A == 2) {
        PolytopePartition part = build_partition(m);
        for (std::size_t g = 0; g < sol.V.size(); ++g) sol.region[g] = classify(sol.grid.points[g], part);
    }
}

}  // namespace

PolicySolution bellman_solve(const DetectionModel& m, const SimplexGrid& grid,
                             const SolveOptions& opt, const BranchFn& branches,
                             const std::string& kind) {
    check_inputs(m, grid, opt);
    const Kernel K = build_kernel(grid, branches, opt.interp);
    const Vec q = continue_costs(m, grid, opt);
    const std::size_t n = grid.size();

    PolicySolution sol;
    sol.kind = kind;
    sol.grid = grid;
    Vec V(n, 0.0);
    if (opt.init == InitialValue::neg_false_alarm)
        for (std::size_t g = 0; g < n; ++g) V[g] = -dot(m.f, grid.points[g]);
    Vec Vn(n), Q(n);
    for (int k = 1; k <= opt.horizon; ++k) {
        double delta = 0.0;
        for (std::size_t g = 0; g < n; ++g) {
            Q[g] = q[g] + m.rho * apply_row(K, g, V);
            Vn[g] = std::min(Q[g], 0.0);
            delta = std::max(delta, std::abs(Vn[g] - V[g]));
        }
        V.swap(Vn);
        sol.iterations = k;
        sol.final_sup_delta = delta;
        if (opt.tol > 0.0 && delta < opt.tol) break;
    }
    sol.V = std::move(V);
    sol.Q2 = std::move(Q);
    sol.mu.resize(n);
    for (std::size_t g = 0; g < n; ++g) sol.mu[g] = sol.Q2[g] >= 0.0 ? 1 : 2;
    finish(sol, m);
    return sol;
}

PolicySolution value_iterate_social(const DetectionModel& m, const SimplexGrid& grid,
                                    const SolveOptions& opt) {
    return bellman_solve(m, grid, opt, social_branches(m), "social");
}

PolicySolution value_iterate_classical(const DetectionModel& m, const SimplexGrid& grid,
                                       const SolveOptions& opt) {
    return bellman_solve(m, grid, opt, classical_branches(m), "classical");
}

PolicySolution evaluate_policy(const DetectionModel& m, const SimplexGrid& grid,
                               const std::vector<int>& mu, const SolveOptions& opt) {
    check_inputs(m, grid, opt);
    if (mu.size() != grid.size()) throw Error(Errc::invalid_argument, "policy size does not match grid");
    const Kernel K = build_kernel(grid, social_branches(m), opt.interp);
    const Vec q = continue_costs(m, grid, opt);
    const std::size_t n = grid.size();
    PolicySolution sol;
    sol.kind = "evaluation";
    sol.grid = grid;
    sol.mu = mu;
    Vec V(n, 0.0), Vn(n), Q(n);
    for (int k = 1; k <= opt.horizon; ++k) {
        double delta = 0.0;
        for (std::size_t g = 0; g < n; ++g) {
            Q[g] = q[g] + m.rho * apply_row(K, g, V);
            Vn[g] = mu[g] == 1 ? 0.0 : Q[g];
            delta = std::max(delta, std::abs(Vn[g] - V[g]));
        }
        V.swap(Vn);
        sol.iterations = k;
        sol.final_sup_delta = delta;
        if (opt.tol > 0.0 && delta < opt.tol) break;
    }
    sol.V = std::move(V);
    sol.Q2 = std::move(Q);
    finish(sol, m);
    return sol;
}

LineScan scan_lines(const PolicySolution& sol, int apex, const std::function<bool(std::size_t)>& keep) {
    const SimplexGrid& grid = sol.grid;
    if (grid.X != 3) throw Error(Errc::unsupported, "line scans are defined for X = 3");
    const int m = grid.resolution;
    // Lines through the apex vertex, keyed by the reduced direction of the
    // other two coordinates; ordered outward from the apex.
    std::map<std::pair<int, int>, std::vector<std::pair<int, std::size_t>>> lines;
    for (int i = 0; i <= m; ++i)
        for (int j = 0; j <= m - i; ++j) {
            int k = m - i - j;
            int a, b, depth;
            if (apex == 0) {
                a = j, b = k, depth = i;
            } else {
                a = i, b = j, depth = k;
            }
            std::size_t g = grid.lattice_index(i, j);
            if (a == 0 && b == 0) continue;
            int h = std::gcd(a, b);
            lines[{a / h, b / h}].push_back({depth, g});
        }
    const std::size_t apex_index = apex == 0 ? grid.lattice_index(m, 0) : grid.lattice_index(0, 0);
    LineScan out;
    for (auto& [key, pts] : lines) {
        pts.push_back({m, apex_index});
        std::sort(pts.begin(), pts.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
        int switches = 0, seen = 0, prev = 0;
        for (const auto& [depth, g] : pts) {
            if (keep && !keep(g)) continue;
            if (seen > 0 && sol.mu[g] != prev) ++switches;
            prev = sol.mu[g];
            ++seen;
        }
        if (seen < 2) continue;
        ++out.lines;
        if (switches > 1) ++out.lines_over_one;
        if (switches > out.max_switches) {
            out.max_switches = switches;
            std::ostringstream os;
            os << "direction (" << key.first << "," << key.second << ")";
            out.worst_line = os.str();
        }
    }
    return out;
}

StoppingSummary stopping_set(const PolicySolution& sol, const std::function<bool(std::size_t)>& keep) {
    StoppingSummary s;
    const SimplexGrid& grid = sol.grid;
    if (grid.X == 2) {
        for (std::size_t g = 0; g < grid.size(); ++g) {
            if (g > 0 && sol.mu[g] != sol.mu[g - 1]) ++s.crossings;
            if (sol.mu[g] != 1) continue;
            if (!s.intervals.empty() && s.intervals.back().last + 1 == g) {
                s.intervals.back().last = g;
                s.intervals.back().hi = grid.points[g][1];
            } else {
                s.intervals.push_back({grid.points[g][1], grid.points[g][1], g, g});
            }
        }
        return s;
    }
    const int m = grid.resolution;
    for (int i = 0; i <= m; ++i)
        for (int j = 0; j <= m - i; ++j) {
            std::size_t g = grid.lattice_index(i, j);
            if (sol.mu[g] != 1) continue;
            const int di[] = {1, -1, 0, 0, 1, -1};
            const int dj[] = {0, 0, 1, -1, -1, 1};
            for (int t = 0; t < 6; ++t) {
                int a = i + di[t], b = j + dj[t];
                if (a < 0 || b < 0 || a + b > m) continue;
                if (sol.mu[grid.lattice_index(a, b)] == 2) {
                    s.boundary.push_back(g);
                    break;
                }
            }
        }
    s.through_e1 = scan_lines(sol, 0, keep);
    s.through_eX = scan_lines(sol, 2, keep);
    return s;
}

double blackwell_gap(const PolicySolution& social, const PolicySolution& classical) {
    if (social.grid.X != classical.grid.X || social.grid.resolution != classical.grid.resolution)
        throw Error(Errc::invalid_argument, "solutions are on different grids");
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < social.V.size(); ++g) gap = std::min(gap, social.V[g] - classical.V[g]);
    return gap;
}

double max_midpoint_concavity_violation(const PolicySolution& sol) {
    if (sol.grid.X != 2) throw Error(Errc::unsupported, "midpoint concavity scan is defined for X = 2");
    const Vec& V = sol.V;
    const std::size_t n = V.size();
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < n; ++i)
        for (std::size_t h = 1; h <= i && i + h < n; ++h)
            worst = std::max(worst, 0.5 * (V[i - h] + V[i + h]) - V[i]);
    return worst;
}

double sequential_threshold(const DetectionModel& m) {
    if (m.X != 2) throw Error(Errc::unsupported, "sequential threshold requires X = 2");
    if (max_abs_diff(m.P, Matrix::identity(2)) != 0.0)
        throw Error(Errc::unsupported, "sequential threshold requires P = I");
    return m.d / (m.f[1] * (1.0 - m.rho) + m.d);
}

double sequential_value(const DetectionModel& m, const Vec& pi) {
    if (!(m.rho < 1.0)) throw Error(Errc::invalid_argument, "closed-form value needs rho < 1");
    return std::min(0.0, dot(transformed_cost(m), pi) / (1.0 - m.rho));
}

double geometric_threshold(const DetectionModel& m) {
    if (m.X != 2) throw Error(Errc::unsupported, "geometric threshold requires X = 2");
    double den = m.d + m.f[1] * (1.0 - m.rho * m.P(1, 1));
    if (den == 0.0) throw Error(Errc::numeric, "threshold denominator vanishes");
    return m.d / den;
}

BoundReport corollary_bound_check(const DetectionModel& m_eps, const SimplexGrid& grid,
                                  const SolveOptions& opt) {
    if (m_eps.X != 2) throw Error(Errc::unsupported, "bound check requires X = 2");
    if (!(m_eps.rho < 1.0)) throw Error(Errc::invalid_argument, "bound undefined for rho = 1");
    DetectionModel m0 = m_eps;
    m0.P = Matrix::identity(2);
    BoundReport r;
    r.eps = m_eps.P(1, 0);
    r.rhs = 4.0 * m_eps.rho * r.eps * std::max(m_eps.d, m_eps.f[1]) /
            ((1.0 - m_eps.rho) * (1.0 - m_eps.rho));
    r.mu0 = value_iterate_social(m0, grid, opt);
    r.mueps = value_iterate_social(m_eps, grid, opt);
    r.eval0 = evaluate_policy(m_eps, grid, r.mu0.mu, opt);
    r.total = grid.size();
    r.max_lhs = -std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < grid.size(); ++g) {
        if (r.mu0.mu[g] == r.mueps.mu[g]) ++r.agree;
        if (r.mu0.region[g] != r.mueps.region[g]) continue;
        ++r.qualifying;
        r.max_lhs = std::max(r.max_lhs, r.eval0.Vbar[g] - r.mueps.Vbar[g]);
    }
    r.holds = r.qualifying > 0 && r.max_lhs <= r.rhs;
    return r;
}

}  // namespace sqd
