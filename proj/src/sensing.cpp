#include "sensing.hpp"

#include <algorithm>
#include <limits>
#include <sstream>
#include <tuple>

#include "error.hpp"
#include "geometry.hpp"

namespace sqd {

ValidationReport validate_sensing(const SensingModel& sm) {
    ValidationReport r = validate_model(sm.base);
    const auto X = static_cast<std::size_t>(sm.base.X);
    const auto Y = static_cast<std::size_t>(sm.base.Y);
    for (const auto& [name, B] : {std::pair<const char*, const Matrix*>{"B1", &sm.B1}, {"B2", &sm.B2}}) {
        if (B->rows() != X || B->cols() != Y) {
            r.violations.push_back({name, -1, -1, std::string(name) + " must be X x Y"});
            continue;
        }
        check_stochastic(*B, name, r);
    }
    if (sm.base.A != 2) r.violations.push_back({"A", -1, -1, "sensing models have exactly two modes"});
    if (sm.has_factor && r.ok()) {
        for (const auto& [name, Q, Ba] : {std::tuple<const char*, const Matrix*, const Matrix*>{"Q1", &sm.Q1, &sm.B1},
                                          {"Q2", &sm.Q2, &sm.B2}}) {
            if (Q->rows() != Y || Q->cols() != Y) {
                r.violations.push_back({name, -1, -1, std::string(name) + " must be Y x Y"});
                continue;
            }
            check_stochastic(*Q, name, r);
            if (max_abs_diff(matmul(sm.base.B, *Q), *Ba) > kRowSumTol)
                r.violations.push_back({name, -1, -1, std::string("B ") + name + " does not reproduce the mode matrix"});
        }
    }
    return r;
}

void require_valid_sensing(const SensingModel& sm) {
    ValidationReport r = validate_sensing(sm);
    if (!r.ok()) throw Error(Errc::validation, r.to_string());
}

const Matrix& mode_matrix(const SensingModel& sm, int a) {
    return a == 0 ? sm.B1 : sm.B2;
}

int mode_select(const Vec& pi, const SensingModel& sm) {
    const Vec u = predict(pi, sm.base);
    double c0 = 0.0, c1 = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        c0 += sm.base.c(i, 0) * u[i];
        c1 += sm.base.c(i, 1) * u[i];
    }
    return c1 < c0 ? 1 : 0;
}

FilterOutput mode_filter(const Vec& pi, int y, int a, const SensingModel& sm) {
    const Matrix& B = mode_matrix(sm, a);
    const Vec u = predict(pi, sm.base);
    FilterOutput out;
    out.posterior.resize(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) out.posterior[i] = B(i, static_cast<std::size_t>(y)) * u[i];
    out.normalizer = sum(out.posterior);
    if (!(out.normalizer > 0.0)) throw Error(Errc::numeric, "impossible observation under current belief");
    for (double& v : out.posterior) v /= out.normalizer;
    return out;
}

BranchFn sensing_branches(const SensingModel& sm) {
    return [&sm](const Vec& pi, Branches& out) {
        out.clear();
        const Matrix& B = mode_matrix(sm, mode_select(pi, sm));
        const Vec pred = predict(pi, sm.base);
        for (std::size_t y = 0; y < B.cols(); ++y) {
            Vec u(pred.size());
            for (std::size_t i = 0; i < u.size(); ++i) u[i] = B(i, y) * pred[i];
            double s = sum(u);
            if (s < kSigmaFloor) continue;
            for (double& x : u) x /= s;
            out.emplace_back(s, std::move(u));
        }
    };
}

PolicySolution value_iterate_sensing(const SensingModel& sm, const SimplexGrid& grid,
                                     const SolveOptions& opt) {
    require_valid_sensing(sm);
    return bellman_solve(sm.base, grid, opt, sensing_branches(sm), "sensing");
}

int y_max(const Matrix& B) {
    for (std::size_t y = B.cols(); y-- > 0;)
        for (std::size_t i = 0; i < B.rows(); ++i)
            if (B(i, y) > 0.0) return static_cast<int>(y);
    return -1;
}

namespace {

AssumptionEntry na(const std::string& name, const std::string& why) {
    return {name, Status::not_applicable, why, 0.0};
}

AssumptionEntry tp2(const std::string& name, const Matrix& M, double slack) {
    Tp2Result t = is_tp2(M, slack);
    AssumptionEntry e{name, t.ok ? Status::pass : Status::fail, "", t.minor};
    if (!t.ok) {
        std::ostringstream os;
        os << "minor rows (" << t.row1 << "," << t.row2 << ") cols (" << t.col1 << "," << t.col2
           << ") = " << t.minor;
        e.witness = os.str();
    }
    return e;
}

struct Worst {
    double margin = std::numeric_limits<double>::infinity();
    std::string where;
};

void note(Worst& w, double v, int j, int y) {
    if (v < w.margin) {
        w.margin = v;
        std::ostringstream os;
        os << "j=" << j + 1 << " y=" << y + 1 << " value " << v;
        w.where = os.str();
    }
}

AssumptionEntry entry(const std::string& name, const Worst& w, double slack) {
    AssumptionEntry e{name, w.margin >= -slack ? Status::pass : Status::fail, w.where, w.margin};
    return e;
}

}  // namespace

AssumptionReport check_sensing_assumptions(const SensingModel& sm, double slack) {
    require_valid_sensing(sm);
    const DetectionModel& m = sm.base;
    AssumptionReport rep;
    rep.entries.push_back(tp2("A1(B1)", sm.B1, slack));
    rep.entries.push_back(tp2("A1(B2)", sm.B2, slack));
    rep.entries.push_back(tp2("A2", m.P, slack));
    const Vec C = transformed_cost(m);
    {
        AssumptionEntry e{"A3", Status::pass, "C strictly decreasing", std::numeric_limits<double>::infinity()};
        for (std::size_t i = 0; i + 1 < C.size(); ++i) e.margin = std::min(e.margin, C[i] - C[i + 1]);
        if (!(e.margin > 0.0)) e.status = Status::fail;
        rep.entries.push_back(e);
    }

    // (C1): C' B^(a)_y P' nu_j >= 0, mode a fixed by the polytope holding {C' pi = 0}.
    std::vector<Vec> nu;
    std::string nu_error;
    try {
        nu = stop_hyperplane_vertices(m);
    } catch (const Error& ex) {
        nu_error = ex.what();
    }
    int mode = -1;
    if (nu_error.empty()) {
        mode = mode_select(nu.front(), sm);
        for (const Vec& v : nu)
            if (mode_select(v, sm) != mode) {
                nu_error = "{C' pi = 0} meets both mode polytopes";
                break;
            }
    }
    auto c1_value = [&](const Vec& v, std::size_t y) {
        const Matrix& B = mode_matrix(sm, mode);
        const Vec u = predict(v, m);
        double s = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) s += C[i] * B(i, y) * u[i];
        return s;
    };
    bool c1_full = false, c1_top = false;
    if (!nu_error.empty()) {
        rep.entries.push_back(na("C1", nu_error));
        rep.entries.push_back(na("C1@ymax", nu_error));
    } else {
        Worst full, top;
        const int ym = y_max(mode_matrix(sm, mode));
        for (std::size_t j = 0; j < nu.size(); ++j) {
            for (int y = 0; y < m.Y; ++y) note(full, c1_value(nu[j], static_cast<std::size_t>(y)), static_cast<int>(j), y);
            note(top, c1_value(nu[j], static_cast<std::size_t>(ym)), static_cast<int>(j), ym);
        }
        AssumptionEntry ef = entry("C1", full, slack);
        ef.witness = "mode " + std::to_string(mode + 1) + "; " + ef.witness;
        rep.entries.push_back(ef);
        rep.entries.push_back(entry("C1@ymax", top, slack));
        c1_full = ef.status == Status::pass;
        c1_top = rep.entries.back().status == Status::pass;
    }

    // (C2): (c1 - c2)' P' B^(1)_y P' nubar_j <= 0, nubar_j on {(c1 - c2)' P' pi = 0}.
    Vec dc(static_cast<std::size_t>(m.X));
    for (std::size_t i = 0; i < dc.size(); ++i) dc[i] = m.c(i, 0) - m.c(i, 1);
    std::vector<Vec> nubar;
    std::string nubar_error;
    try {
        nubar = hyperplane_vertices(mat_vec(m.P, dc), "n");
    } catch (const Error& ex) {
        nubar_error = ex.what();
    }
    auto c2_value = [&](const Vec& v, std::size_t y) {
        Vec u = predict(v, m);
        for (std::size_t i = 0; i < u.size(); ++i) u[i] *= sm.B1(i, y);
        return -dot(dc, predict(u, m));
    };
    bool c2_full = false, c2_top = false;
    if (!nubar_error.empty()) {
        rep.entries.push_back(na("C2", "vertices undefined: " + nubar_error));
        rep.entries.push_back(na("C2@ymax", "vertices undefined: " + nubar_error));
    } else {
        Worst full, top;
        const int ym = y_max(sm.B1);
        for (std::size_t j = 0; j < nubar.size(); ++j) {
            for (int y = 0; y < m.Y; ++y) note(full, c2_value(nubar[j], static_cast<std::size_t>(y)), static_cast<int>(j), y);
            note(top, c2_value(nubar[j], static_cast<std::size_t>(ym)), static_cast<int>(j), ym);
        }
        rep.entries.push_back(entry("C2", full, slack));
        rep.entries.push_back(entry("C2@ymax", top, slack));
        c2_full = rep.entries[rep.entries.size() - 2].status == Status::pass;
        c2_top = rep.entries.back().status == Status::pass;
    }

    // Reading only y_max is justified under (A1)(A2)(A3); report any case
    // where the shortcut passes but the full check does not.
    {
        const bool prereq = rep.find("A1(B1)")->status == Status::pass &&
                            rep.find("A1(B2)")->status == Status::pass &&
                            rep.find("A2")->status == Status::pass && rep.find("A3")->status == Status::pass;
        std::ostringstream os;
        bool bad = false;
        if (nu_error.empty() && c1_top && !c1_full) {
            bad = true;
            os << "C1 passes at y_max only; ";
        }
        if (nubar_error.empty() && c2_top && !c2_full) {
            bad = true;
            os << "C2 passes at y_max only; ";
        }
        AssumptionEntry e{"ymax-consistency", Status::pass, "", 0.0};
        if (bad) {
            e.status = Status::fail;
            os << (prereq ? "shortcut inconsistent although (A1)(A2)(A3) hold"
                          : "prerequisite failure: (A1)(A2)(A3) do not all hold");
            e.witness = os.str();
        } else {
            e.witness = prereq ? "prerequisites hold" : "prerequisites fail; shortcut not justified";
        }
        rep.entries.push_back(e);
    }
    return rep;
}

}  // namespace sqd
