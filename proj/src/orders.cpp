#include "orders.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "error.hpp"
#include "filters.hpp"
#include "geometry.hpp"

namespace sqd {

bool mlr_le(const Vec& p1, const Vec& p2, double slack) {
    for (std::size_t i = 0; i < p1.size(); ++i)
        for (std::size_t j = i + 1; j < p1.size(); ++j)
            if (p2[i] * p1[j] > p1[i] * p2[j] + slack) return false;
    return true;
}

MlrRelation mlr_leq(const Vec& p1, const Vec& p2, double slack) {
    if (mlr_le(p1, p2, slack)) return MlrRelation::leq;
    if (mlr_le(p2, p1, slack)) return MlrRelation::geq_only;
    return MlrRelation::incomparable;
}

bool fosd_leq(const Vec& p1, const Vec& p2, double slack) {
    double t1 = 0.0, t2 = 0.0;
    for (std::size_t k = p1.size(); k-- > 0;) {
        t1 += p1[k];
        t2 += p2[k];
        if (t1 > t2 + slack) return false;
    }
    return true;
}

Tp2Result is_tp2(const Matrix& M, double slack) {
    Tp2Result r;
    for (std::size_t i = 0; i < M.rows(); ++i)
        for (std::size_t i2 = i + 1; i2 < M.rows(); ++i2)
            for (std::size_t j = 0; j < M.cols(); ++j)
                for (std::size_t j2 = j + 1; j2 < M.cols(); ++j2) {
                    double minor = M(i, j) * M(i2, j2) - M(i, j2) * M(i2, j);
                    if (minor < -slack) {
                        r.ok = false;
                        r.row1 = static_cast<int>(i) + 1;
                        r.row2 = static_cast<int>(i2) + 1;
                        r.col1 = static_cast<int>(j) + 1;
                        r.col2 = static_cast<int>(j2) + 1;
                        r.minor = minor;
                        return r;
                    }
                }
    return r;
}

bool single_crossing(const Matrix& g, double slack) {
    for (std::size_t a = 0; a < g.cols(); ++a)
        for (std::size_t ab = a + 1; ab < g.cols(); ++ab)
            for (std::size_t y = 0; y < g.rows(); ++y) {
                if (g(y, a) - g(y, ab) < -slack) continue;
                for (std::size_t yb = y + 1; yb < g.rows(); ++yb)
                    if (g(yb, a) - g(yb, ab) < -slack) return false;
            }
    return true;
}

bool submodular(const Matrix& table, double slack) {
    for (std::size_t u = 0; u < table.cols(); ++u)
        for (std::size_t ub = 0; ub < u; ++ub)
            for (std::size_t r = 0; r + 1 < table.rows(); ++r) {
                double lo = table(r, u) - table(r, ub);
                double hi = table(r + 1, u) - table(r + 1, ub);
                if (hi > lo + slack) return false;
            }
    return true;
}

const char* status_name(Status s) {
    switch (s) {
        case Status::pass: return "pass";
        case Status::fail: return "fail";
        case Status::not_applicable: return "n/a";
    }
    return "?";
}

const AssumptionEntry* AssumptionReport::find(const std::string& name) const {
    for (const auto& e : entries)
        if (e.name == name) return &e;
    return nullptr;
}

bool AssumptionReport::passes(const std::vector<std::string>& names) const {
    for (const auto& n : names) {
        const auto* e = find(n);
        if (!e || e->status != Status::pass) return false;
    }
    return true;
}

namespace {

std::string fmt_vec(const Vec& v) {
    std::ostringstream os;
    os.precision(6);
    os << "(";
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
    os << ")";
    return os.str();
}

AssumptionEntry tp2_entry(const std::string& name, const std::string& what, const Matrix& M,
                          double slack) {
    AssumptionEntry e{name, Status::pass, "", 0.0};
    auto r = is_tp2(M, slack);
    if (!r.ok) {
        std::ostringstream os;
        os.precision(6);
        os << what << " minor rows (" << r.row1 << "," << r.row2 << ") cols (" << r.col1 << ","
           << r.col2 << ") = " << r.minor;
        e.status = Status::fail;
        e.witness = os.str();
        e.margin = r.minor;
    }
    return e;
}

AssumptionEntry na(const std::string& name, const std::string& why) {
    return {name, Status::not_applicable, why, 0.0};
}

// Track the worst inequality margin; record a witness at the first failure.
struct Worst {
    double margin = std::numeric_limits<double>::infinity();
    std::string witness;
    void see(double m, const std::string& w) {
        if (m < margin) {
            margin = m;
            witness = w;
        }
    }
};

AssumptionEntry from_worst(const std::string& name, const Worst& w, double slack) {
    AssumptionEntry e{name, Status::pass, "", w.margin};
    if (w.margin < -slack) {
        e.status = Status::fail;
        e.witness = w.witness;
    } else {
        std::ostringstream os;
        os.precision(6);
        os << "min margin " << w.margin;
        e.witness = os.str();
    }
    return e;
}

}  // namespace

AssumptionReport check_assumptions(const DetectionModel& m, double slack) {
    require_valid(m);
    AssumptionReport rep;
    const Vec C = transformed_cost(m);
    const std::size_t X = static_cast<std::size_t>(m.X);

    rep.entries.push_back(tp2_entry("A1", "B", m.B, slack));
    rep.entries.push_back(tp2_entry("A2", "P", m.P, slack));

    {
        Worst w;
        for (std::size_t j = 0; j + 1 < X; ++j) {
            std::ostringstream os;
            os << "C_" << j + 1 << " = " << C[j] << " <= C_" << j + 2 << " = " << C[j + 1];
            w.see(C[j] - C[j + 1], os.str());
        }
        // Strict decrease: a zero gap is a violation.
        AssumptionEntry e{"A3", Status::pass, "", w.margin};
        if (!(w.margin > 0.0)) {
            e.status = Status::fail;
            e.witness = w.witness;
        } else {
            e.witness = "C strictly decreasing";
        }
        rep.entries.push_back(e);
    }
    {
        const Vec Pf = mat_vec(m.P, m.f);
        Worst w;
        for (std::size_t i = 1; i < X; ++i) {
            double bound = std::max(1.0, m.rho * Pf[i] - m.d);
            std::ostringstream os;
            os << "f_" << i + 1 << " = " << m.f[i] << " < max{1, rho f'P'e_" << i + 1
               << " - d} = " << bound;
            w.see(m.f[i] - bound, os.str());
            for (std::size_t j = i + 1; j < X; ++j) {
                double rhs = m.rho * (Pf[j] - Pf[i]);
                std::ostringstream os2;
                os2 << "f_" << j + 1 << " - f_" << i + 1 << " = " << m.f[j] - m.f[i]
                    << " < rho f'P'(e_" << j + 1 << " - e_" << i + 1 << ") = " << rhs;
                w.see(m.f[j] - m.f[i] - rhs, os2.str());
            }
        }
        rep.entries.push_back(from_worst("A3-sufficient", w, slack));
    }

    if (m.A != 2) {
        for (const char* n : {"S", "PH(i)", "PH(ii)", "C1", "C2", "C3"})
            rep.entries.push_back(na(n, "requires A = 2"));
        return rep;
    }

    {
        AssumptionEntry e{"S", Status::pass, "", 0.0};
        double g1 = m.c(0, 1) - m.c(0, 0);
        double g2 = m.c(1, 0) - m.c(1, 1);
        e.margin = std::min(g1, g2);
        std::ostringstream os;
        os << "c(1,2) - c(1,1) = " << g1 << ", c(2,1) - c(2,2) = " << g2;
        e.witness = os.str();
        if (!(g1 > 0.0 && g2 > 0.0)) e.status = Status::fail;
        rep.entries.push_back(e);
    }
    {
        AssumptionEntry e{"PH(i)", Status::pass, "C_j < 0 for j >= 2", 0.0};
        double worst = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i < X; ++i) {
            if (C[i] > worst) worst = C[i];
            if (!(C[i] < 0.0) && e.status == Status::pass) {
                std::ostringstream os;
                os << "C_" << i + 1 << " = " << C[i] << " is not < 0";
                e.status = Status::fail;
                e.witness = os.str();
            }
        }
        e.margin = -worst;
        rep.entries.push_back(e);
    }

    const PolytopePartition part = build_partition(m);
    {
        AssumptionEntry e{"PH(ii)", Status::pass, "e_2..e_X in P_1", 0.0};
        for (std::size_t i = 1; i < X; ++i) {
            Vec ei = unit_vector(X, i);
            int l = classify(ei, part);
            if (l != 1) {
                std::ostringstream os;
                os.precision(6);
                os << "e_" << i + 1 << " lies in P_" << l << " (n_1' e_" << i + 1 << " = "
                   << part.normals[0][i] << ")";
                e.status = Status::fail;
                e.witness = os.str();
                e.margin = part.normals[0][i];
                break;
            }
        }
        rep.entries.push_back(e);
    }

    std::vector<Vec> nu;
    std::string nu_error;
    try {
        nu = stop_hyperplane_vertices(m);
    } catch (const Error& err) {
        nu_error = err.what();
    }
    if (nu.empty()) {
        rep.entries.push_back(na("C1", "vertices undefined: " + nu_error));
    } else {
        Worst w;
        for (std::size_t j = 0; j < nu.size(); ++j) {
            int l = classify(nu[j], part);
            const Matrix& R = region(part, l).R;
            Vec pred = predict(nu[j], m);
            for (std::size_t a = 0; a < 2; ++a) {
                double v = 0.0;
                for (std::size_t i = 0; i < X; ++i) v += C[i] * R(i, a) * pred[i];
                std::ostringstream os;
                os.precision(6);
                os << "C' R_" << a + 1 << "^{P_" << l << "} P' nu_" << j + 1 << " = " << v
                   << " at nu_" << j + 1 << " = " << fmt_vec(nu[j]);
                w.see(v, os.str());
            }
        }
        rep.entries.push_back(from_worst("C1", w, slack));
    }

    std::vector<Vec> nubar;
    std::string nubar_error;
    try {
        nubar = eta_vertices(m);
    } catch (const Error& err) {
        nubar_error = err.what();
    }
    if (nubar.empty()) {
        rep.entries.push_back(na("C2", "vertices undefined: " + nubar_error));
    } else {
        Worst w;
        const Vec& nY = part.normals.back();
        for (std::size_t j = 0; j < nubar.size(); ++j) {
            double v = dot(nY, predict(nubar[j], m));
            std::ostringstream os;
            os.precision(6);
            os << "(c1-c2)' B_Y (P')^2 nubar_" << j + 1 << " = " << v << " at nubar_" << j + 1
               << " = " << fmt_vec(nubar[j]);
            w.see(-v, os.str());
        }
        rep.entries.push_back(from_worst("C2", w, slack));
    }

    if (nu.empty()) {
        rep.entries.push_back(na("C3", "vertices undefined: " + nu_error));
    } else {
        AssumptionEntry e{"C3", Status::pass, "every nu_j in P_{Y+1}", 0.0};
        const Vec& nY = part.normals.back();
        double worst = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < nu.size(); ++j) {
            worst = std::min(worst, -dot(nY, nu[j]));
            int l = classify(nu[j], part);
            if (l != m.Y + 1 && e.status == Status::pass) {
                std::ostringstream os;
                os << "nu_" << j + 1 << " = " << fmt_vec(nu[j]) << " lies in P_" << l;
                e.status = Status::fail;
                e.witness = os.str();
            }
        }
        e.margin = worst;
        rep.entries.push_back(e);
    }

    if (m.X == 2 && m.Y == 2) {
        const Matrix& B = m.B;
        double c11 = m.c(0, 0), c12 = m.c(0, 1), c21 = m.c(1, 0), c22 = m.c(1, 1);
        double den = (c21 - c22) * B(1, 1) - (c11 - c12) * B(1, 0);
        if (den == 0.0 || B(1, 1) * B(0, 0) == 0.0) {
            rep.entries.push_back(na("multi-threshold", "bound has a zero denominator"));
        } else {
            double bound = B(0, 1) / (B(1, 1) * B(0, 0)) *
                           ((c21 - c22) * B(1, 0) * B(0, 1) - (c11 - c21) * B(0, 0) * B(1, 1)) / den;
            AssumptionEntry e{"multi-threshold", Status::pass, "", m.P(1, 1) - bound};
            std::ostringstream os;
            os.precision(6);
            os << "P22 = " << m.P(1, 1) << " vs bound " << bound;
            e.witness = os.str();
            if (m.P(1, 1) < bound - slack) e.status = Status::fail;
            rep.entries.push_back(e);
        }
    }
    return rep;
}

}  // namespace sqd
