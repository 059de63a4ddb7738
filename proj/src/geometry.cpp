#include "geometry.hpp"

#include <algorithm>
#include <sstream>

#include "error.hpp"
#include "orders.hpp"

namespace sqd {

namespace {

Vec cost_difference(const DetectionModel& m) {
    Vec dc(static_cast<std::size_t>(m.X));
    for (std::size_t i = 0; i < dc.size(); ++i) dc[i] = m.c(i, 0) - m.c(i, 1);
    return dc;
}

Vec normal_for(const DetectionModel& m, const Vec& dc, std::size_t y) {
    Vec w(dc.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = m.B(i, y) * dc[i];
    return mat_vec(m.P, w);
}

std::string direction_of(const std::vector<int>& v) {
    bool inc = true, dec = true;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] < v[i - 1]) inc = false;
        if (v[i] > v[i - 1]) dec = false;
    }
    if (inc && dec) return "constant";
    if (inc) return "increasing";
    if (dec) return "decreasing";
    return "non-monotone";
}

}  // namespace

bool halfspace_contained(const Vec& lo, const Vec& hi, double tol) {
    const std::size_t n = lo.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (lo[i] >= 0.0 && hi[i] < -tol) return false;
        for (std::size_t j = i + 1; j < n; ++j) {
            if ((lo[i] > 0.0 && lo[j] < 0.0) || (lo[i] < 0.0 && lo[j] > 0.0)) {
                double t = -lo[j] / (lo[i] - lo[j]);
                if (t * hi[i] + (1.0 - t) * hi[j] < -tol) return false;
            }
        }
    }
    return true;
}

PolytopePartition build_partition(const DetectionModel& m) {
    if (m.A != 2) throw Error(Errc::unsupported, "polytope partition requires A = 2");
    PolytopePartition part;
    part.X = m.X;
    part.Y = m.Y;
    const Vec dc = cost_difference(m);
    for (std::size_t y = 0; y < static_cast<std::size_t>(m.Y); ++y)
        part.normals.push_back(normal_for(m, dc, y));

    for (int l = 1; l <= m.Y + 1; ++l) {
        Region r;
        r.l = l;
        r.M = Matrix(static_cast<std::size_t>(m.Y), 2);
        for (int y = 0; y < m.Y; ++y) r.M(static_cast<std::size_t>(y), y < l - 1 ? 0 : 1) = 1.0;
        r.R = matmul(m.B, r.M);
        part.regions.push_back(std::move(r));
    }

    bool s_holds = m.X >= 2 && m.c(0, 1) > m.c(0, 0) && m.c(1, 1) < m.c(1, 0);
    part.assumptions_hold = is_tp2(m.B).ok && is_tp2(m.P).ok && s_holds;

    part.nesting_verified = true;
    std::ostringstream note;
    for (std::size_t y = 0; y + 1 < part.normals.size(); ++y) {
        if (!halfspace_contained(part.normals[y], part.normals[y + 1], 1e-12)) {
            part.nesting_verified = false;
            note << "{n_" << y + 1 << " >= 0} not contained in {n_" << y + 2 << " >= 0}; ";
        }
    }
    if (!part.assumptions_hold) note << "(A1)(A2)(S) do not all hold; nesting unverified by theory";
    part.nesting_note = note.str();

    for (const auto& n : part.normals) {
        int best = 0;
        for (std::size_t i = 0; i < n.size(); ++i)
            if (n[i] < 0.0) best = static_cast<int>(i) + 1;
        part.istar.push_back(best);
    }
    part.istar_direction = direction_of(part.istar);
    return part;
}

int classify(const Vec& pi, const PolytopePartition& part) {
    for (std::size_t y = 0; y < part.normals.size(); ++y)
        if (dot(part.normals[y], pi) >= 0.0) return static_cast<int>(y) + 1;
    return part.Y + 1;
}

unsigned long classify_general(const Vec& pi, const PolytopePartition& part) {
    unsigned long mask = 0;
    for (std::size_t y = 0; y < part.normals.size(); ++y)
        if (dot(part.normals[y], pi) < 0.0) mask |= 1UL << y;
    return mask;
}

Matrix general_selector(unsigned long mask, int Y) {
    Matrix M(static_cast<std::size_t>(Y), 2);
    for (int y = 0; y < Y; ++y) M(static_cast<std::size_t>(y), (mask >> y) & 1UL ? 0 : 1) = 1.0;
    return M;
}

const Region& region(const PolytopePartition& part, int l) {
    if (l < 1 || l > static_cast<int>(part.regions.size()))
        throw Error(Errc::invalid_argument, "region label out of range");
    return part.regions[static_cast<std::size_t>(l - 1)];
}

std::vector<Vec> hyperplane_vertices(const Vec& n, const std::string& name) {
    std::vector<Vec> out;
    for (std::size_t j = 1; j < n.size(); ++j) {
        if (!((n[0] > 0.0 && n[j] < 0.0) || (n[0] < 0.0 && n[j] > 0.0))) {
            std::ostringstream os;
            os.precision(12);
            os << name << "_1 = " << n[0] << " and " << name << "_" << j + 1 << " = " << n[j]
               << " must have strictly opposite signs";
            throw Error(Errc::invalid_argument, os.str());
        }
        Vec v(n.size(), 0.0);
        double den = n[j] - n[0];
        v[0] = n[j] / den;
        v[j] = -n[0] / den;
        out.push_back(std::move(v));
    }
    return out;
}

std::vector<Vec> stop_hyperplane_vertices(const DetectionModel& m) {
    Vec C = transformed_cost(m);
    if (!(C[0] > 0.0)) {
        std::ostringstream os;
        os << "C_1 = " << C[0] << " must be > 0";
        throw Error(Errc::invalid_argument, os.str());
    }
    for (std::size_t j = 1; j < C.size(); ++j)
        if (!(C[j] < 0.0)) {
            std::ostringstream os;
            os.precision(12);
            os << "C_" << j + 1 << " = " << C[j] << " must be < 0";
            throw Error(Errc::invalid_argument, os.str());
        }
    return hyperplane_vertices(C, "C");
}

std::vector<Vec> eta_vertices(const DetectionModel& m) {
    if (m.A != 2) throw Error(Errc::unsupported, "eta vertices require A = 2");
    Vec n = normal_for(m, cost_difference(m), static_cast<std::size_t>(m.Y) - 1);
    return hyperplane_vertices(n, "n_Y");
}

}  // namespace sqd
