#include "filters.hpp"

#include <cmath>

#include "error.hpp"

namespace sqd {

namespace {

FilterOutput normalize(Vec u) {
    double s = sum(u);
    for (double& x : u) x /= s;
    return {std::move(u), s};
}

bool is_identity(const Matrix& P) {
    return max_abs_diff(P, Matrix::identity(P.rows())) == 0.0;
}

// Root in pi(2) of n' pi = 0 on the segment [e1, e2].
Vec root_on_edge(const Vec& n) {
    double den = n[0] - n[1];
    if (den == 0.0) throw Error(Errc::numeric, "hyperplane does not cross the simplex");
    double p = n[0] / den;
    if (!(p >= 0.0 && p <= 1.0)) throw Error(Errc::numeric, "hyperplane root outside [0,1]");
    return {1.0 - p, p};
}

}  // namespace

Vec predict(const Vec& pi, const DetectionModel& m) {
    return vec_mat(pi, m.P);
}

Vec observation_probs(const Vec& pi, const DetectionModel& m) {
    return vec_mat(predict(pi, m), m.B);
}

FilterOutput hmm_filter(const Vec& pi, int y, const DetectionModel& m) {
    if (y < 0 || y >= m.Y) throw Error(Errc::invalid_argument, "observation index out of range");
    Vec u = predict(pi, m);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] *= m.B(i, static_cast<std::size_t>(y));
    if (!(sum(u) > 0.0))
        throw Error(Errc::numeric, "impossible observation under current belief");
    return normalize(std::move(u));
}

int local_decision(const Vec& pi, int y, const DetectionModel& m) {
    Vec u = predict(pi, m);
    const auto yy = static_cast<std::size_t>(y);
    int best = 0;
    double best_cost = 0.0;
    for (int a = 0; a < m.A; ++a) {
        double cost = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i)
            cost += m.c(i, static_cast<std::size_t>(a)) * m.B(i, yy) * u[i];
        if (a == 0 || cost < best_cost) {
            best = a;
            best_cost = cost;
        }
    }
    return best;
}

DecisionSelector selector_from_actions(const std::vector<int>& action, const DetectionModel& m) {
    DecisionSelector s;
    s.action = action;
    s.M = Matrix(static_cast<std::size_t>(m.Y), static_cast<std::size_t>(m.A));
    for (std::size_t y = 0; y < action.size(); ++y) s.M(y, static_cast<std::size_t>(action[y])) = 1.0;
    s.Bs = matmul(m.B, s.M);
    return s;
}

DecisionSelector decision_selector(const Vec& pi, const DetectionModel& m) {
    Vec u = predict(pi, m);
    std::vector<int> action(static_cast<std::size_t>(m.Y));
    for (std::size_t y = 0; y < action.size(); ++y) {
        int best = 0;
        double best_cost = 0.0;
        for (int a = 0; a < m.A; ++a) {
            double cost = 0.0;
            for (std::size_t i = 0; i < u.size(); ++i)
                cost += m.c(i, static_cast<std::size_t>(a)) * m.B(i, y) * u[i];
            if (a == 0 || cost < best_cost) {
                best = a;
                best_cost = cost;
            }
        }
        action[y] = best;
    }
    return selector_from_actions(action, m);
}

FilterOutput likelihood_filter(const Vec& pi, int col, const Matrix& L, const DetectionModel& m) {
    if (col < 0 || static_cast<std::size_t>(col) >= L.cols())
        throw Error(Errc::invalid_argument, "decision index out of range");
    Vec u = predict(pi, m);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] *= L(i, static_cast<std::size_t>(col));
    if (!(sum(u) > 0.0))
        throw Error(Errc::numeric, "decision has zero probability at this belief");
    return normalize(std::move(u));
}

FilterOutput social_filter(const Vec& pi, int a, const DetectionModel& m) {
    if (a < 0 || a >= m.A) throw Error(Errc::invalid_argument, "decision index out of range");
    return likelihood_filter(pi, a, decision_selector(pi, m).Bs, m);
}

Vec decision_probs(const Vec& pi, const DetectionModel& m) {
    return vec_mat(predict(pi, m), decision_selector(pi, m).Bs);
}

FixedPoints fixed_points(const DetectionModel& m) {
    if (m.X != 2 || m.Y != 2 || m.A != 2)
        throw Error(Errc::unsupported, "fixed points are defined for X = Y = A = 2");
    Vec dc = {m.c(0, 0) - m.c(0, 1), m.c(1, 0) - m.c(1, 1)};
    auto normal = [&](std::size_t y) {
        Vec w = {m.B(0, y) * dc[0], m.B(1, y) * dc[1]};
        return mat_vec(m.P, w);
    };
    FixedPoints fp;
    fp.eta1 = root_on_edge(normal(0));
    fp.eta2 = root_on_edge(normal(1));
    fp.q = likelihood_filter(fp.eta1, 0, m.B, m).posterior;
    Vec q2 = likelihood_filter(fp.eta2, 1, m.B, m).posterior;
    fp.q_mismatch = max_abs_diff(fp.q, q2);
    fp.symmetric_b = m.B(0, 0) == m.B(1, 1) && m.B(0, 1) == m.B(1, 0);
    if (fp.symmetric_b && is_identity(m.P)) {
        fp.composite_eta1 = max_abs_diff(likelihood_filter(fp.q, 1, m.B, m).posterior, fp.eta1);
        fp.composite_eta2 = max_abs_diff(likelihood_filter(fp.q, 0, m.B, m).posterior, fp.eta2);
    }
    return fp;
}

}  // namespace sqd
