#pragma once

#include <cmath>

#include "dp.hpp"
#include "linalg.hpp"
#include "model.hpp"
#include "random.hpp"

namespace testing {

inline sqd::DetectionModel two_state(double b, double p22, double rho, double d, double f2,
                                     sqd::Matrix c = {{1.0, 2.0}, {-1.0, -3.57}}) {
    sqd::DetectionModel m;
    m.X = 2;
    m.Y = 2;
    m.A = 2;
    m.P = sqd::Matrix{{1.0, 0.0}, {1.0 - p22, p22}};
    m.B = sqd::Matrix{{b, 1.0 - b}, {1.0 - b, b}};
    m.c = c;
    m.f = {0.0, f2};
    m.d = d;
    m.rho = rho;
    m.pi0 = {0.0, 1.0};
    return m;
}

inline sqd::DetectionModel example1() { return two_state(0.9, 0.95, 0.99, 1.25, 3.0); }

inline sqd::Vec random_belief(std::size_t X, sqd::Rng& rng) {
    sqd::Vec p(X);
    double tot = 0.0;
    for (double& v : p) {
        v = sqd::exponential1(rng);
        tot += v;
    }
    for (double& v : p) v /= tot;
    return p;
}

inline sqd::Matrix random_stochastic(std::size_t r, std::size_t c, sqd::Rng& rng) {
    sqd::Matrix M(r, c);
    for (std::size_t i = 0; i < r; ++i) {
        sqd::Vec p = random_belief(c, rng);
        for (std::size_t j = 0; j < c; ++j) M(i, j) = p[j];
    }
    return M;
}

// Random valid model with absorbing state 0.
inline sqd::DetectionModel random_model(std::size_t X, std::size_t Y, sqd::Rng& rng) {
    sqd::DetectionModel m;
    m.X = static_cast<int>(X);
    m.Y = static_cast<int>(Y);
    m.A = 2;
    m.P = random_stochastic(X, X, rng);
    for (std::size_t j = 0; j < X; ++j) m.P(0, j) = j == 0 ? 1.0 : 0.0;
    m.B = random_stochastic(X, Y, rng);
    m.c = sqd::Matrix(X, 2);
    for (std::size_t i = 0; i < X; ++i)
        for (std::size_t a = 0; a < 2; ++a) m.c(i, a) = 4.0 * sqd::uniform01(rng) - 2.0;
    m.f = sqd::Vec(X, 0.0);
    for (std::size_t i = 1; i < X; ++i) m.f[i] = 1.0 + 3.0 * sqd::uniform01(rng);
    m.d = 0.5 + sqd::uniform01(rng);
    m.rho = 0.5 + 0.4 * sqd::uniform01(rng);
    m.pi0 = random_belief(X, rng);
    m.pi0[0] = 0.0;
    double tot = sqd::sum(m.pi0);
    for (double& v : m.pi0) v /= tot;
    return m;
}

inline bool is_simplex_point(const sqd::Vec& p, double tol = 1e-12) {
    double s = 0.0;
    for (double v : p) {
        if (v < -tol) return false;
        s += v;
    }
    return std::abs(s - 1.0) < tol;
}

}  // namespace testing
