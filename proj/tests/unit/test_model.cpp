#include <doctest.h>

#include <cmath>

#include "error.hpp"
#include "helpers.hpp"
#include "model.hpp"

using namespace sqd;

TEST_CASE("validation reports rows of a non-stochastic P") {
    DetectionModel m = testing::example1();
    m.P(1, 0) = 0.3;
    ValidationReport r = validate_model(m);  // rows are reported 1-based
    REQUIRE_FALSE(r.ok());
    bool found = false;
    for (const auto& v : r.violations) found = found || (v.field == "P" && v.row == 2);
    CHECK(found);
    CHECK_THROWS_AS(require_valid(m), Error);
}

TEST_CASE("validation catches bad shapes, discount and pi0") {
    DetectionModel m = testing::example1();
    m.rho = 1.5;
    CHECK_FALSE(validate_model(m).ok());
    m = testing::example1();
    m.pi0 = {0.5, 0.6};
    CHECK_FALSE(validate_model(m).ok());
    m = testing::example1();
    m.f[0] = 1.0;
    CHECK_FALSE(validate_model(m).ok());
    m = testing::example1();
    m.B = Matrix{{0.5, 0.5}};
    CHECK_FALSE(validate_model(m).ok());
    CHECK(validate_model(testing::example1()).ok());
}

TEST_CASE("tiny negative entries are clamped") {
    DetectionModel m = testing::example1();
    m.P(0, 1) = -1e-15;
    clamp_tiny_negatives(m);
    CHECK(m.P(0, 1) == 0.0);
}

TEST_CASE("transformed cost matches a hand computation") {
    DetectionModel m = testing::example1();
    Vec C = transformed_cost(m);
    // C(2) = -(f2 - rho (P21 f1 + P22 f2))
    CHECK(C[0] == doctest::Approx(1.25));
    CHECK(C[1] == doctest::Approx(-(3.0 - 0.99 * 0.95 * 3.0)));
}

TEST_CASE("transformed cost property on random models") {
    Rng rng = stream_rng(7, 0);
    for (int t = 0; t < 50; ++t) {
        DetectionModel m = testing::random_model(4, 3, rng);
        Vec C = transformed_cost(m);
        Vec Pf = mat_vec(m.P, m.f);
        for (std::size_t i = 0; i < 4; ++i) {
            double expect = (i == 0 ? m.d : 0.0) - m.f[i] + m.rho * Pf[i];
            CHECK(C[i] == doctest::Approx(expect).epsilon(1e-12));
        }
    }
}

// Oracle: propagate the full chain and difference P(x_k = 1).
static Vec pmf_by_propagation(const DetectionModel& m, int K) {
    Vec out;
    Vec p = m.pi0;
    double prev = 0.0;
    for (int k = 0; k <= K; ++k) {
        out.push_back(p[0] - prev);
        prev = p[0];
        p = vec_mat(p, m.P);
    }
    return out;
}

TEST_CASE("phase-type pmf agrees with chain propagation") {
    Rng rng = stream_rng(11, 0);
    for (int t = 0; t < 20; ++t) {
        DetectionModel m = testing::random_model(3 + t % 3, 2, rng);
        Vec oracle = pmf_by_propagation(m, 40);
        Vec table = ph_pmf_table(m, 40);
        for (int k = 0; k <= 40; ++k) {
            CHECK(ph_pmf(m, k) == doctest::Approx(oracle[k]).epsilon(1e-10));
            CHECK(table[k] == doctest::Approx(oracle[k]).epsilon(1e-10));
        }
    }
}

TEST_CASE("geometric change time has the geometric pmf") {
    DetectionModel m = testing::example1();
    CHECK(ph_pmf(m, 0) == 0.0);
    for (int k = 1; k < 10; ++k) CHECK(ph_pmf(m, k) == doctest::Approx(std::pow(0.95, k - 1) * 0.05));
}

TEST_CASE("finite change time detection") {
    CHECK(change_time_finite(testing::example1()));
    DetectionModel m = testing::example1();
    m.P = Matrix{{1.0, 0.0}, {0.0, 1.0}};
    CHECK_FALSE(change_time_finite(m));
}

TEST_CASE("sampled change time has the right mean") {
    DetectionModel m = testing::example1();
    double tot = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        Rng rng = stream_rng(3, static_cast<std::uint64_t>(i));
        tot += static_cast<double>(sample_change_time(m, rng));
    }
    // Mean 1 / 0.05; standard deviation sqrt(0.95) / 0.05.
    CHECK(std::abs(tot / n - 20.0) < 4.0 * std::sqrt(0.95) / 0.05 / std::sqrt(n));
}
