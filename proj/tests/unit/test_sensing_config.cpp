#include <doctest.h>

#include <cmath>
#include <string>

#include "config.hpp"
#include "error.hpp"
#include "filters.hpp"
#include "helpers.hpp"
#include "presets.hpp"
#include "sensing.hpp"

using namespace sqd;

namespace {

SensingModel sensing_x2() {
    SensingModel sm;
    sm.base = testing::two_state(0.9, 0.9, 0.9, 0.8, 2.0, Matrix{{2.0, 0.5}, {0.5, 0.2}});
    sm.B1 = sm.base.B;
    sm.B2 = Matrix{{0.7, 0.3}, {0.3, 0.7}};
    sm.has_factor = true;
    sm.Q1 = Matrix::identity(2);
    sm.Q2 = Matrix{{0.75, 0.25}, {0.25, 0.75}};
    return sm;
}

}  // namespace

TEST_CASE("sensing validation checks the factorisation") {
    SensingModel sm = sensing_x2();
    CHECK(validate_sensing(sm).ok());
    sm.Q2 = Matrix{{0.5, 0.5}, {0.5, 0.5}};
    CHECK_FALSE(validate_sensing(sm).ok());
    CHECK_THROWS_AS(require_valid_sensing(sm), Error);
}

TEST_CASE("mode filter is the HMM filter of the chosen channel") {
    SensingModel sm = sensing_x2();
    Rng rng = stream_rng(61, 0);
    for (int t = 0; t < 100; ++t) {
        Vec pi = testing::random_belief(2, rng);
        for (int a = 0; a < 2; ++a) {
            DetectionModel alt = sm.base;
            alt.B = a == 0 ? sm.B1 : sm.B2;
            for (int y = 0; y < 2; ++y)
                CHECK(max_abs_diff(mode_filter(pi, y, a, sm).posterior, hmm_filter(pi, y, alt).posterior) < 1e-14);
        }
    }
}

TEST_CASE("mode selection minimises the predicted cost") {
    SensingModel sm = sensing_x2();
    Rng rng = stream_rng(62, 0);
    for (int t = 0; t < 200; ++t) {
        Vec pi = testing::random_belief(2, rng);
        Vec pred = predict(pi, sm.base);
        double c0 = sm.base.c(0, 0) * pred[0] + sm.base.c(1, 0) * pred[1];
        double c1 = sm.base.c(0, 1) * pred[0] + sm.base.c(1, 1) * pred[1];
        CHECK(mode_select(pi, sm) == (c1 < c0 ? 1 : 0));
    }
}

TEST_CASE("y_max ignores trailing zero columns") {
    CHECK(y_max(Matrix{{0.5, 0.5, 0.0}, {0.2, 0.8, 0.0}}) == 1);
    CHECK(y_max(Matrix{{0.5, 0.0, 0.5}}) == 2);
}

TEST_CASE("sensing value iteration with identical channels equals the classical solve") {
    SensingModel sm = sensing_x2();
    sm.B2 = sm.B1;
    sm.Q2 = Matrix::identity(2);
    SimplexGrid g = SimplexGrid::make(2, 101);
    SolveOptions opt;
    opt.horizon = 100;
    PolicySolution s = value_iterate_sensing(sm, g, opt);
    PolicySolution c = value_iterate_classical(sm.base, g, opt);
    CHECK(max_abs_diff(s.V, c.V) < 1e-12);
    CHECK(s.kind == "sensing");
}

TEST_CASE("sensing assumption report lists all entries") {
    AssumptionReport r = check_sensing_assumptions(sensing_x2());
    for (const char* n : {"A1(B1)", "A1(B2)", "A2", "A3", "C1", "C1@ymax", "C2", "C2@ymax", "ymax-consistency"})
        CHECK_MESSAGE(r.find(n) != nullptr, n);
}

TEST_CASE("model JSON round trip") {
    DetectionModel m = example2_model(4);
    DetectionModel back = model_from_json(model_to_json(m));
    CHECK(back.P == m.P);
    CHECK(back.B == m.B);
    CHECK(back.c == m.c);
    CHECK(back.f == m.f);
    CHECK(back.pi0 == m.pi0);
    CHECK(back.rho == m.rho);
    CHECK(back.d == m.d);

    SensingModel sm = sensing_x2();
    nlohmann::json j = sensing_to_json(sm);
    CHECK(is_sensing_config(j));
    SensingModel sb = sensing_from_json(j);
    CHECK(sb.B2 == sm.B2);
    CHECK(sb.has_factor);
}

TEST_CASE("config errors name the key") {
    nlohmann::json j = model_to_json(testing::example1());
    j.erase("rho");
    try {
        model_from_json(j);
        FAIL("expected an exception");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::validation);
        CHECK(std::string(e.what()).find("'rho'") != std::string::npos);
    }
    j = model_to_json(testing::example1());
    j["P"] = {{1.0, 0.0}, {0.5}};
    CHECK_THROWS_AS(model_from_json(j), Error);
    // A well-formed but mis-sized matrix parses and is rejected by validation.
    j["P"] = {{1.0, 0.0}};
    CHECK_FALSE(validate_model(model_from_json(j)).ok());
    CHECK_THROWS_AS(parse_json_text("{ not json"), Error);
}

TEST_CASE("Example 2 observation matrix") {
    Matrix B = example2_observations();
    for (std::size_t i = 0; i < 3; ++i) {
        double tot = 0.0;
        for (std::size_t y = 0; y < 5; ++y) tot += B(i, y);
        CHECK(tot == doctest::Approx(1.0));
    }
    // Ratios follow the Gaussian kernel exp(-(y - centre)^2 / 6).
    CHECK(B(0, 1) / B(0, 0) == doctest::Approx(std::exp(-1.0 / 6.0)));
    CHECK(B(1, 3) / B(1, 4) == doctest::Approx(std::exp(-1.0 / 6.0)));
    CHECK(B(1, 0) == B(2, 0));
}

TEST_CASE("presets are valid and unique") {
    for (const auto& p : presets()) {
        CHECK_MESSAGE(validate_model(p.model).ok(), p.name);
        CHECK(&find_preset(p.name) == &p);
    }
    CHECK_THROWS_AS(find_preset("nope"), Error);
    CHECK(presets().size() == 8);
}
