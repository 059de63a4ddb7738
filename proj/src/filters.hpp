#pragma once

#include <vector>

#include "linalg.hpp"
#include "model.hpp"

namespace sqd {

inline constexpr double kSigmaFloor = 1e-14;

struct FilterOutput {
    Vec posterior;
    double normalizer = 0.0;
};

// M is Y x A with one 1 per row; Bs = B M is the decision likelihood.
struct DecisionSelector {
    std::vector<int> action;  // action[y]
    Matrix M;
    Matrix Bs;
};

// P' pi
Vec predict(const Vec& pi, const DetectionModel& m);

// B_y P' pi / sigma. Throws on sigma == 0.
FilterOutput hmm_filter(const Vec& pi, int y, const DetectionModel& m);
// sigma(pi, y) for every y.
Vec observation_probs(const Vec& pi, const DetectionModel& m);

// argmin_a c_a' B_y P' pi, ties to the smallest a.
int local_decision(const Vec& pi, int y, const DetectionModel& m);

DecisionSelector decision_selector(const Vec& pi, const DetectionModel& m);
DecisionSelector selector_from_actions(const std::vector<int>& action, const DetectionModel& m);

// Bs_a P' pi / sigma(pi, a), Bs from decision_selector(pi). Throws on sigma == 0.
FilterOutput social_filter(const Vec& pi, int a, const DetectionModel& m);
// Same update with an explicit decision likelihood (e.g. a region's R^l).
FilterOutput likelihood_filter(const Vec& pi, int col, const Matrix& L, const DetectionModel& m);
// sigma(pi, a) for every a.
Vec decision_probs(const Vec& pi, const DetectionModel& m);

struct FixedPoints {
    Vec eta1;
    Vec eta2;
    Vec q;
    double q_mismatch = 0.0;      // || T(eta1,1) - T(eta2,2) ||_inf
    bool symmetric_b = false;
    double composite_eta1 = 0.0;  // || T(q,2) - eta1 ||_inf, symmetric B only
    double composite_eta2 = 0.0;  // || T(q,1) - eta2 ||_inf, symmetric B only
};

// X = Y = A = 2 only. Updates at eta1, eta2 and q use the likelihood R^2 = B
// of the middle interval, where both decisions carry information.
FixedPoints fixed_points(const DetectionModel& m);

}  // namespace sqd
