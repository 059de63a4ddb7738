#pragma once

#include <string>
#include <vector>

#include "linalg.hpp"
#include "model.hpp"

namespace sqd {

inline constexpr double kOrderSlack = 1e-12;

enum class MlrRelation { leq, geq_only, incomparable };

// p1 <=_r p2 iff p2(i) p1(j) <= p1(i) p2(j) for all i < j (cross-product form).
MlrRelation mlr_leq(const Vec& p1, const Vec& p2, double slack = kOrderSlack);
bool mlr_le(const Vec& p1, const Vec& p2, double slack = kOrderSlack);

// Tail sums of p1 never exceed those of p2.
bool fosd_leq(const Vec& p1, const Vec& p2, double slack = kOrderSlack);

struct Tp2Result {
    bool ok = true;
    int row1 = -1, row2 = -1, col1 = -1, col2 = -1;  // 1-based witness
    double minor = 0.0;
};
Tp2Result is_tp2(const Matrix& M, double slack = kOrderSlack);

// g is Y x A. g(y,a) - g(y,abar) >= 0 implies g(ybar,a) - g(ybar,abar) >= 0
// for abar > a, ybar > y.
bool single_crossing(const Matrix& g, double slack = kOrderSlack);

// Rows are points in increasing order, columns are decisions u. Differences
// f(pi,u) - f(pi,ubar), ubar < u, must not increase down the rows.
bool submodular(const Matrix& table, double slack = kOrderSlack);

enum class Status { pass, fail, not_applicable };
const char* status_name(Status s);

struct AssumptionEntry {
    std::string name;
    Status status = Status::not_applicable;
    std::string witness;
    double margin = 0.0;  // worst observed slack; negative means violated
};

struct AssumptionReport {
    std::vector<AssumptionEntry> entries;
    const AssumptionEntry* find(const std::string& name) const;
    bool passes(const std::vector<std::string>& names) const;
};

// Entries: A1, A2, A3, A3-sufficient, S, PH(i), PH(ii), C1, C2, C3 and,
// for X = Y = A = 2, multi-threshold.
AssumptionReport check_assumptions(const DetectionModel& m, double slack = kOrderSlack);

}  // namespace sqd
