#pragma once

#include <string>
#include <vector>

#include "dp.hpp"
#include "model.hpp"

namespace sqd {

struct ExperimentPreset {
    std::string name;
    std::string description;
    DetectionModel model;
    int grid = 0;     // X = 2: points, X = 3: lattice density
    int horizon = 200;
    std::string expected;
};

const std::vector<ExperimentPreset>& presets();
// Throws Error(Errc::invalid_argument) for unknown names.
const ExperimentPreset& find_preset(const std::string& name);

// Example 2 observation matrix: row 1 proportional to exp(-(y-1)^2/6),
// rows 2..3 proportional to exp(-(y-5)^2/6), y = 1..5.
Matrix example2_observations();
DetectionModel example2_model(int which);  // which = 1..4

struct ReproCheck {
    std::string name;
    bool ok = false;
    std::string detail;
};

struct ReproResult {
    std::string preset;
    PolicySolution solution;
    std::vector<ReproCheck> checks;
    bool ok() const;
};

// Solves the preset and evaluates its expected structural outcome.
// grid / horizon <= 0 select the preset values.
ReproResult reproduce(const std::string& name, int grid = 0, int horizon = 0);

// Grid points with C' pi >= 0 stop and those with C' pi < -delta continue,
// delta = step * (max C - min C). Returns the number of mismatches.
struct HyperplaneCheck {
    std::size_t stop_mismatch = 0;
    std::size_t continue_mismatch = 0;
    double delta = 0.0;
    std::size_t first_bad = 0;
    bool ok() const { return stop_mismatch == 0 && continue_mismatch == 0; }
};
HyperplaneCheck hyperplane_boundary_check(const DetectionModel& m, const PolicySolution& sol);

// Line switches inside P_{Y+1} through e1 and through e_X.
struct LineCheck {
    LineScan e1;
    LineScan eX;
    bool ok() const { return e1.max_switches <= 1 && eX.max_switches <= 1; }
};
LineCheck line_monotonicity_check(const DetectionModel& m, const PolicySolution& sol);

}  // namespace sqd
