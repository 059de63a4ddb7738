#pragma once

#include <string>
#include <vector>

#include "linalg.hpp"
#include "model.hpp"

namespace sqd {

struct Region {
    int l = 0;  // 1..Y+1
    Matrix M;   // Y x 2 selector
    Matrix R;   // X x 2 decision likelihood B M
};

// Decision-likelihood partition for A = 2. Normals n_y = P B_y (c1 - c2), so
// n_y' pi = (c1 - c2)' B_y P' pi. Region l selects a=1 for y < l and a=2 for
// y >= l: P_1 = {n_1 >= 0}, P_l = {n_{l-1} < 0, n_l >= 0}, P_{Y+1} = {n_Y < 0}.
struct PolytopePartition {
    int X = 0;
    int Y = 0;
    std::vector<Vec> normals;
    std::vector<Region> regions;
    bool assumptions_hold = false;  // (A1), (A2) and (S)
    bool nesting_verified = false;  // {n_y >= 0} within {n_{y+1} >= 0} on the simplex, every y
    std::string nesting_note;
    std::vector<int> istar;         // per y: largest i with n_y' e_i < 0 (1-based, 0 if none)
    std::string istar_direction;    // "constant", "increasing", "decreasing" or "non-monotone"
};

PolytopePartition build_partition(const DetectionModel& m);

// Unique region label 1..Y+1: the first y with n_y' pi >= 0, or Y+1.
int classify(const Vec& pi, const PolytopePartition& part);

// Diagnostic: bit y set iff n_y' pi < 0 (decision a=1 for that y).
unsigned long classify_general(const Vec& pi, const PolytopePartition& part);
Matrix general_selector(unsigned long mask, int Y);

const Region& region(const PolytopePartition& part, int l);

// Vertices of {n' pi = 0} on the edges [e1, e_{j+1}]:
// (n_{j+1} e1 - n_1 e_{j+1}) / (n_{j+1} - n_1). Requires n_1 and every n_{j+1}
// of strictly opposite sign.
std::vector<Vec> hyperplane_vertices(const Vec& n, const std::string& name);

// Vertices of {C' pi = 0}; requires C_1 > 0 and C_j < 0, j >= 2.
std::vector<Vec> stop_hyperplane_vertices(const DetectionModel& m);

// Vertices of eta_Y with normal P B_Y (c1 - c2).
std::vector<Vec> eta_vertices(const DetectionModel& m);

// Exact test of {pi in simplex: lo' pi >= 0} within {pi in simplex: hi' pi >= -tol}
// by enumerating the vertices of the left-hand polytope.
bool halfspace_contained(const Vec& lo, const Vec& hi, double tol);

}  // namespace sqd
