#pragma once

#include <string>
#include <vector>

namespace sqdctl {

// One solved policy, copied out of the C API.
struct PlotData {
    int X = 0;
    std::vector<std::vector<double>> points;
    std::vector<double> V;
    std::vector<int> mu;
    std::string title;
};

// X = 2: value curve over pi(2) with the stopping set shaded underneath.
// X = 3: lattice points on the simplex triangle, stop points filled.
std::string render_svg(const PlotData& d);

}  // namespace sqdctl
