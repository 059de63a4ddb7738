#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sqdctl {

namespace {

constexpr double kW = 640, kH = 420, kPad = 50;
const char* kStop = "#c0392b";
const char* kCont = "#d5dbe3";

std::string esc(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += c;
        }
    }
    return out;
}

void header(std::ostringstream& os, const std::string& title) {
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << "<text x=\"" << kW / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << esc(title)
       << "</text>\n";
}

void curve(std::ostringstream& os, const PlotData& d) {
    const double x0 = kPad, x1 = kW - kPad, y0 = kH - kPad - 30, y1 = kPad;
    auto [lo, hi] = std::minmax_element(d.V.begin(), d.V.end());
    double vmin = *lo, vmax = *hi;
    if (vmax - vmin < 1e-12) {
        vmin -= 0.5;
        vmax += 0.5;
    }
    auto sx = [&](double p) { return x0 + p * (x1 - x0); };
    auto sy = [&](double v) { return y0 - (v - vmin) / (vmax - vmin) * (y0 - y1); };

    // Stop band below the axis.
    const double band = kH - kPad - 20;
    const std::size_t n = d.points.size();
    for (std::size_t i = 0; i < n; ++i) {
        double p = d.points[i][1];
        double left = i == 0 ? p : 0.5 * (p + d.points[i - 1][1]);
        double right = i + 1 == n ? p : 0.5 * (p + d.points[i + 1][1]);
        os << "<rect x=\"" << sx(left) << "\" y=\"" << band << "\" width=\"" << std::max(0.5, sx(right) - sx(left))
           << "\" height=\"12\" fill=\"" << (d.mu[i] == 1 ? kStop : kCont) << "\"/>\n";
    }
    os << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1 << "\" y2=\"" << y0
       << "\" stroke=\"black\"/>\n<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 << "\" y2=\"" << y1
       << "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        double p = t / 4.0;
        double v = vmin + p * (vmax - vmin);
        os << "<text x=\"" << sx(p) << "\" y=\"" << y0 + 15 << "\" text-anchor=\"middle\">" << p << "</text>\n";
        os << "<text x=\"" << x0 - 5 << "\" y=\"" << sy(v) + 4 << "\" text-anchor=\"end\">" << std::round(v * 1000) / 1000
           << "</text>\n";
    }
    os << "<polyline fill=\"none\" stroke=\"#1f4e79\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < n; ++i) os << sx(d.points[i][1]) << "," << sy(d.V[i]) << " ";
    os << "\"/>\n";
    os << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << kH - 8 << "\" text-anchor=\"middle\">pi(2)  (band: red = stop)</text>\n";
    os << "<text x=\"15\" y=\"" << (y0 + y1) / 2 << "\" transform=\"rotate(-90 15 " << (y0 + y1) / 2 << ")\">V</text>\n";
}

void triangle(std::ostringstream& os, const PlotData& d) {
    // e1 bottom left, e2 bottom right, e3 top.
    const double ax = kPad + 60, ay = kH - kPad, bx = kW - kPad - 60, by = kH - kPad;
    const double cx = (ax + bx) / 2, cy = kPad + 10;
    auto px = [&](const std::vector<double>& p) { return p[0] * ax + p[1] * bx + p[2] * cx; };
    auto py = [&](const std::vector<double>& p) { return p[0] * ay + p[1] * by + p[2] * cy; };
    os << "<polygon points=\"" << ax << "," << ay << " " << bx << "," << by << " " << cx << "," << cy
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    const double r = std::clamp(150.0 / std::sqrt(static_cast<double>(d.points.size())), 0.8, 4.0);
    for (std::size_t i = 0; i < d.points.size(); ++i)
        os << "<circle cx=\"" << px(d.points[i]) << "\" cy=\"" << py(d.points[i]) << "\" r=\"" << r << "\" fill=\""
           << (d.mu[i] == 1 ? kStop : kCont) << "\"/>\n";
    os << "<text x=\"" << ax - 8 << "\" y=\"" << ay + 15 << "\" text-anchor=\"end\">e1</text>\n"
       << "<text x=\"" << bx + 8 << "\" y=\"" << by + 15 << "\">e2</text>\n"
       << "<text x=\"" << cx << "\" y=\"" << cy - 6 << "\" text-anchor=\"middle\">e3</text>\n"
       << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 8 << "\" text-anchor=\"middle\">red = stop, grey = continue</text>\n";
}

}  // namespace

std::string render_svg(const PlotData& d) {
    std::ostringstream os;
    header(os, d.title);
    if (d.X == 2) curve(os, d);
    else if (d.X == 3) triangle(os, d);
    else os << "<text x=\"20\" y=\"60\">no plot for X = " << d.X << "</text>\n";
    os << "</svg>\n";
    return os.str();
}

}  // namespace sqdctl
