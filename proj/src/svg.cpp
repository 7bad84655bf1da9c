#include "emp/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>

#include "emp/errors.hpp"

namespace emp::svg {
namespace {

constexpr std::array<const char*, 6> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string line_plot(const PlotSpec& spec) {
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const Series& s : spec.series) {
        if (s.x.size() != s.y.size()) throw DomainError("series '" + s.label + "' has mismatched x and y");
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, s.y[i]);
            y1 = std::max(y1, s.y[i]);
        }
    }
    if (!(x0 <= x1)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x1 - x0 < 1e-300) x0 -= 0.5, x1 += 0.5;
    if (y1 - y0 < 1e-300) y0 -= 0.5, y1 += 0.5;

    const double left = 70, right = 20, top = 40, bottom = 55;
    const double pw = spec.width - left - right;
    const double ph = spec.height - top - bottom;
    auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return top + (1.0 - (y - y0) / (y1 - y0)) * ph; };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(spec.width) + "\" height=\"" +
           std::to_string(spec.height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + fmt(spec.width / 2.0) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" +
           escape(spec.title) + "</text>\n";
    out += "<rect x=\"" + fmt(left) + "\" y=\"" + fmt(top) + "\" width=\"" + fmt(pw) + "\" height=\"" + fmt(ph) +
           "\" fill=\"none\" stroke=\"#444\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        const double fx = x0 + (x1 - x0) * t / 4.0;
        const double fy = y0 + (y1 - y0) * t / 4.0;
        out += "<text x=\"" + fmt(px(fx)) + "\" y=\"" + fmt(top + ph + 16) + "\" text-anchor=\"middle\">" +
               tick_label(fx) + "</text>\n";
        out += "<text x=\"" + fmt(left - 6) + "\" y=\"" + fmt(py(fy) + 4) + "\" text-anchor=\"end\">" +
               tick_label(fy) + "</text>\n";
    }
    out += "<text x=\"" + fmt(left + pw / 2) + "\" y=\"" + fmt(spec.height - 12.0) + "\" text-anchor=\"middle\">" +
           escape(spec.x_label) + "</text>\n";
    out += "<text transform=\"translate(16," + fmt(top + ph / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
           escape(spec.y_label) + "</text>\n";

    for (std::size_t k = 0; k < spec.series.size(); ++k) {
        const Series& s = spec.series[k];
        const char* color = kPalette[k % kPalette.size()];
        std::string points;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            points += fmt(px(s.x[i])) + "," + fmt(py(s.y[i])) + " ";
        }
        out += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\" points=\"" + points +
               "\"/>\n";
        if (s.markers) {
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
                out += "<circle cx=\"" + fmt(px(s.x[i])) + "\" cy=\"" + fmt(py(s.y[i])) + "\" r=\"2.5\" fill=\"" +
                       color + "\"/>\n";
            }
        }
        const double ly = top + 16 + 16.0 * static_cast<double>(k);
        out += "<line x1=\"" + fmt(left + pw - 130) + "\" y1=\"" + fmt(ly - 4) + "\" x2=\"" + fmt(left + pw - 110) +
               "\" y2=\"" + fmt(ly - 4) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
        out += "<text x=\"" + fmt(left + pw - 104) + "\" y=\"" + fmt(ly) + "\">" + escape(s.label) + "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

}  // namespace emp::svg
