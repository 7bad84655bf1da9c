#pragma once

// Bare-bones SVG line plots for the CLI's optional --svg outputs.

#include <string>
#include <vector>

namespace emp::svg {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool markers = false;  // scatter points on top of the line
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
    int width = 640;
    int height = 420;
};

/// Non-finite points are skipped. Throws DomainError if a series has mismatched x/y.
std::string line_plot(const PlotSpec& spec);

}  // namespace emp::svg
