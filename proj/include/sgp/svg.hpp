#pragma once

#include <string>
#include <vector>

#include "sgp/errors.hpp"

namespace sgp::svg {

struct Series {
    std::string label;
    std::string color;  // SVG color
    std::vector<double> x;
    std::vector<double> y;
};

// Minimal SVG 1.1 polyline chart with axes, tick labels, and a legend.
void write_line_chart(const std::string& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<Series>& series);

}  // namespace sgp::svg
