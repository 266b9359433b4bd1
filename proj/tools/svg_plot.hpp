#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace dwid::cli {

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
    /// Optional analytic overlay drawn as a dashed curve over the x range.
    std::optional<std::pair<std::string, std::function<double(double)>>> overlay;
};

/// Minimal static line chart.
std::string render_svg(const PlotSpec& plot);

} // namespace dwid::cli
