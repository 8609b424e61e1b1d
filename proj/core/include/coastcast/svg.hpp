#pragma once

#include <string>
#include <vector>

#include "coastcast/features.hpp"
#include "coastcast/linalg.hpp"

namespace coastcast {

// Minimal static SVG renderings: axes and marks only, no styling
// dependencies. Good enough to eyeball the pipeline's figure artifacts.

std::string svg_heatmap(const std::vector<std::string>& labels, const Matrix& m,
                        const std::string& title);

std::string svg_histogram(const Histogram& h, const std::string& title);

struct SvgSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

std::string svg_line_chart(const std::vector<SvgSeries>& series,
                           const std::string& title, const std::string& x_label,
                           const std::string& y_label);

std::string svg_bar_chart(const std::vector<std::string>& labels,
                          const std::vector<double>& values,
                          const std::string& title);

std::string svg_scatter(const std::vector<double>& x, const std::vector<double>& y,
                        const std::string& title, const std::string& x_label,
                        const std::string& y_label);

} // namespace coastcast
