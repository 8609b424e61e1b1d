#include "coastcast/svg.hpp"

#include <algorithm>
#include <cmath>

#include "coastcast/csv.hpp"

namespace coastcast {

namespace {

constexpr double kW = 640.0;
constexpr double kH = 480.0;
constexpr double kMargin = 56.0;

std::string num(double v) { return format_double(v); }

std::string svg_open() {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kW) +
           "\" height=\"" + num(kH) + "\" viewBox=\"0 0 " + num(kW) + " " +
           num(kH) + "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

std::string text_at(double x, double y, const std::string& s, int size = 12,
                    const std::string& anchor = "start") {
    return "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"" +
           std::to_string(size) + "\" font-family=\"monospace\" text-anchor=\"" +
           anchor + "\">" + s + "</text>\n";
}

std::string line_at(double x1, double y1, double x2, double y2,
                    const std::string& stroke = "black", double width = 1.0) {
    return "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) +
           "\" y2=\"" + num(y2) + "\" stroke=\"" + stroke + "\" stroke-width=\"" +
           num(width) + "\"/>\n";
}

std::string rect_at(double x, double y, double w, double h,
                    const std::string& fill) {
    return "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) +
           "\" height=\"" + num(h) + "\" fill=\"" + fill + "\"/>\n";
}

std::string circle_at(double cx, double cy, double r, const std::string& fill) {
    return "<circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" + num(r) +
           "\" fill=\"" + fill + "\"/>\n";
}

// blue (-1) .. white (0) .. red (+1)
std::string diverging_color(double v) {
    v = std::clamp(v, -1.0, 1.0);
    const int r = static_cast<int>(std::lround(v >= 0 ? 255 : 255 * (1 + v)));
    const int g = static_cast<int>(std::lround(255 * (1 - std::fabs(v))));
    const int b = static_cast<int>(std::lround(v <= 0 ? 255 : 255 * (1 - v)));
    return "rgb(" + std::to_string(r) + "," + std::to_string(g) + "," +
           std::to_string(b) + ")";
}

struct Range {
    double lo = 0.0, hi = 1.0;
    void include(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    static Range of(const std::vector<double>& vs) {
        Range r{vs.empty() ? 0.0 : vs[0], vs.empty() ? 1.0 : vs[0]};
        for (double v : vs) r.include(v);
        if (r.lo == r.hi) {
            r.lo -= 0.5;
            r.hi += 0.5;
        }
        return r;
    }
    double map(double v, double out_lo, double out_hi) const {
        return out_lo + (v - lo) / (hi - lo) * (out_hi - out_lo);
    }
};

std::string axes(const Range& xr, const Range& yr, const std::string& x_label,
                 const std::string& y_label) {
    std::string out;
    out += line_at(kMargin, kH - kMargin, kW - kMargin, kH - kMargin);
    out += line_at(kMargin, kMargin, kMargin, kH - kMargin);
    for (int i = 0; i <= 4; ++i) {
        const double f = i / 4.0;
        const double x = kMargin + f * (kW - 2 * kMargin);
        const double y = kH - kMargin - f * (kH - 2 * kMargin);
        out += line_at(x, kH - kMargin, x, kH - kMargin + 4);
        out += text_at(x, kH - kMargin + 18, num(xr.lo + f * (xr.hi - xr.lo)), 10,
                       "middle");
        out += line_at(kMargin - 4, y, kMargin, y);
        out += text_at(kMargin - 6, y + 3, num(yr.lo + f * (yr.hi - yr.lo)), 10,
                       "end");
    }
    out += text_at(kW / 2, kH - 12, x_label, 12, "middle");
    out += text_at(14, kH / 2, y_label, 12, "middle");
    return out;
}

} // namespace

std::string svg_heatmap(const std::vector<std::string>& labels, const Matrix& m,
                        const std::string& title) {
    std::string out = svg_open();
    out += text_at(kW / 2, 24, title, 14, "middle");
    const std::size_t d = m.rows();
    if (d == 0) return out + "</svg>\n";
    const double cell = std::min((kW - 2 * kMargin) / static_cast<double>(d),
                                 (kH - 2 * kMargin) / static_cast<double>(d));
    const double x0 = kMargin + 60;
    const double y0 = kMargin;
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            out += rect_at(x0 + static_cast<double>(j) * cell,
                           y0 + static_cast<double>(i) * cell, cell, cell,
                           diverging_color(m(i, j)));
        }
        out += text_at(x0 - 4, y0 + (static_cast<double>(i) + 0.6) * cell,
                       labels[i], 9, "end");
        out += text_at(x0 + (static_cast<double>(i) + 0.5) * cell,
                       y0 + static_cast<double>(d) * cell + 12, labels[i], 9,
                       "middle");
    }
    return out + "</svg>\n";
}

std::string svg_histogram(const Histogram& h, const std::string& title) {
    std::string out = svg_open();
    out += text_at(kW / 2, 24, title, 14, "middle");
    Range xr{h.edges.front(), h.edges.back()};
    double max_count = 1.0;
    for (std::size_t c : h.counts) max_count = std::max(max_count, static_cast<double>(c));
    Range yr{0.0, max_count};
    out += axes(xr, yr, "value", "count");
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        const double x1 = xr.map(h.edges[i], kMargin, kW - kMargin);
        const double x2 = xr.map(h.edges[i + 1], kMargin, kW - kMargin);
        const double y = yr.map(static_cast<double>(h.counts[i]), kH - kMargin, kMargin);
        out += rect_at(x1, y, std::max(1.0, x2 - x1 - 1), (kH - kMargin) - y,
                       "steelblue");
    }
    return out + "</svg>\n";
}

std::string svg_line_chart(const std::vector<SvgSeries>& series,
                           const std::string& title, const std::string& x_label,
                           const std::string& y_label) {
    static const char* colors[] = {"steelblue", "firebrick", "seagreen", "goldenrod"};
    std::string out = svg_open();
    out += text_at(kW / 2, 24, title, 14, "middle");
    Range xr, yr;
    bool first = true;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            if (first) {
                xr = Range{s.x[i], s.x[i]};
                yr = Range{s.y[i], s.y[i]};
                first = false;
            }
            xr.include(s.x[i]);
            yr.include(s.y[i]);
        }
    }
    if (xr.lo == xr.hi) { xr.lo -= 0.5; xr.hi += 0.5; }
    if (yr.lo == yr.hi) { yr.lo -= 0.5; yr.hi += 0.5; }
    out += axes(xr, yr, x_label, y_label);
    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const std::string color = colors[si % 4];
        for (std::size_t i = 0; i + 1 < s.x.size(); ++i) {
            if (!std::isfinite(s.y[i]) || !std::isfinite(s.y[i + 1])) continue;
            out += line_at(xr.map(s.x[i], kMargin, kW - kMargin),
                           yr.map(s.y[i], kH - kMargin, kMargin),
                           xr.map(s.x[i + 1], kMargin, kW - kMargin),
                           yr.map(s.y[i + 1], kH - kMargin, kMargin), color, 1.5);
        }
        out += text_at(kW - kMargin - 120,
                       kMargin + 16 * static_cast<double>(si + 1), s.label, 11);
        out += rect_at(kW - kMargin - 134,
                       kMargin + 16 * static_cast<double>(si + 1) - 8, 10, 8, color);
    }
    return out + "</svg>\n";
}

std::string svg_bar_chart(const std::vector<std::string>& labels,
                          const std::vector<double>& values,
                          const std::string& title) {
    std::string out = svg_open();
    out += text_at(kW / 2, 24, title, 14, "middle");
    Range vr = Range::of(values);
    vr.include(0.0);
    const double n = static_cast<double>(values.size());
    const double band = (kH - 2 * kMargin) / std::max(1.0, n);
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double y = kMargin + static_cast<double>(i) * band;
        const double x0 = vr.map(0.0, kMargin + 110, kW - kMargin);
        const double x1 = vr.map(values[i], kMargin + 110, kW - kMargin);
        out += rect_at(std::min(x0, x1), y + band * 0.15, std::fabs(x1 - x0),
                       band * 0.7, "steelblue");
        out += text_at(kMargin + 104, y + band * 0.65, labels[i], 10, "end");
        out += text_at(std::max(x0, x1) + 4, y + band * 0.65, num(values[i]), 9);
    }
    return out + "</svg>\n";
}

std::string svg_scatter(const std::vector<double>& x, const std::vector<double>& y,
                        const std::string& title, const std::string& x_label,
                        const std::string& y_label) {
    std::string out = svg_open();
    out += text_at(kW / 2, 24, title, 14, "middle");
    Range xr = Range::of(x);
    Range yr = Range::of(y);
    out += axes(xr, yr, x_label, y_label);
    for (std::size_t i = 0; i < x.size(); ++i) {
        out += circle_at(xr.map(x[i], kMargin, kW - kMargin),
                         yr.map(y[i], kH - kMargin, kMargin), 2.0,
                         "rgba(70,130,180,0.6)");
    }
    return out + "</svg>\n";
}

} // namespace coastcast
