#pragma once

// Self-contained SVG line/bar plots. No renderer dependency: axes,
// ticks, polylines, bars and error bars are written as primitives, and
// identical inputs produce identical files.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "biphoton/errors.hpp"
#include "biphoton/io/csv.hpp"

namespace biphoton::io {

struct PlotSeries {
    enum class Kind { line, points, bars };
    std::string label;
    std::string color = "#1f77b4";
    Kind kind = Kind::line;
    std::vector<std::pair<double, double>> xy;
    std::vector<double> yerr; // optional, per point
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<PlotSeries> series;
    bool log_x = false;
};

namespace detail {

struct Scale {
    double lo = 0.0, hi = 1.0;
    double px0 = 0.0, px1 = 1.0;
    bool log = false;

    double operator()(double v) const {
        const double t = log ? (std::log10(v) - std::log10(lo)) / (std::log10(hi) - std::log10(lo))
                             : (v - lo) / (hi - lo);
        return px0 + t * (px1 - px0);
    }
};

// Round a raw interval to 1/2/5 ticks.
inline std::vector<double> nice_ticks(double lo, double hi, int target = 6) {
    std::vector<double> ticks;
    const double span = hi - lo;
    if (!(span > 0.0)) return {lo};
    const double raw_step = span / std::max(target - 1, 1);
    const double mag = std::pow(10.0, std::floor(std::log10(raw_step)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (raw_step <= m * mag) {
            step = m * mag;
            break;
        }
    }
    const double first = std::ceil(lo / step) * step;
    for (double t = first; t <= hi + 1e-9 * span; t += step) ticks.push_back(t);
    return ticks;
}

} // namespace detail

inline void write_svg_plot(const std::filesystem::path& path, const PlotSpec& spec) {
    if (spec.series.empty()) throw IoError("refusing to write a plot with no series: " + path.string());
    for (const auto& s : spec.series)
        if (s.xy.empty()) throw IoError("refusing to plot an empty series: " + path.string());

    const double width = 860, height = 540;
    const double ml = 72, mr = 24, mt = 40, mb = 56;

    double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
    for (const auto& s : spec.series) {
        for (std::size_t i = 0; i < s.xy.size(); ++i) {
            const auto& [x, y] = s.xy[i];
            const double e = i < s.yerr.size() ? s.yerr[i] : 0.0;
            xlo = std::min(xlo, x);
            xhi = std::max(xhi, x);
            ylo = std::min(ylo, y - e);
            yhi = std::max(yhi, y + e);
        }
    }
    if (xhi <= xlo) xhi = xlo + 1.0;
    if (yhi <= ylo) yhi = ylo + 1.0;
    const double ypad = 0.06 * (yhi - ylo);
    ylo -= ypad;
    yhi += ypad;
    if (!spec.log_x) {
        const double xpad = 0.02 * (xhi - xlo);
        xlo -= xpad;
        xhi += xpad;
    }

    detail::Scale sx{xlo, xhi, ml, width - mr, spec.log_x};
    detail::Scale sy{ylo, yhi, height - mb, mt, false};

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    // Frame.
    svg << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << (width - ml - mr)
        << "\" height=\"" << (height - mt - mb) << "\" fill=\"none\" stroke=\"#333\"/>\n";

    // Ticks and grid.
    const auto xticks = spec.log_x ? std::vector<double>{} : detail::nice_ticks(xlo, xhi);
    for (double t : xticks) {
        const double px = sx(t);
        svg << "<line x1=\"" << format_double(px) << "\" y1=\"" << (height - mb) << "\" x2=\""
            << format_double(px) << "\" y2=\"" << (height - mb + 5) << "\" stroke=\"#333\"/>\n";
        svg << "<text x=\"" << format_double(px) << "\" y=\"" << (height - mb + 20)
            << "\" font-size=\"12\" text-anchor=\"middle\">" << format_double(t) << "</text>\n";
    }
    for (double t : detail::nice_ticks(ylo, yhi)) {
        const double py = sy(t);
        svg << "<line x1=\"" << (ml - 5) << "\" y1=\"" << format_double(py) << "\" x2=\"" << ml
            << "\" y2=\"" << format_double(py) << "\" stroke=\"#333\"/>\n";
        svg << "<text x=\"" << (ml - 8) << "\" y=\"" << format_double(py + 4)
            << "\" font-size=\"12\" text-anchor=\"end\">" << format_double(t) << "</text>\n";
    }

    // Labels and title.
    svg << "<text x=\"" << (ml + (width - ml - mr) / 2) << "\" y=\"" << (height - 14)
        << "\" font-size=\"14\" text-anchor=\"middle\">" << spec.x_label << "</text>\n";
    svg << "<text x=\"18\" y=\"" << (mt + (height - mt - mb) / 2)
        << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
        << (mt + (height - mt - mb) / 2) << ")\">" << spec.y_label << "</text>\n";
    svg << "<text x=\"" << (width / 2) << "\" y=\"24\" font-size=\"16\" text-anchor=\"middle\">"
        << spec.title << "</text>\n";

    // Series.
    int legend_row = 0;
    for (const auto& s : spec.series) {
        if (s.kind == PlotSeries::Kind::line) {
            svg << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
            for (const auto& [x, y] : s.xy)
                svg << format_double(sx(x)) << ',' << format_double(sy(y)) << ' ';
            svg << "\"/>\n";
        } else if (s.kind == PlotSeries::Kind::points) {
            for (std::size_t i = 0; i < s.xy.size(); ++i) {
                const auto& [x, y] = s.xy[i];
                if (i < s.yerr.size() && s.yerr[i] > 0.0) {
                    svg << "<line x1=\"" << format_double(sx(x)) << "\" y1=\""
                        << format_double(sy(y - s.yerr[i])) << "\" x2=\"" << format_double(sx(x))
                        << "\" y2=\"" << format_double(sy(y + s.yerr[i])) << "\" stroke=\"" << s.color
                        << "\"/>\n";
                }
                svg << "<circle cx=\"" << format_double(sx(x)) << "\" cy=\"" << format_double(sy(y))
                    << "\" r=\"3.5\" fill=\"" << s.color << "\"/>\n";
            }
        } else {
            // Bars: consecutive points define bar centers; width from spacing.
            double bar_w = (sx.px1 - sx.px0) / std::max<std::size_t>(s.xy.size(), 1) * 0.9;
            if (s.xy.size() > 1) bar_w = std::abs(sx(s.xy[1].first) - sx(s.xy[0].first)) * 0.9;
            for (const auto& [x, y] : s.xy) {
                const double px = sx(x);
                const double py = sy(y);
                const double base = sy(std::max(ylo, 0.0));
                svg << "<rect x=\"" << format_double(px - bar_w / 2) << "\" y=\""
                    << format_double(std::min(py, base)) << "\" width=\"" << format_double(bar_w)
                    << "\" height=\"" << format_double(std::abs(base - py)) << "\" fill=\"" << s.color
                    << "\" fill-opacity=\"0.65\"/>\n";
            }
        }
        if (!s.label.empty()) {
            const double ly = mt + 16 + 18 * legend_row++;
            svg << "<rect x=\"" << (width - mr - 150) << "\" y=\"" << (ly - 9)
                << "\" width=\"12\" height=\"12\" fill=\"" << s.color << "\"/>\n";
            svg << "<text x=\"" << (width - mr - 132) << "\" y=\"" << (ly + 2)
                << "\" font-size=\"12\">" << s.label << "</text>\n";
        }
    }
    svg << "</svg>\n";
    write_text_file(path, svg.str());
}

} // namespace biphoton::io
