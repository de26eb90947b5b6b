#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ccopt/errors.hpp"
#include "ccopt/strfmt.hpp"

namespace ccopt {

struct PlotSeries {
    std::string label;
    std::vector<std::pair<double, double>> points; // (x, y), drawn in order
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<PlotSeries> series;
};

namespace detail {

inline double nice_step(double raw) {
    if (!(raw > 0)) return 1.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double m = raw / mag;
    if (m <= 1.0) return mag;
    if (m <= 2.0) return 2.0 * mag;
    if (m <= 5.0) return 5.0 * mag;
    return 10.0 * mag;
}

inline std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
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

} // namespace detail

// Self-contained SVG line chart. Every coordinate is emitted with two
// decimals so identical inputs produce identical bytes.
inline std::string render_line_plot(const PlotSpec& spec) {
    if (spec.series.empty()) throw ConfigError("plot: no series to draw");
    for (const auto& s : spec.series)
        if (s.points.empty()) throw ConfigError("plot: series '" + s.label + "' is empty");

    double x_min = spec.series[0].points[0].first, x_max = x_min;
    double y_min = spec.series[0].points[0].second, y_max = y_min;
    for (const auto& s : spec.series)
        for (const auto& [x, y] : s.points) {
            x_min = std::min(x_min, x);
            x_max = std::max(x_max, x);
            y_min = std::min(y_min, y);
            y_max = std::max(y_max, y);
        }
    if (x_max - x_min < 1e-12) {
        x_min -= 1.0;
        x_max += 1.0;
    }
    if (y_max - y_min < 1e-12) {
        y_min -= 1.0;
        y_max += 1.0;
    }
    const double y_pad = 0.05 * (y_max - y_min);
    y_min -= y_pad;
    y_max += y_pad;

    const double W = 720, H = 480;
    const double ml = 66, mr = 18, mt = 40, mb = 52;
    const double pw = W - ml - mr, ph = H - mt - mb;
    auto X = [&](double x) { return ml + (x - x_min) / (x_max - x_min) * pw; };
    auto Y = [&](double y) { return mt + (1.0 - (y - y_min) / (y_max - y_min)) * ph; };

    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                    "#8c564b", "#17becf", "#7f7f7f", "#bcbd22", "#e377c2"};
    constexpr int palette_n = 10;

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"480\" "
           "viewBox=\"0 0 720 480\">\n";
    svg += "<rect width=\"720\" height=\"480\" fill=\"white\"/>\n";
    svg += "<text x=\"360\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"15\">" + detail::xml_escape(spec.title) + "</text>\n";

    const double xs = detail::nice_step((x_max - x_min) / 6.0);
    const double ys = detail::nice_step((y_max - y_min) / 6.0);
    svg += "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
    for (double t = std::ceil(x_min / xs) * xs; t <= x_max + 1e-9 * xs; t += xs) {
        const std::string px = format_fixed(X(t), 2);
        svg += "<line x1=\"" + px + "\" y1=\"" + format_fixed(mt, 2) + "\" x2=\"" + px +
               "\" y2=\"" + format_fixed(mt + ph, 2) + "\" stroke=\"#ddd\"/>\n";
        svg += "<text x=\"" + px + "\" y=\"" + format_fixed(mt + ph + 16, 2) +
               "\" text-anchor=\"middle\">" + format_g(t, 6) + "</text>\n";
    }
    for (double t = std::ceil(y_min / ys) * ys; t <= y_max + 1e-9 * ys; t += ys) {
        const std::string py = format_fixed(Y(t), 2);
        svg += "<line x1=\"" + format_fixed(ml, 2) + "\" y1=\"" + py + "\" x2=\"" +
               format_fixed(ml + pw, 2) + "\" y2=\"" + py + "\" stroke=\"#ddd\"/>\n";
        svg += "<text x=\"" + format_fixed(ml - 6, 2) + "\" y=\"" + py +
               "\" text-anchor=\"end\" dominant-baseline=\"middle\">" + format_g(t, 6) +
               "</text>\n";
    }
    svg += "</g>\n";
    svg += "<rect x=\"" + format_fixed(ml, 2) + "\" y=\"" + format_fixed(mt, 2) + "\" width=\"" +
           format_fixed(pw, 2) + "\" height=\"" + format_fixed(ph, 2) +
           "\" fill=\"none\" stroke=\"#444\"/>\n";
    svg += "<text x=\"" + format_fixed(ml + pw / 2, 2) + "\" y=\"" + format_fixed(H - 14, 2) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" +
           detail::xml_escape(spec.x_label) + "</text>\n";
    svg += "<text x=\"16\" y=\"" + format_fixed(mt + ph / 2, 2) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
           "transform=\"rotate(-90 16 " + format_fixed(mt + ph / 2, 2) + ")\">" +
           detail::xml_escape(spec.y_label) + "</text>\n";

    for (std::size_t si = 0; si < spec.series.size(); ++si) {
        const auto& s = spec.series[si];
        const char* color = palette[si % palette_n];
        const bool dashed = si >= palette_n;
        std::string pts;
        for (const auto& [x, y] : s.points) {
            if (!pts.empty()) pts += ' ';
            pts += format_fixed(X(x), 2) + "," + format_fixed(Y(y), 2);
        }
        svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
               "\" stroke-width=\"1.8\"" + (dashed ? " stroke-dasharray=\"6 3\"" : "") +
               " points=\"" + pts + "\"/>\n";
        for (const auto& [x, y] : s.points)
            svg += "<circle cx=\"" + format_fixed(X(x), 2) + "\" cy=\"" + format_fixed(Y(y), 2) +
                   "\" r=\"2.4\" fill=\"" + std::string(color) + "\"/>\n";
    }

    const double lx = ml + 10, ly = mt + 10;
    svg += "<g font-family=\"sans-serif\" font-size=\"12\">\n";
    for (std::size_t si = 0; si < spec.series.size(); ++si) {
        const double row_y = ly + 16.0 * static_cast<double>(si);
        const char* color = palette[si % palette_n];
        svg += "<line x1=\"" + format_fixed(lx, 2) + "\" y1=\"" + format_fixed(row_y - 4, 2) +
               "\" x2=\"" + format_fixed(lx + 22, 2) + "\" y2=\"" + format_fixed(row_y - 4, 2) +
               "\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.8\"/>\n";
        svg += "<text x=\"" + format_fixed(lx + 28, 2) + "\" y=\"" + format_fixed(row_y, 2) +
               "\">" + detail::xml_escape(spec.series[si].label) + "</text>\n";
    }
    svg += "</g>\n</svg>\n";
    return svg;
}

} // namespace ccopt
