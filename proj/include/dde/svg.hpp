#pragma once

// Self-contained SVG plots, no plotting dependency: identical tables render
// identical bytes (no timestamps, fixed coordinate formatting).
//   convergence: log-log error vs h, one polyline per delta, optional fitted
//                envelope overlay (dashed).
//   cumulative:  mean cumulative supremum vs layer index, one polyline per
//                delta, log y axis.
// Series without a positive value cannot appear on a log axis; they are
// dropped and noted in an SVG comment.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "dde/csv.hpp"
#include "dde/experiment.hpp"

namespace dde {

enum class PlotKind { Convergence, Cumulative };

namespace svg_detail {

inline constexpr const char* kPalette[] = {
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
    "#8c564b", "#17becf", "#7f7f7f", "#bcbd22", "#e377c2",
};
inline constexpr int kPaletteSize = 10;

inline std::string coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

struct Series {
    std::string label;
    std::string color;
    bool dashed = false;
    std::vector<std::pair<double, double>> points;  // data coordinates
};

struct Frame {
    double x0 = 70, x1 = 540, y0 = 470, y1 = 40;  // pixel box (y grows down)
    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;

    [[nodiscard]] double px(double x) const {
        return x0 + (x - xmin) / (xmax - xmin) * (x1 - x0);
    }
    [[nodiscard]] double py(double y) const {
        return y0 + (y - ymin) / (ymax - ymin) * (y1 - y0);
    }
};

inline std::string tick_label(double decade) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", std::pow(10.0, decade));
    return buf;
}

inline void expand_if_degenerate(double& lo, double& hi) {
    if (hi - lo < 1e-9) {
        lo -= 0.5;
        hi += 0.5;
    }
}

inline std::string polyline(const Frame& f, const Series& s) {
    std::string out = "  <polyline fill=\"none\" stroke=\"" + s.color +
                      "\" stroke-width=\"1.5\"";
    if (s.dashed) out += " stroke-dasharray=\"6 3\"";
    out += " points=\"";
    for (std::size_t i = 0; i < s.points.size(); ++i) {
        if (i) out += " ";
        out += coord(f.px(s.points[i].first)) + "," + coord(f.py(s.points[i].second));
    }
    out += "\" />\n";
    return out;
}

inline std::string render(const std::string& title, const std::string& xlabel,
                          const std::string& ylabel, bool log_x,
                          const std::vector<Series>& series,
                          const std::vector<std::string>& dropped) {
    Frame f;
    bool first = true;
    for (const auto& s : series) {
        for (const auto& [x, y] : s.points) {
            if (first) {
                f.xmin = f.xmax = x;
                f.ymin = f.ymax = y;
                first = false;
            } else {
                f.xmin = std::min(f.xmin, x);
                f.xmax = std::max(f.xmax, x);
                f.ymin = std::min(f.ymin, y);
                f.ymax = std::max(f.ymax, y);
            }
        }
    }
    expand_if_degenerate(f.xmin, f.xmax);
    expand_if_degenerate(f.ymin, f.ymax);
    const double xpad = 0.04 * (f.xmax - f.xmin);
    const double ypad = 0.06 * (f.ymax - f.ymin);
    f.xmin -= xpad;
    f.xmax += xpad;
    f.ymin -= ypad;
    f.ymax += ypad;

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"520\" "
           "viewBox=\"0 0 720 520\">\n";
    for (const auto& note : dropped)
        out += "  <!-- dropped series: " + note + " (no positive values for the log "
               "scale) -->\n";
    out += "  <rect x=\"0\" y=\"0\" width=\"720\" height=\"520\" fill=\"white\" />\n";
    out += "  <text x=\"305\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\" "
           "text-anchor=\"middle\">" + title + "</text>\n";

    // frame
    out += "  <rect x=\"" + coord(f.x0) + "\" y=\"" + coord(f.y1) + "\" width=\"" +
           coord(f.x1 - f.x0) + "\" height=\"" + coord(f.y0 - f.y1) +
           "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\" />\n";

    // x ticks: decades when log, integers otherwise
    if (log_x) {
        for (double d = std::ceil(f.xmin); d <= std::floor(f.xmax) + 1e-12; d += 1.0) {
            const double x = f.px(d);
            out += "  <line x1=\"" + coord(x) + "\" y1=\"" + coord(f.y1) + "\" x2=\"" +
                   coord(x) + "\" y2=\"" + coord(f.y0) +
                   "\" stroke=\"#dddddd\" stroke-width=\"1\" />\n";
            out += "  <text x=\"" + coord(x) + "\" y=\"" + coord(f.y0 + 18) +
                   "\" font-family=\"sans-serif\" font-size=\"11\" "
                   "text-anchor=\"middle\">" + tick_label(d) + "</text>\n";
        }
    } else {
        const int step = std::max(1, static_cast<int>((f.xmax - f.xmin) / 10.0));
        for (int v = static_cast<int>(std::ceil(f.xmin)); v <= f.xmax; v += step) {
            const double x = f.px(v);
            out += "  <line x1=\"" + coord(x) + "\" y1=\"" + coord(f.y1) + "\" x2=\"" +
                   coord(x) + "\" y2=\"" + coord(f.y0) +
                   "\" stroke=\"#dddddd\" stroke-width=\"1\" />\n";
            out += "  <text x=\"" + coord(x) + "\" y=\"" + coord(f.y0 + 18) +
                   "\" font-family=\"sans-serif\" font-size=\"11\" "
                   "text-anchor=\"middle\">" + std::to_string(v) + "</text>\n";
        }
    }
    // y ticks: always decades (log axis)
    for (double d = std::ceil(f.ymin); d <= std::floor(f.ymax) + 1e-12; d += 1.0) {
        const double y = f.py(d);
        out += "  <line x1=\"" + coord(f.x0) + "\" y1=\"" + coord(y) + "\" x2=\"" +
               coord(f.x1) + "\" y2=\"" + coord(y) +
               "\" stroke=\"#dddddd\" stroke-width=\"1\" />\n";
        out += "  <text x=\"" + coord(f.x0 - 8) + "\" y=\"" + coord(y + 4) +
               "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" +
               tick_label(d) + "</text>\n";
    }

    out += "  <text x=\"305\" y=\"508\" font-family=\"sans-serif\" font-size=\"13\" "
           "text-anchor=\"middle\">" + xlabel + "</text>\n";
    out += "  <text x=\"18\" y=\"255\" font-family=\"sans-serif\" font-size=\"13\" "
           "text-anchor=\"middle\" transform=\"rotate(-90 18 255)\">" + ylabel +
           "</text>\n";

    for (const auto& s : series) out += polyline(f, s);

    // legend
    double ly = 56.0;
    for (const auto& s : series) {
        out += "  <line x1=\"556\" y1=\"" + coord(ly - 4) + "\" x2=\"584\" y2=\"" +
               coord(ly - 4) + "\" stroke=\"" + s.color + "\" stroke-width=\"1.5\"";
        if (s.dashed) out += " stroke-dasharray=\"6 3\"";
        out += " />\n";
        out += "  <text x=\"590\" y=\"" + coord(ly) +
               "\" font-family=\"sans-serif\" font-size=\"11\">" + s.label +
               "</text>\n";
        ly += 18.0;
    }

    out += "</svg>\n";
    return out;
}

}  // namespace svg_detail

/// Renders one plot for one (problem, gamma) slice of the table.
[[nodiscard]] inline std::string render_plot(const ConvergenceTable& table,
                                             PlotKind kind, int problem_index,
                                             bool envelope_overlay = true) {
    if (table.aggregates.empty()) throw std::invalid_argument("render_plot: empty table");
    const ExperimentConfig& c = table.config;
    const TestProblem& problem = table.problems[static_cast<std::size_t>(problem_index)];
    const auto& selection = c.problems[static_cast<std::size_t>(problem_index)];
    const std::string pname =
        to_string(selection.id) + "  gamma=" + format_label(selection.gamma);

    std::vector<svg_detail::Series> series;
    std::vector<std::string> dropped;
    const int delta_count = static_cast<int>(c.deltas.size());
    const int grid_count = static_cast<int>(c.step_counts.size());

    if (kind == PlotKind::Convergence) {
        for (int d = 0; d < delta_count; ++d) {
            svg_detail::Series s;
            s.label = "delta=" + format_label(c.deltas[static_cast<std::size_t>(d)]);
            s.color = svg_detail::kPalette[d % svg_detail::kPaletteSize];
            for (int g = 0; g < grid_count; ++g) {
                const AggregateRow& agg = table.aggregate_at(problem_index, d, g);
                if (agg.trials_ok == 0 || !(agg.global.mean > 0.0)) continue;
                s.points.emplace_back(std::log10(agg.h), std::log10(agg.global.mean));
            }
            if (s.points.empty()) {
                dropped.push_back(s.label);
                continue;
            }
            std::sort(s.points.begin(), s.points.end());
            series.push_back(std::move(s));

            if (!envelope_overlay) continue;
            const DerivedRow& der = table.derived_at(problem_index, d);
            if (!std::isfinite(der.envelope_constant) || der.envelope_constant <= 0.0)
                continue;
            svg_detail::Series env;
            env.label = "envelope, delta=" +
                        format_label(c.deltas[static_cast<std::size_t>(d)]);
            env.color = series.back().color;
            env.dashed = true;
            const EnvelopeSpec spec = detail::envelope_spec_for(problem, c.n);
            for (int g = 0; g < grid_count; ++g) {
                const double h = table.aggregate_at(problem_index, d, g).h;
                const double value =
                    der.envelope_constant *
                    envelope(spec, h, c.deltas[static_cast<std::size_t>(d)]);
                if (value > 0.0)
                    env.points.emplace_back(std::log10(h), std::log10(value));
            }
            std::sort(env.points.begin(), env.points.end());
            if (!env.points.empty()) series.push_back(std::move(env));
        }
        return svg_detail::render(pname + "  (convergence)", "h", "error", true,
                                  series, dropped);
    }

    // cumulative view: one polyline per delta; plotted at the finest grid
    // (largest N), one row of layers per delta level.
    const int g = grid_count - 1;
    for (int d = 0; d < delta_count; ++d) {
        svg_detail::Series s;
        s.label = "delta=" + format_label(c.deltas[static_cast<std::size_t>(d)]);
        s.color = svg_detail::kPalette[d % svg_detail::kPaletteSize];
        const AggregateRow& agg = table.aggregate_at(problem_index, d, g);
        if (agg.trials_ok > 0) {
            for (int j = 0; j <= c.n; ++j) {
                const double v = agg.mean_cum[static_cast<std::size_t>(j)];
                if (v > 0.0) s.points.emplace_back(static_cast<double>(j), std::log10(v));
            }
        }
        if (s.points.empty()) {
            dropped.push_back(s.label);
            continue;
        }
        series.push_back(std::move(s));
    }
    return svg_detail::render(pname + "  (cumulative, N=" +
                                  std::to_string(c.step_counts[static_cast<std::size_t>(g)]) +
                                  ")",
                              "delay interval j", "cumulative sup error", false, series,
                              dropped);
}

/// Writes one plot file; bytes depend only on the table contents.
inline void emit_plot(const ConvergenceTable& table, const std::string& path,
                      PlotKind kind, int problem_index, bool envelope_overlay = true) {
    write_text_file(path, render_plot(table, kind, problem_index, envelope_overlay));
}

}  // namespace dde
