#pragma once

// Error functionals between layered trajectories, empirical convergence-order
// estimation and plateau detection. All functions are pure.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dde/grid.hpp"

namespace dde {

/// Per-layer error functionals between two trajectories on one grid.
/// local_sup[j] is the supremum over [j*tau, (j+1)*tau] of the interpolant
/// difference; for same-grid trajectories the difference is piecewise linear,
/// so it equals the node maximum grid_max[j]. cumulative_sup[j] is the
/// running maximum of local_sup[0..j].
struct ErrorProfile {
    std::vector<double> grid_max;
    std::vector<double> local_sup;
    std::vector<double> cumulative_sup;

    [[nodiscard]] double global() const { return cumulative_sup.back(); }
};

inline ErrorProfile error_profile(const LayeredTrajectory& a,
                                  const LayeredTrajectory& b) {
    if (a.grid() != b.grid())
        throw std::invalid_argument("error_profile: trajectories on different grids");
    if (a.dim() != b.dim())
        throw std::invalid_argument("error_profile: dimension mismatch");

    const DelayGrid& g = a.grid();
    ErrorProfile prof;
    prof.grid_max.resize(static_cast<std::size_t>(g.n) + 1);
    prof.local_sup.resize(static_cast<std::size_t>(g.n) + 1);
    prof.cumulative_sup.resize(static_cast<std::size_t>(g.n) + 1);

    double running = 0.0;
    for (int j = 0; j <= g.n; ++j) {
        double layer_max = 0.0;
        for (int k = 0; k <= g.steps; ++k)
            layer_max = std::max(layer_max, l2_distance(a.node(j, k), b.node(j, k)));
        prof.grid_max[static_cast<std::size_t>(j)] = layer_max;
        prof.local_sup[static_cast<std::size_t>(j)] = layer_max;
        running = std::max(running, layer_max);
        prof.cumulative_sup[static_cast<std::size_t>(j)] = running;
    }
    return prof;
}

namespace detail {

/// Least-squares slope of log(error) against log(h) for a span of points.
/// Assumes every error is positive.
inline double loglog_slope(std::span<const std::pair<double, double>> pts) {
    const double count = static_cast<double>(pts.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& [h, err] : pts) {
        const double x = std::log(h);
        const double y = std::log(err);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = count * sxx - sx * sx;
    if (denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return (count * sxy - sx * sy) / denom;
}

inline std::vector<std::pair<double, double>> usable_points(
    std::span<const std::pair<double, double>> points) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& p : points)
        if (std::isfinite(p.first) && p.first > 0.0 && std::isfinite(p.second) &&
            p.second >= 0.0)
            pts.push_back(p);
    return pts;
}

}  // namespace detail

/// Empirical order: least-squares slope of log(error) vs log(h) over the
/// `window` largest-h points (the pre-plateau region). A zero error inside
/// the window makes the slope undefined and yields NaN.
inline double estimate_order(std::span<const std::pair<double, double>> points,
                             int window) {
    auto pts = detail::usable_points(points);
    if (pts.size() < 2)
        throw std::invalid_argument("estimate_order: fewer than 2 usable points");
    if (window < 2 || static_cast<std::size_t>(window) > pts.size())
        throw std::invalid_argument("estimate_order: window must lie in [2, count]");

    std::sort(pts.begin(), pts.end(),
              [](const auto& l, const auto& r) { return l.first > r.first; });
    pts.resize(static_cast<std::size_t>(window));
    for (const auto& [h, err] : pts)
        if (err == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return detail::loglog_slope(pts);
}

struct PlateauResult {
    bool is_plateau = false;
    double level = 0.0;       ///< geometric mean of the tail errors
    double tail_slope = 0.0;  ///< log-log slope over the tail window
};

/// Flags a noise plateau: the log-log slope over the `tail` smallest-h points
/// is below `slope_tol` in magnitude. The level is the geometric mean of the
/// tail errors. A zero tail error cannot be a plateau on a log scale and
/// yields {false, 0}.
inline PlateauResult detect_plateau(std::span<const std::pair<double, double>> points,
                                    int tail = 4, double slope_tol = 0.15) {
    auto pts = detail::usable_points(points);
    if (pts.size() < 2)
        throw std::invalid_argument("detect_plateau: fewer than 2 usable points");
    if (tail < 2 || static_cast<std::size_t>(tail) > pts.size())
        throw std::invalid_argument("detect_plateau: tail must lie in [2, count]");

    std::sort(pts.begin(), pts.end(),
              [](const auto& l, const auto& r) { return l.first < r.first; });
    pts.resize(static_cast<std::size_t>(tail));
    for (const auto& [h, err] : pts)
        if (err == 0.0) return {false, 0.0, std::numeric_limits<double>::quiet_NaN()};

    PlateauResult res;
    res.tail_slope = detail::loglog_slope(pts);
    res.is_plateau = std::abs(res.tail_slope) < slope_tol;
    double log_sum = 0.0;
    for (const auto& [h, err] : pts) log_sum += std::log(err);
    res.level = std::exp(log_sum / static_cast<double>(tail));
    return res;
}

/// Mean / max / sample standard deviation of a batch of values.
struct Aggregate {
    double mean = 0.0;
    double max = 0.0;
    double stddev = 0.0;
    int count = 0;
};

inline Aggregate aggregate(std::span<const double> values) {
    Aggregate a;
    a.count = static_cast<int>(values.size());
    if (values.empty()) return a;
    double sum = 0.0;
    a.max = values[0];
    for (double v : values) {
        sum += v;
        a.max = std::max(a.max, v);
    }
    a.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - a.mean) * (v - a.mean);
        a.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return a;
}

}  // namespace dde
