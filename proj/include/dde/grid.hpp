#pragma once

// Layered time grids, node storage and piecewise-linear evaluation for
// constant-delay problems. A grid covers [-tau, (n+1)*tau]; layer j is the
// interval [j*tau, (j+1)*tau] with nodes t = j*tau + k*h, and layer -1 holds
// the constant history.

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dde {

/// Euclidean norm of a state vector.
inline double l2_norm(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

/// Euclidean distance between two states of equal dimension.
inline double l2_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

inline bool all_finite(std::span<const double> x) {
    for (double v : x)
        if (!std::isfinite(v)) return false;
    return true;
}

/// Uniform layered mesh. `n` counts the delay intervals beyond the first,
/// so the horizon is (n+1)*tau; `steps` is the node count per interval
/// minus one.
struct DelayGrid {
    double tau = 0.0;  ///< constant delay
    int n = 0;         ///< delay intervals beyond the first
    int steps = 0;     ///< steps per delay interval
    double h = 0.0;    ///< step size, tau / steps

    /// Time of node k on layer `layer` (layer in [-1, n], k in [0, steps]).
    /// The right endpoint k == steps is pinned to the start of the next
    /// layer so shared endpoints compare equal across layers.
    [[nodiscard]] double node_time(int layer, int k) const {
        if (k == steps) return (layer + 1) * tau;
        return layer * tau + k * h;
    }

    [[nodiscard]] double start_time() const { return -tau; }
    [[nodiscard]] double end_time() const { return (n + 1) * tau; }
    [[nodiscard]] int layer_count() const { return n + 2; }  // includes history

    friend bool operator==(const DelayGrid&, const DelayGrid&) = default;
};

/// Builds the uniform layered mesh with step h = tau / steps.
inline DelayGrid build_grid(double tau, int n, int steps) {
    if (!std::isfinite(tau) || tau <= 0.0)
        throw std::invalid_argument("build_grid: tau must be finite and > 0");
    if (n < 0)
        throw std::invalid_argument("build_grid: n must be >= 0");
    if (steps < 1)
        throw std::invalid_argument("build_grid: steps must be >= 1");
    DelayGrid g;
    g.tau = tau;
    g.n = n;
    g.steps = steps;
    g.h = tau / static_cast<double>(steps);
    return g;
}

/// Node values per layer, d-dimensional states. Layer -1 (the history) is
/// stored explicitly as steps+1 identical entries so the solver recursion
/// indexes all layers uniformly. Instances are filled once by their producer
/// and treated as immutable afterwards; concurrent readers are safe.
class LayeredTrajectory {
public:
    LayeredTrajectory(const DelayGrid& grid, int dim)
        : grid_(grid),
          dim_(dim),
          layers_(static_cast<std::size_t>(grid.layer_count()),
                  std::vector<double>(static_cast<std::size_t>(grid.steps + 1) *
                                      static_cast<std::size_t>(dim))) {
        if (dim < 1) throw std::invalid_argument("LayeredTrajectory: dim must be >= 1");
    }

    [[nodiscard]] const DelayGrid& grid() const { return grid_; }
    [[nodiscard]] int dim() const { return dim_; }

    [[nodiscard]] std::span<double> node(int layer, int k) {
        return {layer_data(layer).data() + static_cast<std::size_t>(k) * dim_,
                static_cast<std::size_t>(dim_)};
    }
    [[nodiscard]] std::span<const double> node(int layer, int k) const {
        return {layer_data(layer).data() + static_cast<std::size_t>(k) * dim_,
                static_cast<std::size_t>(dim_)};
    }

    /// Scalar shortcut for dim() == 1 data.
    [[nodiscard]] double value(int layer, int k) const { return node(layer, k)[0]; }

    /// Raw layer storage, (steps+1) * dim values; used for bitwise comparison.
    [[nodiscard]] const std::vector<double>& layer_data(int layer) const {
        return layers_.at(static_cast<std::size_t>(layer + 1));
    }
    [[nodiscard]] std::vector<double>& layer_data(int layer) {
        return layers_.at(static_cast<std::size_t>(layer + 1));
    }

private:
    DelayGrid grid_;
    int dim_;
    std::vector<std::vector<double>> layers_;  // index 0 is layer -1
};

/// Piecewise-linear evaluation of a trajectory over [-tau, (n+1)*tau].
/// Within layer j, value(t) = (1-theta)*y_k + theta*y_{k+1} with
/// theta = (t - t_k)/h, so node times reproduce stored values exactly.
/// Holds a reference; the trajectory must outlive the interpolant.
class Interpolant {
public:
    explicit Interpolant(const LayeredTrajectory& traj) : traj_(&traj) {}

    void eval(double t, std::span<double> out) const {
        const DelayGrid& g = traj_->grid();
        if (!std::isfinite(t) || t < g.start_time() || t > g.end_time())
            throw std::domain_error("Interpolant: t outside [-tau, (n+1)*tau]");

        // Locate the layer; shared endpoints may land on either side, the
        // continuity invariant makes both attributions agree.
        int j = static_cast<int>(std::floor(t / g.tau));
        if (j < -1) j = -1;
        if (j > g.n) j = g.n;
        while (j > -1 && t < g.node_time(j, 0)) --j;
        while (j < g.n && t >= g.node_time(j + 1, 0)) ++j;

        int k = static_cast<int>(std::floor((t - g.node_time(j, 0)) / g.h));
        if (k < 0) k = 0;
        if (k > g.steps - 1) k = g.steps - 1;
        while (k > 0 && t < g.node_time(j, k)) --k;
        while (k < g.steps - 1 && t >= g.node_time(j, k + 1)) ++k;

        const auto lo = traj_->node(j, k);
        const auto hi = traj_->node(j, k + 1);
        // node times reproduce stored values exactly, including the pinned
        // right endpoint whose offset is not an exact multiple of h
        if (t == g.node_time(j, k)) {
            for (std::size_t i = 0; i < out.size(); ++i) out[i] = lo[i];
            return;
        }
        if (t == g.node_time(j, k + 1)) {
            for (std::size_t i = 0; i < out.size(); ++i) out[i] = hi[i];
            return;
        }
        const double theta = (t - g.node_time(j, k)) / g.h;
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] = (1.0 - theta) * lo[i] + theta * hi[i];
    }

    [[nodiscard]] std::vector<double> operator()(double t) const {
        std::vector<double> out(static_cast<std::size_t>(traj_->dim()));
        eval(t, out);
        return out;
    }

    /// Scalar shortcut for dim() == 1 trajectories.
    [[nodiscard]] double value(double t) const { return (*this)(t)[0]; }

private:
    const LayeredTrajectory* traj_;
};

/// Restricts a trajectory on the refined grid (tau, n, refinement*steps) to
/// the coarse grid by taking every refinement-th node. Nodes align exactly,
/// no interpolation happens.
inline LayeredTrajectory sample_to_coarse(const LayeredTrajectory& fine,
                                          const DelayGrid& coarse,
                                          int refinement) {
    const DelayGrid& fg = fine.grid();
    if (refinement < 1)
        throw std::invalid_argument("sample_to_coarse: refinement must be >= 1");
    if (fg.tau != coarse.tau || fg.n != coarse.n)
        throw std::invalid_argument("sample_to_coarse: grids differ in tau or n");
    if (fg.steps != refinement * coarse.steps)
        throw std::invalid_argument(
            "sample_to_coarse: fine step count is not refinement * coarse steps");

    LayeredTrajectory out(coarse, fine.dim());
    for (int j = -1; j <= coarse.n; ++j) {
        for (int k = 0; k <= coarse.steps; ++k) {
            const auto src = fine.node(j, refinement * k);
            auto dst = out.node(j, k);
            for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i];
        }
    }
    return out;
}

}  // namespace dde
