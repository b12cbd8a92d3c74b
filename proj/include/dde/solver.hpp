#pragma once

// Layered explicit Euler for z'(t) = f(t, z(t), z(t - tau)) with constant
// history, in exact and perturbed-information variants, plus the refined-grid
// reference solve. One solve is strictly sequential; distinct solves share no
// mutable state.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dde/grid.hpp"
#include "dde/noise.hpp"
#include "dde/problems.hpp"

namespace dde {

/// Raised when an integration step produces a non-finite state.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(int layer, int step)
        : std::runtime_error("euler_solve: non-finite state after step k=" +
                             std::to_string(step) + " on layer j=" +
                             std::to_string(layer)),
          layer_(layer),
          step_(step) {}

    [[nodiscard]] int layer() const { return layer_; }
    [[nodiscard]] int step() const { return step_; }

private:
    int layer_;
    int step_;
};

/// Everything one trajectory needs. delta_index / grid_index locate the cell
/// inside a sweep (0 for standalone solves) and select the noise stream
/// together with trial_index.
struct SolveRequest {
    TestProblem problem;
    DelayGrid grid;
    NoiseSpec noise;
    std::uint64_t trial_index = 0;
    std::uint64_t delta_index = 0;
    std::uint64_t grid_index = 0;
};

/// Runs the layered Euler recursion
///   y_0^j = y_N^{j-1},   y_{k+1}^j = y_k^j + h * f~(t_k^j, y_k^j, y_k^{j-1})
/// with layer -1 filled by the perturbed history value. Noise mode Zero with
/// delta = 0 reproduces the exact-information scheme bit for bit.
inline LayeredTrajectory euler_solve(const SolveRequest& req) {
    const DelayGrid& g = req.grid;
    const TestProblem& p = req.problem;
    if (g.steps < 1 || g.tau <= 0.0)
        throw std::invalid_argument("euler_solve: invalid grid");
    if (static_cast<int>(p.eta.size()) != p.dim)
        throw std::invalid_argument("euler_solve: problem dimension mismatch");
    validate(req.noise);

    RngStream stream =
        trajectory_stream(req.noise, p, req.delta_index, req.grid_index, req.trial_index);

    LayeredTrajectory traj(g, p.dim);
    const std::vector<double> history = perturb_initial(req.noise, stream, p.eta);
    for (int k = 0; k <= g.steps; ++k) {
        auto dst = traj.node(-1, k);
        for (int i = 0; i < p.dim; ++i) dst[i] = history[static_cast<std::size_t>(i)];
    }

    std::vector<double> rhs(static_cast<std::size_t>(p.dim));
    std::vector<double> scratch(static_cast<std::size_t>(p.dim));
    for (int j = 0; j <= g.n; ++j) {
        {
            const auto src = traj.node(j - 1, g.steps);
            auto dst = traj.node(j, 0);
            for (int i = 0; i < p.dim; ++i) dst[i] = src[i];
        }
        for (int k = 0; k < g.steps; ++k) {
            const double t = g.node_time(j, k);
            const auto y = traj.node(j, k);
            const auto z = traj.node(j - 1, k);
            perturbed_eval(p, req.noise, stream, t, y, z, rhs, scratch);
            auto next = traj.node(j, k + 1);
            bool finite = true;
            for (int i = 0; i < p.dim; ++i) {
                next[i] = y[i] + g.h * rhs[static_cast<std::size_t>(i)];
                finite = finite && std::isfinite(next[i]);
            }
            if (!finite) throw DivergenceError(j, k);
        }
    }
    return traj;
}

/// Exact-information Euler solve on the grid refined by `refinement`,
/// restricted back to `coarse`. Stands in for the unknown exact solution;
/// its own discretization error is O(h / refinement).
inline LayeredTrajectory reference_solve(const TestProblem& problem,
                                         const DelayGrid& coarse, int refinement) {
    if (refinement < 1)
        throw std::invalid_argument("reference_solve: refinement must be >= 1");
    SolveRequest req;
    req.problem = problem;
    req.grid = build_grid(coarse.tau, coarse.n, coarse.steps * refinement);
    req.noise = NoiseSpec{0.0, NoiseMode::Zero, 0};
    LayeredTrajectory fine = euler_solve(req);
    return sample_to_coarse(fine, coarse, refinement);
}

}  // namespace dde
