#pragma once

// Sweep orchestration: references once per (problem, N), noisy trajectories
// fanned out over (problem, delta, N, trial) cells, aggregation and derived
// statistics. Cells are independent tasks; every cell owns its noise stream,
// so results do not depend on the worker count.

#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "dde/bounds.hpp"
#include "dde/config.hpp"
#include "dde/metrics.hpp"
#include "dde/solver.hpp"

namespace dde {

/// Error functionals of a single noisy trajectory against the reference.
struct TrialRow {
    int problem_index = 0;
    int delta_index = 0;
    int grid_index = 0;
    int trial = 0;
    double h = 0.0;
    bool failed = false;
    std::string failure;
    std::vector<double> local_sup;       // per layer, empty when failed
    std::vector<double> cumulative_sup;  // per layer, empty when failed
    double seconds = 0.0;                // wall clock, kept out of CSV output

    [[nodiscard]] double global_error() const { return cumulative_sup.back(); }
};

/// Per-(problem, delta, N) aggregation over trials.
struct AggregateRow {
    int problem_index = 0;
    int delta_index = 0;
    int grid_index = 0;
    double h = 0.0;
    int trials_ok = 0;
    int trials_failed = 0;
    Aggregate global;                // of the whole-horizon error
    std::vector<double> mean_local;  // per layer
    std::vector<double> mean_cum;
    std::vector<double> std_cum;
    std::vector<double> max_cum;
    double seconds = 0.0;
};

/// Per-(problem, delta) derived statistics across the N list.
struct DerivedRow {
    int problem_index = 0;
    int delta_index = 0;
    double order_slope = std::numeric_limits<double>::quiet_NaN();
    PlateauResult plateau;
    double envelope_constant = std::numeric_limits<double>::quiet_NaN();
};

/// Window sizes for the derived statistics, echoed into output metadata.
inline constexpr int kOrderWindow = 4;
inline constexpr int kPlateauTail = 4;
inline constexpr double kPlateauSlopeTol = 0.15;

struct ConvergenceTable {
    ExperimentConfig config;
    std::vector<TestProblem> problems;  // materialized from config.problems
    std::vector<TrialRow> trials;       // ordered by (problem, delta, N, trial)
    std::vector<AggregateRow> aggregates;
    std::vector<DerivedRow> derived;
    std::vector<double> reference_seconds;  // indexed problem * N_count + N
    int failed_trials = 0;

    [[nodiscard]] const TrialRow& trial_at(int p, int d, int g, int t) const {
        const auto& c = config;
        const std::size_t idx =
            ((static_cast<std::size_t>(p) * c.deltas.size() + static_cast<std::size_t>(d)) *
                 c.step_counts.size() +
             static_cast<std::size_t>(g)) *
                static_cast<std::size_t>(c.trials) +
            static_cast<std::size_t>(t);
        return trials[idx];
    }

    [[nodiscard]] const AggregateRow& aggregate_at(int p, int d, int g) const {
        const auto& c = config;
        const std::size_t idx =
            (static_cast<std::size_t>(p) * c.deltas.size() + static_cast<std::size_t>(d)) *
                c.step_counts.size() +
            static_cast<std::size_t>(g);
        return aggregates[idx];
    }

    [[nodiscard]] const DerivedRow& derived_at(int p, int d) const {
        const std::size_t idx =
            static_cast<std::size_t>(p) * config.deltas.size() + static_cast<std::size_t>(d);
        return derived[idx];
    }
};

namespace detail {

/// Runs fn(0..count-1) on `workers` threads. The first exception, if any, is
/// rethrown on the calling thread after all workers join.
inline void parallel_for(int count, int workers, const std::function<void(int)>& fn) {
    if (workers <= 0) {
        workers = static_cast<int>(std::thread::hardware_concurrency());
        if (workers <= 0) workers = 1;
    }
    workers = std::min(workers, std::max(count, 1));
    if (workers == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::atomic<bool> has_error{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                const int i = next.fetch_add(1);
                if (i >= count || has_error.load()) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!has_error.exchange(true)) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

/// Regime selection for the fitted envelope: the benchmark is Lipschitz,
/// catalog problems follow their gamma. The whole-horizon error is compared
/// against the last layer's shape.
inline EnvelopeSpec envelope_spec_for(const TestProblem& p, int last_layer) {
    EnvelopeSpec spec;
    spec.alpha = p.regularity.alpha;
    spec.beta1 = p.regularity.beta1;
    spec.beta2 = p.regularity.beta2;
    spec.gamma = p.regularity.gamma;
    spec.layer = last_layer;
    if (p.id == ProblemId::LipBenchmark)
        spec.regime = EnvelopeRegime::Lipschitz;
    else if (p.gamma == 1.0)
        spec.regime = EnvelopeRegime::HolderGammaOne;
    else
        spec.regime = EnvelopeRegime::HolderGammaLtOne;
    return spec;
}

}  // namespace detail

/// Runs the full convergence sweep. For each (problem, N) one exact-input
/// reference on the grid refined by config.refinement; for each
/// (problem, delta, N, trial) one noisy solve and its error profile against
/// the reference. Diverged trajectories become failed rows and are excluded
/// from aggregates.
inline ConvergenceTable run_convergence(const ExperimentConfig& config,
                                        int workers = 0) {
    validate(config);

    ConvergenceTable table;
    table.config = config;
    for (const auto& sel : config.problems)
        table.problems.push_back(make_test_problem(sel.id, sel.gamma));

    const int problem_count = static_cast<int>(config.problems.size());
    const int delta_count = static_cast<int>(config.deltas.size());
    const int grid_count = static_cast<int>(config.step_counts.size());
    const int trial_count = config.trials;

    // references, one per (problem, N)
    const int ref_count = problem_count * grid_count;
    std::vector<std::optional<LayeredTrajectory>> references(
        static_cast<std::size_t>(ref_count));
    std::vector<std::string> reference_errors(static_cast<std::size_t>(ref_count));
    table.reference_seconds.assign(static_cast<std::size_t>(ref_count), 0.0);

    detail::parallel_for(ref_count, workers, [&](int idx) {
        const int p = idx / grid_count;
        const int g = idx % grid_count;
        const auto start = std::chrono::steady_clock::now();
        const DelayGrid grid = build_grid(config.tau, config.n, config.step_counts[g]);
        try {
            references[static_cast<std::size_t>(idx)] =
                reference_solve(table.problems[static_cast<std::size_t>(p)], grid,
                                config.refinement);
        } catch (const std::exception& e) {
            reference_errors[static_cast<std::size_t>(idx)] = e.what();
        }
        table.reference_seconds[static_cast<std::size_t>(idx)] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();
    });

    // noisy cells
    const std::size_t cell_count = static_cast<std::size_t>(problem_count) *
                                   static_cast<std::size_t>(delta_count) *
                                   static_cast<std::size_t>(grid_count) *
                                   static_cast<std::size_t>(trial_count);
    table.trials.resize(cell_count);

    detail::parallel_for(static_cast<int>(cell_count), workers, [&](int idx) {
        int rest = idx;
        const int t = rest % trial_count;
        rest /= trial_count;
        const int g = rest % grid_count;
        rest /= grid_count;
        const int d = rest % delta_count;
        const int p = rest / delta_count;

        TrialRow row;
        row.problem_index = p;
        row.delta_index = d;
        row.grid_index = g;
        row.trial = t;

        const DelayGrid grid = build_grid(config.tau, config.n, config.step_counts[g]);
        row.h = grid.h;

        const auto start = std::chrono::steady_clock::now();
        const int ref_idx = p * grid_count + g;
        if (!references[static_cast<std::size_t>(ref_idx)]) {
            row.failed = true;
            row.failure = "reference failed: " +
                          reference_errors[static_cast<std::size_t>(ref_idx)];
        } else {
            SolveRequest req;
            req.problem = table.problems[static_cast<std::size_t>(p)];
            req.grid = grid;
            req.noise = NoiseSpec{config.deltas[static_cast<std::size_t>(d)], config.mode,
                                  config.seed};
            req.trial_index = static_cast<std::uint64_t>(t);
            req.delta_index = static_cast<std::uint64_t>(d);
            req.grid_index = static_cast<std::uint64_t>(g);
            try {
                const LayeredTrajectory traj = euler_solve(req);
                ErrorProfile prof =
                    error_profile(traj, *references[static_cast<std::size_t>(ref_idx)]);
                row.local_sup = std::move(prof.local_sup);
                row.cumulative_sup = std::move(prof.cumulative_sup);
            } catch (const std::exception& e) {
                row.failed = true;
                row.failure = e.what();
            }
        }
        row.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();
        table.trials[static_cast<std::size_t>(idx)] = std::move(row);
    });

    // aggregation
    const int layer_count = config.n + 1;
    for (int p = 0; p < problem_count; ++p) {
        for (int d = 0; d < delta_count; ++d) {
            for (int g = 0; g < grid_count; ++g) {
                AggregateRow agg;
                agg.problem_index = p;
                agg.delta_index = d;
                agg.grid_index = g;
                agg.mean_local.assign(static_cast<std::size_t>(layer_count), 0.0);
                agg.mean_cum.assign(static_cast<std::size_t>(layer_count), 0.0);
                agg.std_cum.assign(static_cast<std::size_t>(layer_count), 0.0);
                agg.max_cum.assign(static_cast<std::size_t>(layer_count), 0.0);

                std::vector<double> globals;
                std::vector<std::vector<double>> cum_by_layer(
                    static_cast<std::size_t>(layer_count));
                for (int t = 0; t < trial_count; ++t) {
                    const TrialRow& row = table.trial_at(p, d, g, t);
                    agg.h = row.h;
                    agg.seconds += row.seconds;
                    if (row.failed) {
                        ++agg.trials_failed;
                        ++table.failed_trials;
                        continue;
                    }
                    ++agg.trials_ok;
                    globals.push_back(row.global_error());
                    for (int j = 0; j < layer_count; ++j) {
                        agg.mean_local[static_cast<std::size_t>(j)] +=
                            row.local_sup[static_cast<std::size_t>(j)];
                        cum_by_layer[static_cast<std::size_t>(j)].push_back(
                            row.cumulative_sup[static_cast<std::size_t>(j)]);
                    }
                }
                agg.global = aggregate(globals);
                if (agg.trials_ok > 0) {
                    for (int j = 0; j < layer_count; ++j) {
                        agg.mean_local[static_cast<std::size_t>(j)] /=
                            static_cast<double>(agg.trials_ok);
                        const Aggregate layer_agg =
                            aggregate(cum_by_layer[static_cast<std::size_t>(j)]);
                        agg.mean_cum[static_cast<std::size_t>(j)] = layer_agg.mean;
                        agg.std_cum[static_cast<std::size_t>(j)] = layer_agg.stddev;
                        agg.max_cum[static_cast<std::size_t>(j)] = layer_agg.max;
                    }
                }
                table.aggregates.push_back(std::move(agg));
            }
        }
    }

    // derived statistics per (problem, delta)
    for (int p = 0; p < problem_count; ++p) {
        for (int d = 0; d < delta_count; ++d) {
            DerivedRow row;
            row.problem_index = p;
            row.delta_index = d;

            std::vector<std::pair<double, double>> points;
            std::vector<EnvelopeObservation> observations;
            for (int g = 0; g < grid_count; ++g) {
                const AggregateRow& agg = table.aggregate_at(p, d, g);
                if (agg.trials_ok == 0) continue;
                points.emplace_back(agg.h, agg.global.mean);
                observations.push_back(
                    {agg.h, config.deltas[static_cast<std::size_t>(d)], agg.global.mean});
            }
            try {
                row.order_slope = estimate_order(
                    points, std::min<int>(kOrderWindow, static_cast<int>(points.size())));
            } catch (const std::invalid_argument&) {
            }
            try {
                row.plateau = detect_plateau(
                    points, std::min<int>(kPlateauTail, static_cast<int>(points.size())),
                    kPlateauSlopeTol);
            } catch (const std::invalid_argument&) {
                row.plateau = {};
                row.plateau.tail_slope = std::numeric_limits<double>::quiet_NaN();
            }
            if (!observations.empty()) {
                const EnvelopeSpec spec = detail::envelope_spec_for(
                    table.problems[static_cast<std::size_t>(p)], config.n);
                row.envelope_constant = fit_envelope_constant(observations, spec);
            }
            table.derived.push_back(row);
        }
    }
    return table;
}

/// The error-propagation experiment runs the same sweep; only the emitted
/// view differs (per-layer cumulative columns instead of per-N rows).
inline ConvergenceTable run_error_propagation(const ExperimentConfig& config,
                                              int workers = 0) {
    return run_convergence(config, workers);
}

}  // namespace dde
