#pragma once

// CSV views of a convergence table. Every file starts with '#'-prefixed
// metadata (full config echo, generator id, version), then a header row and
// data rows sorted by key. Reals carry 17 significant digits so values
// round-trip exactly; identical tables render identical bytes.

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

#include "dde/experiment.hpp"
#include "dde/version.hpp"

namespace dde {

/// Shortest-round-trip decimal form with up to 17 significant digits.
[[nodiscard]] inline std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Compact form for labels and file names (e.g. gamma 0.225 -> "0.225").
[[nodiscard]] inline std::string format_label(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

namespace detail {

inline std::string problem_key(const ConvergenceTable& table, int p) {
    return to_string(table.config.problems[static_cast<std::size_t>(p)].id);
}

inline std::string config_metadata(const ConvergenceTable& table,
                                   const std::string& kind) {
    const ExperimentConfig& c = table.config;
    std::string m;
    m += "# dde " + kind + "\n";
    m += "# version = " + std::string(kVersion) + "\n";
    m += "# generator = " + std::string(kGeneratorId) + "\n";
    m += "# problems = ";
    for (std::size_t i = 0; i < c.problems.size(); ++i) {
        if (i) m += ",";
        m += to_string(c.problems[i].id) + ":" + format_real(c.problems[i].gamma);
    }
    m += "\n# noise.delta = ";
    for (std::size_t i = 0; i < c.deltas.size(); ++i) {
        if (i) m += ",";
        m += format_real(c.deltas[i]);
    }
    m += "\n# noise.mode = " + to_string(c.mode);
    m += "\n# noise.seed = " + std::to_string(c.seed);
    m += "\n# N_list = ";
    for (std::size_t i = 0; i < c.step_counts.size(); ++i) {
        if (i) m += ",";
        m += std::to_string(c.step_counts[i]);
    }
    m += "\n# tau = " + format_real(c.tau);
    m += "\n# n = " + std::to_string(c.n);
    m += "\n# trials = " + std::to_string(c.trials);
    m += "\n# refinement = " + std::to_string(c.refinement);
    m += "\n# order_window = " + std::to_string(kOrderWindow);
    m += "\n# plateau_tail = " + std::to_string(kPlateauTail);
    m += "\n# plateau_slope_tol = " + format_real(kPlateauSlopeTol);
    m += "\n# failed_trials = " + std::to_string(table.failed_trials);
    m += "\n";
    return m;
}

}  // namespace detail

/// Per-trial rows: one line per (problem, gamma, delta, N, trial) with the
/// whole-horizon error and the per-layer local/cumulative suprema. Failed
/// trials keep their key columns and carry nan error fields.
[[nodiscard]] inline std::string render_trials_csv(const ConvergenceTable& table) {
    if (table.trials.empty())
        throw std::invalid_argument("render_trials_csv: empty table");
    const ExperimentConfig& c = table.config;
    const int layers = c.n + 1;

    std::string out = detail::config_metadata(table, "convergence table (per trial)");
    out += "problem,gamma,delta,N,h,trial,mode,failed,err_global";
    for (int j = 0; j < layers; ++j) out += ",e_loc_" + std::to_string(j);
    for (int j = 0; j < layers; ++j) out += ",e_cum_" + std::to_string(j);
    out += "\n";

    const std::string mode = to_string(c.mode);
    const std::string nan = "nan";
    for (const TrialRow& row : table.trials) {
        out += detail::problem_key(table, row.problem_index);
        out += "," +
               format_real(c.problems[static_cast<std::size_t>(row.problem_index)].gamma);
        out += "," + format_real(c.deltas[static_cast<std::size_t>(row.delta_index)]);
        out += "," +
               std::to_string(c.step_counts[static_cast<std::size_t>(row.grid_index)]);
        out += "," + format_real(row.h);
        out += "," + std::to_string(row.trial);
        out += "," + mode;
        out += row.failed ? ",1" : ",0";
        if (row.failed) {
            out += "," + nan;
            for (int j = 0; j < 2 * layers; ++j) out += "," + nan;
        } else {
            out += "," + format_real(row.global_error());
            for (int j = 0; j < layers; ++j)
                out += "," + format_real(row.local_sup[static_cast<std::size_t>(j)]);
            for (int j = 0; j < layers; ++j)
                out += "," + format_real(row.cumulative_sup[static_cast<std::size_t>(j)]);
        }
        out += "\n";
    }
    return out;
}

/// Aggregated rows: mean/max/std of the whole-horizon error per
/// (problem, gamma, delta, N).
[[nodiscard]] inline std::string render_summary_csv(const ConvergenceTable& table) {
    if (table.aggregates.empty())
        throw std::invalid_argument("render_summary_csv: empty table");
    const ExperimentConfig& c = table.config;

    std::string out = detail::config_metadata(table, "convergence table (aggregated)");
    out += "problem,gamma,delta,N,h,mode,trials_ok,trials_failed,err_mean,err_max,err_std\n";
    const std::string mode = to_string(c.mode);
    for (const AggregateRow& row : table.aggregates) {
        out += detail::problem_key(table, row.problem_index);
        out += "," +
               format_real(c.problems[static_cast<std::size_t>(row.problem_index)].gamma);
        out += "," + format_real(c.deltas[static_cast<std::size_t>(row.delta_index)]);
        out += "," +
               std::to_string(c.step_counts[static_cast<std::size_t>(row.grid_index)]);
        out += "," + format_real(row.h);
        out += "," + mode;
        out += "," + std::to_string(row.trials_ok);
        out += "," + std::to_string(row.trials_failed);
        out += "," + format_real(row.global.mean);
        out += "," + format_real(row.global.max);
        out += "," + format_real(row.global.stddev);
        out += "\n";
    }
    return out;
}

/// Derived statistics per (problem, gamma, delta): empirical order over the
/// largest-h window, plateau flag/level over the smallest-h tail, fitted
/// envelope constant.
[[nodiscard]] inline std::string render_orders_csv(const ConvergenceTable& table) {
    if (table.derived.empty())
        throw std::invalid_argument("render_orders_csv: empty table");
    const ExperimentConfig& c = table.config;

    std::string out = detail::config_metadata(table, "derived statistics");
    out += "problem,gamma,delta,mode,order_slope,plateau,plateau_level,tail_slope,"
           "envelope_constant\n";
    const std::string mode = to_string(c.mode);
    for (const DerivedRow& row : table.derived) {
        out += detail::problem_key(table, row.problem_index);
        out += "," +
               format_real(c.problems[static_cast<std::size_t>(row.problem_index)].gamma);
        out += "," + format_real(c.deltas[static_cast<std::size_t>(row.delta_index)]);
        out += "," + mode;
        out += "," + format_real(row.order_slope);
        out += row.plateau.is_plateau ? ",1" : ",0";
        out += "," + format_real(row.plateau.level);
        out += "," + format_real(row.plateau.tail_slope);
        out += "," + format_real(row.envelope_constant);
        out += "\n";
    }
    return out;
}

/// Cumulative view: one row per (problem, gamma, delta, N) with the mean
/// cumulative supremum per layer as columns; rows are nondecreasing left to
/// right by construction.
[[nodiscard]] inline std::string render_propagation_csv(const ConvergenceTable& table) {
    if (table.aggregates.empty())
        throw std::invalid_argument("render_propagation_csv: empty table");
    const ExperimentConfig& c = table.config;
    const int layers = c.n + 1;

    std::string out = detail::config_metadata(table, "error propagation table");
    out += "problem,gamma,delta,N,h,mode";
    for (int j = 0; j < layers; ++j) out += ",e_cum_" + std::to_string(j);
    out += "\n";
    const std::string mode = to_string(c.mode);
    for (const AggregateRow& row : table.aggregates) {
        out += detail::problem_key(table, row.problem_index);
        out += "," +
               format_real(c.problems[static_cast<std::size_t>(row.problem_index)].gamma);
        out += "," + format_real(c.deltas[static_cast<std::size_t>(row.delta_index)]);
        out += "," +
               std::to_string(c.step_counts[static_cast<std::size_t>(row.grid_index)]);
        out += "," + format_real(row.h);
        out += "," + mode;
        for (int j = 0; j < layers; ++j)
            out += "," + format_real(row.mean_cum[static_cast<std::size_t>(j)]);
        out += "\n";
    }
    return out;
}

/// Wall-clock log. Deliberately a .log, not a .csv: timing is the one
/// non-reproducible output, and the reproducibility contract covers the CSV
/// and SVG files.
[[nodiscard]] inline std::string render_timings_log(const ConvergenceTable& table) {
    const ExperimentConfig& c = table.config;
    const int grid_count = static_cast<int>(c.step_counts.size());
    std::string out = "# wall-clock seconds per reference and per cell\n";
    for (int p = 0; p < static_cast<int>(c.problems.size()); ++p)
        for (int g = 0; g < grid_count; ++g)
            out += "reference " + detail::problem_key(table, p) + ":" +
                   format_label(c.problems[static_cast<std::size_t>(p)].gamma) + " N=" +
                   std::to_string(c.step_counts[static_cast<std::size_t>(g)]) + " " +
                   format_real(
                       table.reference_seconds[static_cast<std::size_t>(p * grid_count + g)]) +
                   "\n";
    for (const AggregateRow& row : table.aggregates)
        out += "cell " + detail::problem_key(table, row.problem_index) + ":" +
               format_label(
                   c.problems[static_cast<std::size_t>(row.problem_index)].gamma) +
               " delta=" +
               format_label(c.deltas[static_cast<std::size_t>(row.delta_index)]) +
               " N=" +
               std::to_string(c.step_counts[static_cast<std::size_t>(row.grid_index)]) +
               " trials=" + std::to_string(row.trials_ok + row.trials_failed) + " " +
               format_real(row.seconds) + "\n";
    return out;
}

/// Writes the per-trial view; the canonical emit_csv of a table.
inline void emit_csv(const ConvergenceTable& table, const std::string& path) {
    write_text_file(path, render_trials_csv(table));
}

inline void emit_summary_csv(const ConvergenceTable& table, const std::string& path) {
    write_text_file(path, render_summary_csv(table));
}

inline void emit_orders_csv(const ConvergenceTable& table, const std::string& path) {
    write_text_file(path, render_orders_csv(table));
}

inline void emit_propagation_csv(const ConvergenceTable& table,
                                 const std::string& path) {
    write_text_file(path, render_propagation_csv(table));
}

inline void emit_timings_log(const ConvergenceTable& table, const std::string& path) {
    write_text_file(path, render_timings_log(table));
}

/// CSV of a single trajectory: metadata echo, then one row per node with
/// columns j,k,t,y0..y{d-1}.
[[nodiscard]] inline std::string render_trajectory_csv(const SolveRequest& req,
                                                       const LayeredTrajectory& traj) {
    const DelayGrid& g = traj.grid();
    std::string out;
    out += "# dde trajectory\n";
    out += "# version = " + std::string(kVersion) + "\n";
    out += "# generator = " + std::string(kGeneratorId) + "\n";
    out += "# problem = " + to_string(req.problem.id) + "\n";
    out += "# gamma = " + format_real(req.problem.gamma) + "\n";
    out += "# eta = " + format_real(req.problem.eta[0]) + "\n";
    out += "# tau = " + format_real(g.tau) + "\n";
    out += "# n = " + std::to_string(g.n) + "\n";
    out += "# N = " + std::to_string(g.steps) + "\n";
    out += "# h = " + format_real(g.h) + "\n";
    out += "# noise.delta = " + format_real(req.noise.delta) + "\n";
    out += "# noise.mode = " + to_string(req.noise.mode) + "\n";
    out += "# noise.seed = " + std::to_string(req.noise.seed) + "\n";
    out += "# trial = " + std::to_string(req.trial_index) + "\n";
    out += "j,k,t";
    for (int i = 0; i < traj.dim(); ++i) out += ",y" + std::to_string(i);
    out += "\n";
    for (int j = -1; j <= g.n; ++j) {
        for (int k = 0; k <= g.steps; ++k) {
            out += std::to_string(j) + "," + std::to_string(k) + "," +
                   format_real(g.node_time(j, k));
            const auto y = traj.node(j, k);
            for (double v : y) out += "," + format_real(v);
            out += "\n";
        }
    }
    return out;
}

}  // namespace dde
