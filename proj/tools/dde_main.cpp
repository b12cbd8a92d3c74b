// Command-line front end: single trajectories, convergence and
// error-propagation sweeps, and envelope evaluation.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dde/dde.hpp"

namespace {

struct SweepOptions {
    std::string config_path;
    std::string profile = "paper";
    std::string out_dir;
    std::string plots = "on";
    std::optional<std::uint64_t> seed;
    int workers = 0;
};

void add_sweep_flags(CLI::App* cmd, SweepOptions& opt) {
    cmd->add_option("--config", opt.config_path, "key=value config file");
    cmd->add_option("--profile", opt.profile, "desk or paper scale (default paper)")
        ->check(CLI::IsMember({"desk", "paper"}));
    cmd->add_option("--seed", opt.seed, "master seed override");
    cmd->add_option("--out", opt.out_dir, "output directory override");
    cmd->add_option("--plots", opt.plots, "emit SVG plots (on/off)")
        ->check(CLI::IsMember({"on", "off"}));
    cmd->add_option("--workers", opt.workers,
                    "worker threads (0 = hardware concurrency)");
}

dde::ExperimentConfig resolve_config(const SweepOptions& opt) {
    dde::ExperimentConfig cfg = dde::default_config();
    if (opt.profile == "desk") dde::apply_desk_profile(cfg);
    if (!opt.config_path.empty()) cfg = dde::parse_config(opt.config_path, cfg);
    if (opt.seed) cfg.seed = *opt.seed;
    if (!opt.out_dir.empty()) cfg.out_dir = opt.out_dir;
    dde::validate(cfg);
    return cfg;
}

std::string plot_path(const dde::ConvergenceTable& table, int p, bool cumulative) {
    const auto& sel = table.config.problems[static_cast<std::size_t>(p)];
    return table.config.out_dir + "/" + dde::to_string(sel.id) + "_" +
           dde::format_label(sel.gamma) + (cumulative ? "_cum.svg" : ".svg");
}

int run_converge(const SweepOptions& opt) {
    const dde::ExperimentConfig cfg = resolve_config(opt);
    std::filesystem::create_directories(cfg.out_dir);
    const dde::ConvergenceTable table = dde::run_convergence(cfg, opt.workers);

    dde::emit_csv(table, cfg.out_dir + "/convergence.csv");
    dde::emit_summary_csv(table, cfg.out_dir + "/convergence_summary.csv");
    dde::emit_orders_csv(table, cfg.out_dir + "/orders.csv");
    dde::emit_timings_log(table, cfg.out_dir + "/timings.log");
    if (opt.plots == "on")
        for (int p = 0; p < static_cast<int>(cfg.problems.size()); ++p)
            dde::emit_plot(table, plot_path(table, p, false), dde::PlotKind::Convergence,
                           p);
    std::cout << "convergence sweep done: " << table.trials.size() << " trials, "
              << table.failed_trials << " failed; outputs in " << cfg.out_dir << "\n";
    return 0;
}

int run_propagate(const SweepOptions& opt) {
    const dde::ExperimentConfig cfg = resolve_config(opt);
    std::filesystem::create_directories(cfg.out_dir);
    const dde::ConvergenceTable table = dde::run_error_propagation(cfg, opt.workers);

    dde::emit_propagation_csv(table, cfg.out_dir + "/propagation.csv");
    dde::emit_timings_log(table, cfg.out_dir + "/timings.log");
    if (opt.plots == "on")
        for (int p = 0; p < static_cast<int>(cfg.problems.size()); ++p)
            dde::emit_plot(table, plot_path(table, p, true), dde::PlotKind::Cumulative, p);
    std::cout << "propagation sweep done: " << table.trials.size() << " trials, "
              << table.failed_trials << " failed; outputs in " << cfg.out_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Layered Euler integrator for constant-delay equations under "
                 "perturbed right-hand-side information"};
    app.require_subcommand(1);

    // solve
    auto* solve = app.add_subcommand("solve", "integrate a single trajectory");
    std::string problem_key = "f1";
    double gamma = 1.0, tau = 20.0, delta = 0.0;
    int n = 9, steps = 100;
    std::string mode_key = "zero";
    std::uint64_t seed = 0, trial = 0;
    std::optional<double> eta;
    std::string solve_out = "-";
    solve->add_option("--problem", problem_key, "f1, f2, f3, f4 or lip");
    solve->add_option("--gamma", gamma, "delay Hoelder exponent in (0,1]");
    solve->add_option("--tau", tau, "constant delay");
    solve->add_option("--n", n, "delay intervals beyond the first");
    solve->add_option("--N", steps, "steps per delay interval");
    solve->add_option("--delta", delta, "noise level in [0,1]");
    solve->add_option("--mode", mode_key, "zero, uniform or worst")
        ->check(CLI::IsMember({"zero", "uniform", "worst"}));
    solve->add_option("--seed", seed, "master seed");
    solve->add_option("--trial", trial, "trial index (stream selector)");
    solve->add_option("--eta", eta, "history value override");
    solve->add_option("--out", solve_out, "output CSV path, '-' for stdout");

    // converge / propagate
    SweepOptions converge_opt, propagate_opt;
    auto* converge =
        app.add_subcommand("converge", "error vs step size sweep with references");
    add_sweep_flags(converge, converge_opt);
    auto* propagate =
        app.add_subcommand("propagate", "error accumulation across delay intervals");
    add_sweep_flags(propagate, propagate_opt);

    // envelope
    auto* envelope_cmd =
        app.add_subcommand("envelope", "evaluate a theoretical error-envelope shape");
    envelope_cmd->set_help_flag("--help", "print help");  // frees --h for the step size
    std::string kind = "solution", regime = "holder";
    double env_gamma = 1.0, alpha = 1.0, beta1 = 1.0, beta2 = 1.0;
    int layer = 0;
    double env_h = 0.0, env_delta = 0.0;
    envelope_cmd->add_option("--kind", kind, "solution or grid")
        ->check(CLI::IsMember({"solution", "grid"}));
    envelope_cmd->add_option("--regime", regime,
                             "lipschitz or holder (solution kind only)")
        ->check(CLI::IsMember({"lipschitz", "holder"}));
    envelope_cmd->add_option("--gamma", env_gamma, "delay Hoelder exponent");
    envelope_cmd->add_option("--alpha", alpha, "time exponent");
    envelope_cmd->add_option("--beta1", beta1, "first state exponent");
    envelope_cmd->add_option("--beta2", beta2, "second state exponent");
    envelope_cmd->add_option("--layer", layer, "delay interval index j");
    envelope_cmd->add_option("--h", env_h, "step size")->required();
    envelope_cmd->add_option("--delta", env_delta, "noise level");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) {
            dde::SolveRequest req;
            req.problem =
                dde::make_test_problem(dde::problem_id_from_string(problem_key), gamma, eta);
            req.grid = dde::build_grid(tau, n, steps);
            req.noise = dde::NoiseSpec{delta, dde::noise_mode_from_string(mode_key), seed};
            req.trial_index = trial;
            dde::validate(req.noise);
            const dde::LayeredTrajectory traj = dde::euler_solve(req);
            const std::string csv = dde::render_trajectory_csv(req, traj);
            if (solve_out == "-")
                std::cout << csv;
            else
                dde::write_text_file(solve_out, csv);
            return 0;
        }
        if (converge->parsed()) return run_converge(converge_opt);
        if (propagate->parsed()) return run_propagate(propagate_opt);
        if (envelope_cmd->parsed()) {
            double value = 0.0;
            if (kind == "grid") {
                value = dde::grid_error_envelope(env_gamma, layer, env_h, env_delta);
            } else {
                dde::EnvelopeSpec spec;
                spec.alpha = alpha;
                spec.beta1 = beta1;
                spec.beta2 = beta2;
                spec.gamma = env_gamma;
                spec.layer = layer;
                if (regime == "lipschitz")
                    spec.regime = dde::EnvelopeRegime::Lipschitz;
                else
                    spec.regime = (env_gamma == 1.0)
                                      ? dde::EnvelopeRegime::HolderGammaOne
                                      : dde::EnvelopeRegime::HolderGammaLtOne;
                value = dde::envelope(spec, env_h, env_delta);
            }
            std::cout << dde::format_real(value) << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
