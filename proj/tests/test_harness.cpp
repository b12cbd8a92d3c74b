#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dde/csv.hpp"
#include "dde/svg.hpp"

using namespace dde;

namespace {

std::filesystem::path temp_dir() {
    const auto dir = std::filesystem::temp_directory_path() / "dde_harness_tests";
    std::filesystem::create_directories(dir);
    return dir;
}

std::string write_config(const std::string& name, const std::string& content) {
    const auto path = temp_dir() / name;
    std::ofstream out(path);
    out << content;
    return path.string();
}

struct ParsedCsv {
    std::vector<std::string> metadata;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

ParsedCsv parse_csv(const std::string& text) {
    ParsedCsv parsed;
    std::stringstream ss(text);
    std::string line;
    bool have_header = false;
    while (std::getline(ss, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            parsed.metadata.push_back(line);
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ls(line);
        std::string field;
        while (std::getline(ls, field, ',')) fields.push_back(field);
        if (!have_header) {
            parsed.header = fields;
            have_header = true;
        } else {
            parsed.rows.push_back(fields);
        }
    }
    return parsed;
}

int column(const ParsedCsv& csv, const std::string& name) {
    for (int i = 0; i < static_cast<int>(csv.header.size()); ++i)
        if (csv.header[static_cast<std::size_t>(i)] == name) return i;
    FAIL("missing column " + name);
    return -1;
}

ExperimentConfig tiny_lip_config() {
    ExperimentConfig cfg = default_config();
    cfg.problems = {{ProblemId::LipBenchmark, 1.0}};
    cfg.deltas = {0.0};
    cfg.step_counts = {100, 200};
    cfg.tau = 1.0;
    cfg.n = 1;
    cfg.trials = 1;
    cfg.refinement = 20;
    cfg.seed = 7;
    return cfg;
}

}  // namespace

TEST_CASE("an empty config file keeps every default") {
    const ExperimentConfig cfg = parse_config(write_config("empty.cfg", ""));
    const ExperimentConfig def = default_config();
    CHECK(cfg.problems.size() == 8);
    CHECK(cfg.deltas == std::vector<double>{0.0, 0.01, 0.05, 0.1, 0.2, 0.5, 0.75, 1.0});
    CHECK(cfg.step_counts ==
          std::vector<int>{100, 130, 169, 219, 285, 371, 482, 627, 815, 1060, 1378,
                           1792, 2329});
    CHECK(cfg.tau == def.tau);
    CHECK(cfg.n == 9);
    CHECK(cfg.trials == 50);
    CHECK(cfg.refinement == 50);
    CHECK(cfg.mode == NoiseMode::UniformRandom);
}

TEST_CASE("desk profile shrinks the sweep") {
    ExperimentConfig cfg = default_config();
    apply_desk_profile(cfg);
    CHECK(cfg.step_counts ==
          std::vector<int>{100, 130, 169, 219, 285, 371, 482, 627, 815});
    CHECK(cfg.trials == 10);
    CHECK(cfg.refinement == 20);
}

TEST_CASE("config overrides and rejections") {
    const ExperimentConfig cfg = parse_config(write_config(
        "override.cfg",
        "# comment line\n"
        "trials = 2\n"
        "N_list = 100, 200\n"
        "problems = f4:0.225, lip\n"
        "noise.mode = worst\n"
        "noise.seed = 99\n"
        "tau = 2.5\n"
        "n = 3\n"
        "refinement = 5\n"
        "delta = 0, 0.5\n"));
    CHECK(cfg.trials == 2);
    CHECK(cfg.step_counts == std::vector<int>{100, 200});
    CHECK(cfg.problems.size() == 2);
    CHECK(cfg.problems[0].id == ProblemId::F4);
    CHECK(cfg.problems[0].gamma == 0.225);
    CHECK(cfg.problems[1].id == ProblemId::LipBenchmark);
    CHECK(cfg.mode == NoiseMode::WorstCaseConst);
    CHECK(cfg.seed == 99);
    CHECK(cfg.tau == 2.5);
    CHECK(cfg.n == 3);
    CHECK(cfg.refinement == 5);
    CHECK(cfg.deltas == std::vector<double>{0.0, 0.5});

    try {
        parse_config(write_config("bad_delta.cfg", "delta = 1.5\n"));
        FAIL("expected rejection");
    } catch (const std::invalid_argument& e) {
        const std::string msg = e.what();
        CHECK(msg.find("noise.delta") != std::string::npos);
        CHECK(msg.find("[0,1]") != std::string::npos);
    }

    try {
        parse_config(write_config("unknown.cfg", "stepsize = 3\n"));
        FAIL("expected rejection");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("stepsize") != std::string::npos);
    }

    CHECK_THROWS_AS(parse_config((temp_dir() / "missing.cfg").string()),
                    std::runtime_error);
    CHECK_THROWS_AS(parse_config(write_config("bad_n.cfg", "N_list = 0\n")),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_config(write_config("noeq.cfg", "trials 5\n")),
                    std::invalid_argument);
}

TEST_CASE("tiny benchmark sweep converges at first order") {
    const ConvergenceTable table = run_convergence(tiny_lip_config(), 2);
    REQUIRE(table.aggregates.size() == 2);
    CHECK(table.failed_trials == 0);
    const DerivedRow& der = table.derived_at(0, 0);
    CHECK(der.order_slope > 0.8);
    CHECK(der.order_slope < 1.2);
}

TEST_CASE("exact-information rows have zero spread across trials") {
    ExperimentConfig cfg = tiny_lip_config();
    cfg.trials = 3;
    const ConvergenceTable table = run_convergence(cfg, 0);
    for (const AggregateRow& agg : table.aggregates) {
        CHECK(agg.trials_ok == 3);
        CHECK(agg.global.stddev == 0.0);
    }
    // all three trials produced identical profiles
    for (int g = 0; g < 2; ++g)
        for (int t = 1; t < 3; ++t)
            CHECK(table.trial_at(0, 0, g, t).cumulative_sup ==
                  table.trial_at(0, 0, g, 0).cumulative_sup);
}

TEST_CASE("worker count does not change any emitted byte") {
    ExperimentConfig cfg = default_config();
    cfg.problems = {{ProblemId::F4, 0.225}, {ProblemId::F1, 1.0}};
    cfg.deltas = {0.0, 0.5};
    cfg.step_counts = {50, 100};
    cfg.tau = 5.0;
    cfg.n = 2;
    cfg.trials = 3;
    cfg.refinement = 4;
    cfg.seed = 2024;

    const ConvergenceTable serial = run_convergence(cfg, 1);
    const ConvergenceTable threaded = run_convergence(cfg, 4);
    CHECK(render_trials_csv(serial) == render_trials_csv(threaded));
    CHECK(render_summary_csv(serial) == render_summary_csv(threaded));
    CHECK(render_orders_csv(serial) == render_orders_csv(threaded));
    CHECK(render_propagation_csv(serial) == render_propagation_csv(threaded));
    CHECK(render_plot(serial, PlotKind::Convergence, 0) ==
          render_plot(threaded, PlotKind::Convergence, 0));
    CHECK(render_plot(serial, PlotKind::Cumulative, 1) ==
          render_plot(threaded, PlotKind::Cumulative, 1));
}

TEST_CASE("trials CSV schema is stable") {
    ExperimentConfig cfg = tiny_lip_config();
    cfg.deltas = {0.0, 0.1};
    cfg.trials = 2;
    const ConvergenceTable table = run_convergence(cfg, 0);
    const ParsedCsv csv = parse_csv(render_trials_csv(table));

    REQUIRE(!csv.header.empty());
    const std::string joined = [&] {
        std::string s;
        for (std::size_t i = 0; i < csv.header.size(); ++i)
            s += (i ? "," : "") + csv.header[i];
        return s;
    }();
    CHECK(joined ==
          "problem,gamma,delta,N,h,trial,mode,failed,err_global,e_loc_0,e_loc_1,"
          "e_cum_0,e_cum_1");
    CHECK(csv.rows.size() == 2 * 2 * 2);  // deltas x N x trials
    for (const auto& line : csv.metadata) CHECK(line[0] == '#');

    bool has_generator = false;
    for (const auto& line : csv.metadata)
        if (line.find("generator = splitmix64") != std::string::npos)
            has_generator = true;
    CHECK(has_generator);

    // emission is deterministic and empty tables are rejected
    CHECK(render_trials_csv(table) == render_trials_csv(table));
    ConvergenceTable empty;
    CHECK_THROWS_AS(render_trials_csv(empty), std::invalid_argument);
    CHECK_THROWS_AS(emit_csv(table, "/nonexistent_dir_zz/x.csv"), std::runtime_error);
}

TEST_CASE("aggregates are recomputable from the per-trial rows") {
    ExperimentConfig cfg = tiny_lip_config();
    cfg.deltas = {0.5};
    cfg.mode = NoiseMode::UniformRandom;
    cfg.trials = 5;
    const ConvergenceTable table = run_convergence(cfg, 0);

    const ParsedCsv trials = parse_csv(render_trials_csv(table));
    const ParsedCsv summary = parse_csv(render_summary_csv(table));
    const int n_col = column(trials, "N");
    const int err_col = column(trials, "err_global");
    const int sn_col = column(summary, "N");
    const int mean_col = column(summary, "err_mean");

    for (const auto& srow : summary.rows) {
        double sum = 0.0;
        int count = 0;
        for (const auto& trow : trials.rows) {
            if (trow[static_cast<std::size_t>(n_col)] !=
                srow[static_cast<std::size_t>(sn_col)])
                continue;
            sum += std::stod(trow[static_cast<std::size_t>(err_col)]);
            ++count;
        }
        REQUIRE(count == 5);
        CHECK(format_real(sum / count) == srow[static_cast<std::size_t>(mean_col)]);
    }
}

TEST_CASE("propagation view is nondecreasing and matches the local suprema") {
    ExperimentConfig cfg = default_config();
    cfg.problems = {{ProblemId::F2, 0.225}};
    cfg.deltas = {0.0, 0.5};
    cfg.step_counts = {60, 120};
    cfg.tau = 4.0;
    cfg.n = 4;
    cfg.trials = 2;
    cfg.refinement = 5;
    cfg.seed = 11;
    const ConvergenceTable table = run_error_propagation(cfg, 0);

    const ParsedCsv prop = parse_csv(render_propagation_csv(table));
    const int first_cum = column(prop, "e_cum_0");
    REQUIRE(prop.header.size() == static_cast<std::size_t>(first_cum) + 5);
    for (const auto& row : prop.rows)
        for (int j = 1; j <= 4; ++j)
            CHECK(std::stod(row[static_cast<std::size_t>(first_cum + j)]) >=
                  std::stod(row[static_cast<std::size_t>(first_cum + j - 1)]));

    // per-trial rows: cumulative columns are exactly the running maxima of the
    // local columns, reconstructed from the emitted bytes
    const ParsedCsv trials = parse_csv(render_trials_csv(table));
    const int loc0 = column(trials, "e_loc_0");
    const int cum0 = column(trials, "e_cum_0");
    for (const auto& row : trials.rows) {
        double running = 0.0;
        for (int j = 0; j <= 4; ++j) {
            running = std::max(running, std::stod(row[static_cast<std::size_t>(loc0 + j)]));
            CHECK(std::stod(row[static_cast<std::size_t>(cum0 + j)]) == running);
        }
    }

    // the propagation run is the same computation as the convergence run
    const ConvergenceTable conv = run_convergence(cfg, 0);
    CHECK(render_propagation_csv(conv) == render_propagation_csv(table));

    // raising delta raises the mean whole-horizon error, up to one sample std
    for (int g = 0; g < 2; ++g) {
        const AggregateRow& quiet = table.aggregate_at(0, 0, g);
        const AggregateRow& loud = table.aggregate_at(0, 1, g);
        CHECK(loud.global.mean >= quiet.global.mean - loud.global.stddev);
    }
}

TEST_CASE("diverged trajectories become failed rows, not poisoned statistics") {
    // worst-case perturbations at this horizon overflow: every trial fails
    ExperimentConfig cfg = default_config();
    cfg.problems = {{ProblemId::F4, 0.225}};
    cfg.deltas = {1.0};
    cfg.step_counts = {100};
    cfg.mode = NoiseMode::WorstCaseConst;
    cfg.trials = 2;
    cfg.refinement = 2;
    const ConvergenceTable table = run_convergence(cfg, 0);
    CHECK(table.failed_trials == 2);
    for (const TrialRow& row : table.trials) {
        CHECK(row.failed);
        CHECK(row.failure.find("non-finite") != std::string::npos);
    }
    const AggregateRow& agg = table.aggregate_at(0, 0, 0);
    CHECK(agg.trials_ok == 0);
    CHECK(agg.trials_failed == 2);

    // emitters stay usable: failed rows carry nan error fields, the failure
    // count lands in the metadata, empty series drop from plots
    const std::string csv = render_trials_csv(table);
    CHECK(csv.find(",1,nan") != std::string::npos);
    CHECK(csv.find("# failed_trials = 2") != std::string::npos);
    const std::string svg = render_plot(table, PlotKind::Convergence, 0);
    CHECK(svg.find("dropped series") != std::string::npos);
}

TEST_CASE("plots are self-contained deterministic SVG") {
    ExperimentConfig cfg = tiny_lip_config();
    cfg.deltas = {0.0, 0.2};
    cfg.trials = 2;
    const ConvergenceTable table = run_convergence(cfg, 0);

    const std::string svg = render_plot(table, PlotKind::Convergence, 0);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("<polyline") != std::string::npos);
    CHECK(svg.find("delta=0.2") != std::string::npos);
    CHECK(svg == render_plot(table, PlotKind::Convergence, 0));

    const std::string cum = render_plot(table, PlotKind::Cumulative, 0);
    CHECK(cum.find("cumulative") != std::string::npos);
}

TEST_CASE("all-zero error series are dropped from log plots with a note") {
    ExperimentConfig cfg = tiny_lip_config();
    cfg.refinement = 1;  // reference equals the solve itself: errors exactly 0
    const ConvergenceTable table = run_convergence(cfg, 0);
    CHECK(table.aggregate_at(0, 0, 0).global.mean == 0.0);
    const std::string svg = render_plot(table, PlotKind::Convergence, 0);
    CHECK(svg.find("dropped series: delta=0") != std::string::npos);
}
