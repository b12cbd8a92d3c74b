#pragma once

// Experiment configuration: defaults, the desk-scale profile, and the
// key=value config-file parser. Unknown keys and out-of-range values are
// rejected with messages naming the offending key.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dde/noise.hpp"
#include "dde/problems.hpp"

namespace dde {

struct ProblemSelection {
    ProblemId id = ProblemId::F1;
    double gamma = 1.0;
};

/// Full description of a sweep. Defaults are the reference protocol:
/// tau=20, n=9, N in {floor(100*1.3^i) : i=0..12}, delta list below,
/// 50 trials, refinement 50, uniform noise.
struct ExperimentConfig {
    std::vector<ProblemSelection> problems;
    std::vector<double> deltas;
    std::vector<int> step_counts;  // the N list
    double tau = 20.0;
    int n = 9;
    int trials = 50;
    int refinement = 50;
    std::uint64_t seed = 0;
    NoiseMode mode = NoiseMode::UniformRandom;
    std::string out_dir = "out";
};

[[nodiscard]] inline std::vector<int> geometric_step_counts(int count,
                                                            double base = 100.0,
                                                            double ratio = 1.3) {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        out.push_back(static_cast<int>(std::floor(base * std::pow(ratio, i))));
    return out;
}

[[nodiscard]] inline ExperimentConfig default_config() {
    ExperimentConfig cfg;
    for (ProblemId id : {ProblemId::F1, ProblemId::F2, ProblemId::F3, ProblemId::F4})
        for (double gamma : {0.225, 1.0})
            cfg.problems.push_back({id, gamma});
    cfg.deltas = {0.0, 0.01, 0.05, 0.1, 0.2, 0.5, 0.75, 1.0};
    cfg.step_counts = geometric_step_counts(13);
    return cfg;
}

/// Shrinks the sweep so the whole suite runs in minutes on a desktop:
/// nine N values, 10 trials, refinement 20. Everything else is untouched.
inline void apply_desk_profile(ExperimentConfig& cfg) {
    cfg.step_counts = geometric_step_counts(9);
    cfg.trials = 10;
    cfg.refinement = 20;
}

inline void validate(const ExperimentConfig& cfg) {
    if (cfg.problems.empty()) throw std::invalid_argument("config: problems is empty");
    if (cfg.deltas.empty()) throw std::invalid_argument("config: noise.delta is empty");
    if (cfg.step_counts.empty()) throw std::invalid_argument("config: N_list is empty");
    for (double d : cfg.deltas)
        if (!(d >= 0.0 && d <= 1.0))
            throw std::invalid_argument("config: noise.delta must lie in [0,1]");
    for (int steps : cfg.step_counts)
        if (steps < 1) throw std::invalid_argument("config: N_list entries must be >= 1");
    for (const auto& sel : cfg.problems)
        if (!(sel.gamma > 0.0 && sel.gamma <= 1.0))
            throw std::invalid_argument("config: problem gamma must lie in (0,1]");
    if (!(cfg.tau > 0.0) || !std::isfinite(cfg.tau))
        throw std::invalid_argument("config: tau must be finite and > 0");
    if (cfg.n < 0) throw std::invalid_argument("config: n must be >= 0");
    if (cfg.trials < 1) throw std::invalid_argument("config: trials must be >= 1");
    if (cfg.refinement < 1)
        throw std::invalid_argument("config: refinement must be >= 1");
}

namespace detail {

inline std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> items;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) items.push_back(item);
    }
    return items;
}

inline double parse_real(const std::string& value, const std::string& key) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("config key '" + key + "': cannot parse real '" +
                                    value + "'");
    }
    if (pos != value.size())
        throw std::invalid_argument("config key '" + key + "': trailing characters in '" +
                                    value + "'");
    return v;
}

inline long long parse_integer(const std::string& value, const std::string& key) {
    std::size_t pos = 0;
    long long v = 0;
    try {
        v = std::stoll(value, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("config key '" + key + "': cannot parse integer '" +
                                    value + "'");
    }
    if (pos != value.size())
        throw std::invalid_argument("config key '" + key + "': trailing characters in '" +
                                    value + "'");
    return v;
}

inline ProblemSelection parse_problem_token(const std::string& token) {
    const auto colon = token.find(':');
    ProblemSelection sel;
    if (colon == std::string::npos) {
        sel.id = problem_id_from_string(trim(token));
        sel.gamma = 1.0;
        return sel;
    }
    sel.id = problem_id_from_string(trim(token.substr(0, colon)));
    sel.gamma = parse_real(trim(token.substr(colon + 1)), "problems");
    return sel;
}

}  // namespace detail

/// Parses a key=value config file on top of `base`. Recognized keys:
///   problems      comma list of id[:gamma] tokens, e.g. f1:0.225,f4:1
///   noise.delta   comma list of levels in [0,1]        (alias: delta)
///   noise.mode    zero | uniform | worst               (alias: mode)
///   noise.seed    unsigned 64-bit master seed          (alias: seed)
///   N_list        comma list of steps per interval
///   tau, n        grid parameters
///   trials        noisy trajectories per cell
///   refinement    reference-grid refinement factor     (alias: R)
///   out           output directory
/// Lines starting with '#' and blank lines are ignored. An empty file keeps
/// all defaults.
inline ExperimentConfig parse_config(const std::string& path,
                                     ExperimentConfig base = default_config()) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");

    ExperimentConfig cfg = base;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = detail::trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": expected key = value");
        const std::string key = detail::trim(stripped.substr(0, eq));
        const std::string value = detail::trim(stripped.substr(eq + 1));

        if (key == "problems") {
            cfg.problems.clear();
            for (const auto& token : detail::split_list(value))
                cfg.problems.push_back(detail::parse_problem_token(token));
            for (const auto& sel : cfg.problems)
                if (!(sel.gamma > 0.0 && sel.gamma <= 1.0))
                    throw std::invalid_argument(
                        "config key 'problems': gamma must lie in (0,1]");
        } else if (key == "noise.delta" || key == "delta") {
            cfg.deltas.clear();
            for (const auto& token : detail::split_list(value)) {
                const double d = detail::parse_real(token, "noise.delta");
                if (!(d >= 0.0 && d <= 1.0))
                    throw std::invalid_argument(
                        "config key 'noise.delta': value " + token +
                        " outside the legal range [0,1]");
                cfg.deltas.push_back(d);
            }
        } else if (key == "noise.mode" || key == "mode") {
            cfg.mode = noise_mode_from_string(value);
        } else if (key == "noise.seed" || key == "seed") {
            try {
                cfg.seed = std::stoull(value);
            } catch (const std::exception&) {
                throw std::invalid_argument(
                    "config key 'noise.seed': cannot parse unsigned integer '" + value +
                    "'");
            }
        } else if (key == "N_list") {
            cfg.step_counts.clear();
            for (const auto& token : detail::split_list(value)) {
                const long long v = detail::parse_integer(token, "N_list");
                if (v < 1)
                    throw std::invalid_argument("config key 'N_list': values must be >= 1");
                cfg.step_counts.push_back(static_cast<int>(v));
            }
        } else if (key == "tau") {
            cfg.tau = detail::parse_real(value, "tau");
            if (!(cfg.tau > 0.0))
                throw std::invalid_argument("config key 'tau': must be > 0");
        } else if (key == "n") {
            const long long v = detail::parse_integer(value, "n");
            if (v < 0) throw std::invalid_argument("config key 'n': must be >= 0");
            cfg.n = static_cast<int>(v);
        } else if (key == "trials") {
            const long long v = detail::parse_integer(value, "trials");
            if (v < 1) throw std::invalid_argument("config key 'trials': must be >= 1");
            cfg.trials = static_cast<int>(v);
        } else if (key == "refinement" || key == "R") {
            const long long v = detail::parse_integer(value, "refinement");
            if (v < 1)
                throw std::invalid_argument("config key 'refinement': must be >= 1");
            cfg.refinement = static_cast<int>(v);
        } else if (key == "out") {
            cfg.out_dir = value;
        } else {
            throw std::invalid_argument("config: unknown key '" + key + "'");
        }
    }
    validate(cfg);
    return cfg;
}

}  // namespace dde
