#pragma once

// Inexact-information layer: perturbations of the right-hand side and of the
// history value, bounded by delta*(1+|y|)*(1+|z|) and delta respectively.
// Randomized perturbations draw from explicit, tuple-derived streams so a
// sweep produces identical results regardless of scheduling.

#include <cstdint>
#include <cstring>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <vector>

#include "dde/grid.hpp"
#include "dde/problems.hpp"

namespace dde {

enum class NoiseMode { Zero, UniformRandom, WorstCaseConst };

[[nodiscard]] inline std::string to_string(NoiseMode m) {
    switch (m) {
        case NoiseMode::Zero: return "zero";
        case NoiseMode::UniformRandom: return "uniform";
        case NoiseMode::WorstCaseConst: return "worst";
    }
    throw std::logic_error("to_string: bad NoiseMode");
}

[[nodiscard]] inline NoiseMode noise_mode_from_string(const std::string& key) {
    if (key == "zero") return NoiseMode::Zero;
    if (key == "uniform") return NoiseMode::UniformRandom;
    if (key == "worst") return NoiseMode::WorstCaseConst;
    throw std::invalid_argument("unknown noise mode '" + key +
                                "' (expected zero, uniform or worst)");
}

struct NoiseSpec {
    double delta = 0.0;
    NoiseMode mode = NoiseMode::Zero;
    std::uint64_t seed = 0;
};

inline void validate(const NoiseSpec& spec) {
    if (!(spec.delta >= 0.0 && spec.delta <= 1.0))
        throw std::invalid_argument("noise.delta must lie in [0, 1]");
}

/// Identifier of the generator family and derivation scheme, echoed into
/// every output file so runs can be matched to the constants below.
inline constexpr const char* kGeneratorId = "splitmix64/derive-v1";

/// 64-bit finalizer from the splitmix64 generator.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * UINT64_C(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)) * UINT64_C(0x94D049BB133111EB);
    return z ^ (z >> 31);
}

/// Splitmix64 stream with the state derived by hashing a tuple of words.
/// Same tuple, same sequence; the state advances by the fixed golden-ratio
/// increment 0x9E3779B97F4A7C15.
class RngStream {
public:
    explicit RngStream(std::uint64_t state) : state_(state) {}

    static RngStream derive(std::initializer_list<std::uint64_t> words) {
        std::uint64_t acc = UINT64_C(0x243F6A8885A308D3);  // pi fraction offset
        for (std::uint64_t w : words)
            acc = mix64(acc ^ (w + UINT64_C(0x9E3779B97F4A7C15)));
        return RngStream(acc);
    }

    std::uint64_t next_u64() {
        state_ += UINT64_C(0x9E3779B97F4A7C15);
        return mix64(state_);
    }

    /// Uniform in [0, 1) with 53 random bits.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in [-1, 1).
    double next_symmetric() { return 2.0 * next_unit() - 1.0; }

private:
    std::uint64_t state_;
};

[[nodiscard]] inline std::uint64_t double_bits(double x) {
    std::uint64_t b;
    std::memcpy(&b, &x, sizeof b);
    return b;
}

/// Stream for one trajectory of a sweep. delta_index and grid_index are the
/// positions of delta and N in the sweep lists (0 for standalone solves), so
/// every cell owns an independent stream no matter how work is scheduled.
[[nodiscard]] inline RngStream trajectory_stream(const NoiseSpec& spec,
                                                 const TestProblem& problem,
                                                 std::uint64_t delta_index,
                                                 std::uint64_t grid_index,
                                                 std::uint64_t trial_index) {
    return RngStream::derive({spec.seed, static_cast<std::uint64_t>(problem.id),
                              double_bits(problem.gamma), delta_index, grid_index,
                              trial_index});
}

/// Perturbed history value: always within delta of eta.
///   Zero            -> eta
///   UniformRandom   -> eta + delta * u,  u uniform on [-1,1]^d scaled by 1/sqrt(d)
///   WorstCaseConst  -> eta + delta * e1
[[nodiscard]] inline std::vector<double> perturb_initial(const NoiseSpec& spec,
                                                         RngStream& stream,
                                                         std::span<const double> eta) {
    validate(spec);
    std::vector<double> out(eta.begin(), eta.end());
    if (spec.mode == NoiseMode::Zero || spec.delta == 0.0) return out;
    if (spec.mode == NoiseMode::WorstCaseConst) {
        out[0] += spec.delta;
        return out;
    }
    const double scale =
        spec.delta / std::sqrt(static_cast<double>(eta.size()));
    for (double& v : out) v += scale * stream.next_symmetric();
    return out;
}

/// One perturbation sample for an Euler step. Callers draw exactly once per
/// step per trajectory. The result always satisfies
/// |out| <= delta*(1+|y|)*(1+|z|); the check is on unconditionally because
/// the norms are needed anyway.
inline void sample_step_noise(const NoiseSpec& spec, RngStream& stream, double t,
                              std::span<const double> y, std::span<const double> z,
                              std::span<double> out) {
    if (!std::isfinite(t) || !all_finite(y) || !all_finite(z))
        throw std::invalid_argument("sample_step_noise: non-finite input");
    if (spec.mode == NoiseMode::Zero || spec.delta == 0.0) {
        for (double& v : out) v = 0.0;
        return;
    }
    const double ny = l2_norm(y);
    const double nz = l2_norm(z);
    if (spec.mode == NoiseMode::WorstCaseConst) {
        for (double& v : out) v = 0.0;
        out[0] = spec.delta * (1.0 + ny) * (1.0 + nz);
        return;
    }
    // randomized variant: delta * U(-1,1) * (1 + |y| + |z|), which obeys the
    // product bound since 1 + |y| + |z| <= (1 + |y|)(1 + |z|)
    const double scale = spec.delta * (1.0 + ny + nz) /
                         std::sqrt(static_cast<double>(out.size()));
    for (double& v : out) v = scale * stream.next_symmetric();

    const double bound = spec.delta * (1.0 + ny) * (1.0 + nz);
    if (l2_norm(out) > bound * (1.0 + 1e-9))
        throw std::logic_error("sample_step_noise: admissibility bound violated");
}

/// f(t,y,z) plus one noise sample. Zero mode (or delta == 0) short-circuits
/// to the exact evaluation, byte for byte.
inline void perturbed_eval(const TestProblem& problem, const NoiseSpec& spec,
                           RngStream& stream, double t, std::span<const double> y,
                           std::span<const double> z, std::span<double> out,
                           std::span<double> scratch) {
    eval_rhs(problem, t, y, z, out);
    if (spec.mode == NoiseMode::Zero || spec.delta == 0.0) return;
    sample_step_noise(spec, stream, t, y, z, scratch);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += scratch[i];
}

[[nodiscard]] inline std::vector<double> perturbed_eval(const TestProblem& problem,
                                                        const NoiseSpec& spec,
                                                        RngStream& stream, double t,
                                                        std::span<const double> y,
                                                        std::span<const double> z) {
    std::vector<double> out(static_cast<std::size_t>(problem.dim));
    std::vector<double> scratch(static_cast<std::size_t>(problem.dim));
    perturbed_eval(problem, spec, stream, t, y, z, out, scratch);
    return out;
}

}  // namespace dde
