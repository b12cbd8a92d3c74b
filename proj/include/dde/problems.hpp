#pragma once

// Right-hand sides f(t, y, z) for the delay equation z'(t) = f(t, z(t), z(t - tau)):
// the four scalar catalog problems plus a globally Lipschitz benchmark
// (z' = z(t - tau)) whose exact solution is available in closed form.

#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dde/grid.hpp"

namespace dde {

enum class ProblemId { F1, F2, F3, F4, LipBenchmark };

[[nodiscard]] inline std::string to_string(ProblemId id) {
    switch (id) {
        case ProblemId::F1: return "f1";
        case ProblemId::F2: return "f2";
        case ProblemId::F3: return "f3";
        case ProblemId::F4: return "f4";
        case ProblemId::LipBenchmark: return "lip";
    }
    throw std::logic_error("to_string: bad ProblemId");
}

[[nodiscard]] inline ProblemId problem_id_from_string(const std::string& key) {
    if (key == "f1") return ProblemId::F1;
    if (key == "f2") return ProblemId::F2;
    if (key == "f3") return ProblemId::F3;
    if (key == "f4") return ProblemId::F4;
    if (key == "lip") return ProblemId::LipBenchmark;
    throw std::invalid_argument("unknown problem id '" + key +
                                "' (expected one of f1, f2, f3, f4, lip)");
}

/// Smoothness exponents of f: alpha in t, beta1/beta2 in y, gamma in the
/// delayed argument. Stored as data so the bound shapes can consume them
/// without re-deriving anything from the formulas.
struct Regularity {
    double alpha = 1.0;
    double beta1 = 1.0;
    double beta2 = 1.0;
    double gamma = 1.0;
};

/// A catalog right-hand side with its parameters and history value.
/// Evaluation is pure; instances are immutable value objects.
struct TestProblem {
    ProblemId id = ProblemId::LipBenchmark;
    int dim = 1;
    double gamma = 1.0;  ///< Hoelder exponent of the delayed argument

    // named parameters; only the fields used by `id` matter
    double drift_a = 0.0, drift_b = 0.0, drift_c = 0.0, drift_d = 0.0;  // f1: A,B,C,D
    double rho1 = 0.0;                                                  // f1
    double power_beta = 0.0, damping_a = 0.0, delay_c = 0.0;            // f2/f3
    double lambda = 0.0;                                                // f4

    std::vector<double> eta;  ///< constant history value
    Regularity regularity;
};

inline double sgn(double x) { return (x > 0.0) ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

/// |x|^p with the convention 0^p = 0 for p > 0.
inline double abs_pow(double x, double p) { return std::pow(std::abs(x), p); }

/// Evaluates f(t, y, z). The catalog problems are scalar; the benchmark
/// (f = z) works in any dimension. Non-finite inputs are rejected.
inline void eval_rhs(const TestProblem& p, double t, std::span<const double> y,
                     std::span<const double> z, std::span<double> out) {
    if (!std::isfinite(t) || !all_finite(y) || !all_finite(z))
        throw std::invalid_argument("eval_rhs: non-finite input");
    if (static_cast<int>(y.size()) != p.dim || static_cast<int>(z.size()) != p.dim ||
        static_cast<int>(out.size()) != p.dim)
        throw std::invalid_argument("eval_rhs: dimension mismatch");

    if (p.id == ProblemId::LipBenchmark) {
        for (std::size_t i = 0; i < z.size(); ++i) out[i] = z[i];
        return;
    }
    if (p.dim != 1)
        throw std::invalid_argument("eval_rhs: catalog problems are scalar");

    const double yv = y[0];
    const double zv = z[0];
    switch (p.id) {
        case ProblemId::F1:
            out[0] = p.drift_a - p.drift_b * sgn(yv) * std::abs(yv) -
                     p.drift_c * sgn(yv) * abs_pow(yv, p.rho1) * abs_pow(zv, p.gamma) +
                     p.drift_d * yv * abs_pow(zv, p.gamma);
            return;
        case ProblemId::F2:
            out[0] = std::sin(t) + p.delay_c * abs_pow(zv, p.gamma) - p.damping_a * yv -
                     (1.0 + std::abs(zv)) * std::pow(std::max(yv, 0.0), p.power_beta);
            return;
        case ProblemId::F3:
            out[0] = std::sin(t) + p.delay_c * sgn(zv) * abs_pow(zv, p.gamma) -
                     p.damping_a * yv -
                     (1.0 + std::abs(zv)) * sgn(yv) * abs_pow(yv, p.power_beta);
            return;
        case ProblemId::F4:
            out[0] = 3.0 * sgn(zv) * abs_pow(zv, p.gamma) * std::sin(p.lambda * t);
            return;
        case ProblemId::LipBenchmark:
            break;  // handled above
    }
    throw std::logic_error("eval_rhs: bad ProblemId");
}

[[nodiscard]] inline std::vector<double> eval_rhs(const TestProblem& p, double t,
                                                  std::span<const double> y,
                                                  std::span<const double> z) {
    std::vector<double> out(static_cast<std::size_t>(p.dim));
    eval_rhs(p, t, y, z, out);
    return out;
}

/// Builds a catalog problem with its standard parameters. All catalog
/// problems share the history value 0.05854; the benchmark defaults to
/// eta = 1. Passing `eta_override` replaces the history value.
[[nodiscard]] inline TestProblem make_test_problem(
    ProblemId id, double gamma, std::optional<double> eta_override = std::nullopt) {
    if (!(gamma > 0.0 && gamma <= 1.0) || !std::isfinite(gamma))
        throw std::invalid_argument("make_test_problem: gamma must lie in (0, 1]");

    TestProblem p;
    p.id = id;
    p.dim = 1;
    p.gamma = gamma;
    const double catalog_eta = 0.05854;
    switch (id) {
        case ProblemId::F1:
            p.drift_a = 1.7137;
            p.drift_b = 0.7769;
            p.drift_c = 0.5895;
            p.drift_d = -0.82615;
            p.rho1 = 0.973;
            p.eta = {catalog_eta};
            p.regularity = {1.0, 0.973, 1.0, gamma};
            break;
        case ProblemId::F2:
        case ProblemId::F3:
            p.power_beta = 0.7;
            p.damping_a = 0.2;
            p.delay_c = 2.0;
            p.eta = {catalog_eta};
            p.regularity = {1.0, 0.7, 1.0, gamma};
            break;
        case ProblemId::F4:
            p.lambda = 1.0;
            p.eta = {catalog_eta};
            p.regularity = {1.0, 1.0, 1.0, gamma};
            break;
        case ProblemId::LipBenchmark:
            // f(t, y, z) = z; gamma plays no role, the problem is Lipschitz.
            p.gamma = 1.0;
            p.eta = {1.0};
            p.regularity = {1.0, 1.0, 1.0, 1.0};
            break;
    }
    if (eta_override) {
        if (!std::isfinite(*eta_override))
            throw std::invalid_argument("make_test_problem: eta must be finite");
        p.eta = {*eta_override};
    }
    return p;
}

/// Exact solution of the benchmark z'(t) = z(t - tau) with constant history
/// eta, assembled interval by interval:
///   z(t) = eta * sum_{i=0}^{j+1} (t - (i-1)*tau)^i / i!   for t in [j*tau, (j+1)*tau].
[[nodiscard]] inline double closed_form_lip(double t, double tau, double eta, int n) {
    if (!std::isfinite(t) || !std::isfinite(tau) || tau <= 0.0)
        throw std::invalid_argument("closed_form_lip: bad t or tau");
    if (n < 0) throw std::invalid_argument("closed_form_lip: n must be >= 0");
    if (t < 0.0 || t > (n + 1) * tau)
        throw std::domain_error("closed_form_lip: t outside [0, (n+1)*tau]");

    int j = static_cast<int>(std::floor(t / tau));
    if (j < 0) j = 0;
    if (j > n) j = n;
    while (j > 0 && t < j * tau) --j;
    while (j < n && t >= (j + 1) * tau) ++j;

    double sum = 0.0;
    double factorial = 1.0;
    for (int i = 0; i <= j + 1; ++i) {
        if (i > 0) factorial *= static_cast<double>(i);
        sum += std::pow(t - (i - 1) * tau, i) / factorial;
    }
    return eta * sum;
}

}  // namespace dde
