#pragma once

// Theoretical error-envelope shapes in the step size h and the noise level
// delta, and the discrete Gronwall bound. Envelopes are pure shapes: they
// carry no constant, comparisons with data go through
// fit_envelope_constant. Convention: 0^p = 0 for p > 0 (and 0^0 = 1), so the
// delta sums vanish at delta = 0.

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace dde {

enum class EnvelopeRegime { Lipschitz, HolderGammaOne, HolderGammaLtOne };

/// Shape selector for the solution-error envelopes. `layer` enters only in
/// the HolderGammaLtOne regime, where perturbations accumulate across delay
/// intervals through the exponent ladder gamma^l.
struct EnvelopeSpec {
    EnvelopeRegime regime = EnvelopeRegime::Lipschitz;
    double alpha = 1.0;
    double beta1 = 1.0;
    double beta2 = 1.0;
    double gamma = 1.0;
    int layer = 0;
};

namespace detail {

inline void check_exponent(double v, const char* name) {
    if (!(v > 0.0 && v <= 1.0))
        throw std::invalid_argument(std::string("envelope: ") + name +
                                    " must lie in (0, 1]");
}

inline void check_h_delta(double h, double delta) {
    if (!(h > 0.0)) throw std::invalid_argument("envelope: h must be > 0");
    if (!(delta >= 0.0 && delta <= 1.0))
        throw std::invalid_argument("envelope: delta must lie in [0, 1]");
}

}  // namespace detail

/// Envelope for the error of the perturbed scheme against the solution,
/// up to a multiplicative constant:
///   Lipschitz        ->  h + delta
///   HolderGammaOne   ->  h^{1/2} + h^alpha + h^beta1 + h^beta2 + delta
///   HolderGammaLtOne, layer 0
///                    ->  h^{min(alpha,gamma)} + h^beta1 + h^beta2 + h^{1/2} + delta^gamma
///   HolderGammaLtOne, layer j >= 1
///                    ->  sum_{l=1..j} (h^{g/2} + h^{g*min(alpha,gamma)} + h^{beta1*g} + h^{beta2*g})
///                      + sum_{l=0..j+2} delta^{g},   g = gamma^l
inline double envelope(const EnvelopeSpec& spec, double h, double delta) {
    detail::check_h_delta(h, delta);
    switch (spec.regime) {
        case EnvelopeRegime::Lipschitz:
            return h + delta;
        case EnvelopeRegime::HolderGammaOne: {
            detail::check_exponent(spec.alpha, "alpha");
            detail::check_exponent(spec.beta1, "beta1");
            detail::check_exponent(spec.beta2, "beta2");
            return std::sqrt(h) + std::pow(h, spec.alpha) + std::pow(h, spec.beta1) +
                   std::pow(h, spec.beta2) + delta;
        }
        case EnvelopeRegime::HolderGammaLtOne: {
            detail::check_exponent(spec.alpha, "alpha");
            detail::check_exponent(spec.beta1, "beta1");
            detail::check_exponent(spec.beta2, "beta2");
            if (!(spec.gamma > 0.0 && spec.gamma < 1.0))
                throw std::invalid_argument(
                    "envelope: HolderGammaLtOne needs gamma in (0, 1)");
            if (spec.layer < 0)
                throw std::invalid_argument("envelope: layer must be >= 0");

            const double ag = std::min(spec.alpha, spec.gamma);
            if (spec.layer == 0)
                return std::pow(h, ag) + std::pow(h, spec.beta1) +
                       std::pow(h, spec.beta2) + std::sqrt(h) +
                       std::pow(delta, spec.gamma);

            double sum = 0.0;
            double g = 1.0;  // gamma^l
            for (int l = 0; l <= spec.layer + 2; ++l) {
                if (l >= 1 && l <= spec.layer)
                    sum += std::pow(h, 0.5 * g) + std::pow(h, g * ag) +
                           std::pow(h, spec.beta1 * g) + std::pow(h, spec.beta2 * g);
                sum += std::pow(delta, g);
                g *= spec.gamma;
            }
            return sum;
        }
    }
    throw std::logic_error("envelope: bad regime");
}

/// Envelope for the node-wise error between the perturbed and exact-input
/// schemes, up to a constant. Its summation limits differ from the solution
/// envelope by design; each shape follows its own defining display.
///   gamma = 1            ->  h^{1/2} + delta
///   gamma < 1, layer 0   ->  h^{1/2} + delta^gamma
///   gamma < 1, layer j>=1 -> sum_{l=0..j} h^{gamma^l/2} + sum_{l=0..j+1} delta^{gamma^l}
inline double grid_error_envelope(double gamma, int layer, double h, double delta) {
    detail::check_h_delta(h, delta);
    detail::check_exponent(gamma, "gamma");
    if (layer < 0) throw std::invalid_argument("envelope: layer must be >= 0");

    if (gamma == 1.0) return std::sqrt(h) + delta;
    if (layer == 0) return std::sqrt(h) + std::pow(delta, gamma);

    double sum = 0.0;
    double g = 1.0;
    for (int l = 0; l <= layer + 1; ++l) {
        if (l <= layer) sum += std::pow(h, 0.5 * g);
        sum += std::pow(delta, g);
        g *= gamma;
    }
    return sum;
}

struct EnvelopeObservation {
    double h = 0.0;
    double delta = 0.0;
    double error = 0.0;
};

/// Smallest constant C such that C * envelope dominates every observation:
/// the maximum of error / envelope. Observations with a non-positive
/// envelope value are rejected.
inline double fit_envelope_constant(std::span<const EnvelopeObservation> observed,
                                    const EnvelopeSpec& spec) {
    if (observed.empty())
        throw std::invalid_argument("fit_envelope_constant: no observations");
    double c = 0.0;
    bool any = false;
    for (const auto& obs : observed) {
        const double env = envelope(spec, obs.h, obs.delta);
        if (!(env > 0.0)) continue;
        c = std::max(c, obs.error / env);
        any = true;
    }
    if (!any)
        throw std::invalid_argument(
            "fit_envelope_constant: no observation with positive envelope value");
    return c;
}

/// Bound for sequences with |xi_{k+1}| <= A |xi_k| + B:
///   |xi_n| <= A^n xi0 + B (A^n - 1)/(A - 1),   or xi0 + n B when A = 1.
inline double discrete_gronwall_bound(double coeff_a, double coeff_b, double xi0,
                                      int n) {
    if (coeff_a < 0.0 || coeff_b < 0.0 || xi0 < 0.0 || n < 0)
        throw std::invalid_argument("discrete_gronwall_bound: arguments must be >= 0");
    if (coeff_a == 1.0) return xi0 + static_cast<double>(n) * coeff_b;
    const double an = std::pow(coeff_a, n);
    return an * xi0 + coeff_b * (an - 1.0) / (coeff_a - 1.0);
}

}  // namespace dde
