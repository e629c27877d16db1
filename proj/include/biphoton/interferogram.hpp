#pragma once

// Numerical evaluation of the two-photon coincidence interferogram.
//
// The coincidence probability decomposes into a constant 1/2 level, a
// Franson-type oscillation whose visibility/phase come from the even part
// of the accumulated phase (only even dispersion orders contribute), and
// a HOM-like autocorrelation term driven by the odd part.

#include <cmath>
#include <vector>

#include "biphoton/dispersion.hpp"
#include "biphoton/errors.hpp"
#include "biphoton/quadrature.hpp"
#include "biphoton/spectrum.hpp"

namespace biphoton {

struct VisibilityPhase {
    double visibility = 1.0; // V_D in [0,1]
    double phase = 0.0;      // psi_D in (-pi, pi]
};

struct InterferogramDecomposition {
    double constant_term = 0.5;
    VisibilityPhase franson_term;
    double hom_term = 1.0; // autocorrelation of the spectral transform at 2 beta1 L
};

// Phase accumulated by the post-selected N00N state at a given detuning.
// Odd orders cancel by energy conservation; the even-order sum is
// 2 L beta0 + sum_k 2 L beta^(2k) dw^(2k) / (2k)!.
inline double noon_phase(const DispersionProfile& profile, double detuning) {
    profile.validate();
    double phase = 2.0 * profile.length * profile.beta(0);
    double power = 1.0;        // detuning^(2k)
    double factorial = 1.0;    // (2k)!
    const double d2 = detuning * detuning;
    for (std::size_t k = 1; 2 * k <= profile.max_order(); ++k) {
        power *= d2;
        factorial *= static_cast<double>(2 * k - 1) * static_cast<double>(2 * k);
        phase += 2.0 * profile.length * profile.beta(2 * k) * power / factorial;
    }
    return phase;
}

namespace detail {

inline void reduce_phase(double& psi) {
    psi = std::remainder(psi, kTwoPi);
    if (psi <= -kPi) psi += kTwoPi;
}

// 2 int_0^wmax rho(w) g(w) dw: the full-axis moment of an even
// integrand over the symmetric density.
template <typename G>
inline double even_moment(const SpectralDensity& spectrum, const G& g, std::span<const double> cuts,
                          const QuadratureOptions& opts) {
    const double wmax = spectrum.support_max();
    std::vector<double> breakpoints(cuts.begin(), cuts.end());
    for (double node : spectrum.grid())
        if (node > 0.0 && node < wmax) breakpoints.push_back(node);

    QuadratureOptions half = opts;
    half.abs_tol = 0.5 * opts.abs_tol;
    return 2.0 * integrate([&](double w) { return spectrum.density(w) * g(w); }, 0.0, wmax, half,
                           breakpoints)
                     .value;
}

// Cosine and sine moments of an even phase theta over the density.
template <typename Phase>
inline std::pair<double, double> cos_sin_moments(const SpectralDensity& spectrum, const Phase& theta,
                                                 std::span<const double> cuts,
                                                 const QuadratureOptions& opts) {
    const double c = even_moment(spectrum, [&](double w) { return std::cos(theta(w)); }, cuts, opts);
    const double s = even_moment(spectrum, [&](double w) { return std::sin(theta(w)); }, cuts, opts);
    return {c, s};
}

} // namespace detail

// Visibility and phase of the Franson oscillation for a pure
// second-order phase beta2 w^2 L (Eq. 3 evaluated by quadrature).
inline VisibilityPhase franson_visibility_phase(const SpectralDensity& spectrum, double beta2, double length,
                                                const QuadratureOptions& opts = {}) {
    if (!(length > 0.0)) throw DomainError("franson_visibility_phase: length must be positive");
    const double wmax = spectrum.support_max();
    const auto cuts = quadratic_phase_breakpoints(beta2, length, wmax);
    const auto [c, s] = detail::cos_sin_moments(
        spectrum, [&](double w) { return beta2 * w * w * length; }, cuts, opts);

    VisibilityPhase vp;
    vp.visibility = std::hypot(c, s);
    if (vp.visibility > 1.0 + 1e-9)
        throw NumericError("franson visibility exceeds 1 beyond quadrature tolerance", vp.visibility - 1.0);
    vp.visibility = std::min(vp.visibility, 1.0);
    vp.phase = std::atan2(s, c);
    detail::reduce_phase(vp.phase);
    return vp;
}

// As above but taking the even-order phase from a full dispersion
// profile. The default truncates after beta2 (the O(dw^4) truncation);
// include_higher_even_orders switches on beta4 and above.
inline VisibilityPhase franson_visibility_phase(const SpectralDensity& spectrum,
                                                const DispersionProfile& profile,
                                                bool include_higher_even_orders = false,
                                                const QuadratureOptions& opts = {}) {
    profile.validate();
    if (!include_higher_even_orders || profile.max_order() < 4)
        return franson_visibility_phase(spectrum, profile.beta(2), profile.length, opts);

    // Even phase beyond the constant carrier: sum_k 2 L beta^(2k) w^(2k)/(2k)!.
    auto theta = [&](double w) {
        double phase = 0.0;
        double power = 1.0;
        double factorial = 1.0;
        const double w2 = w * w;
        for (std::size_t k = 1; 2 * k <= profile.max_order(); ++k) {
            power *= w2;
            factorial *= static_cast<double>(2 * k - 1) * static_cast<double>(2 * k);
            phase += 2.0 * profile.length * profile.beta(2 * k) * power / factorial;
        }
        return phase;
    };

    const double wmax = spectrum.support_max();
    // Reuse the quadratic cut spacing with an effective rate that bounds
    // the full even phase on the support.
    double effective_rate = std::abs(profile.beta(2));
    double power = wmax * wmax;
    double factorial = 2.0;
    for (std::size_t k = 2; 2 * k <= profile.max_order(); ++k) {
        power *= wmax * wmax;
        factorial *= static_cast<double>(2 * k - 1) * static_cast<double>(2 * k);
        effective_rate += 2.0 * std::abs(profile.beta(2 * k)) * power / (factorial * wmax * wmax);
    }
    const auto cuts = quadratic_phase_breakpoints(effective_rate, profile.length, wmax);
    const auto [c, s] = detail::cos_sin_moments(spectrum, theta, cuts, opts);

    VisibilityPhase vp;
    vp.visibility = std::hypot(c, s);
    if (vp.visibility > 1.0 + 1e-9)
        throw NumericError("franson visibility exceeds 1 beyond quadrature tolerance", vp.visibility - 1.0);
    vp.visibility = std::min(vp.visibility, 1.0);
    vp.phase = std::atan2(s, c);
    detail::reduce_phase(vp.phase);
    return vp;
}

// Full decomposition: 1/2 level, Franson term, and the HOM
// autocorrelation term int rho(w) cos(phi_odd(w)) dw with
// phi_odd(w) = sum_{n odd} 2 L beta^(n) w^n / n!  (= 2 beta1 L w + beta3 L w^3/3 + ...).
inline InterferogramDecomposition coincidence_interferogram(const SpectralDensity& spectrum,
                                                            const DispersionProfile& profile,
                                                            bool include_higher_even_orders = false,
                                                            const QuadratureOptions& opts = {}) {
    profile.validate();
    InterferogramDecomposition out;
    out.constant_term = 0.5;
    out.franson_term = franson_visibility_phase(spectrum, profile, include_higher_even_orders, opts);

    std::vector<double> magnitudes;
    std::vector<int> orders;
    double factorial = 1.0;
    for (std::size_t n = 1; n <= profile.max_order(); ++n) {
        factorial *= static_cast<double>(n);
        if (n % 2 == 1 && profile.beta(n) != 0.0) {
            magnitudes.push_back(2.0 * profile.length * std::abs(profile.beta(n)) / factorial);
            orders.push_back(static_cast<int>(n));
        }
    }

    auto odd_phase = [&](double w) {
        double phase = 0.0;
        double f = 1.0;
        double power = 1.0;
        for (std::size_t n = 1; n <= profile.max_order(); ++n) {
            f *= static_cast<double>(n);
            power *= w;
            if (n % 2 == 1) phase += 2.0 * profile.length * profile.beta(n) * power / f;
        }
        return phase;
    };

    const double wmax = spectrum.support_max();
    const auto cuts = polynomial_phase_breakpoints(magnitudes, orders, wmax);
    // cos(phi_odd) is even in w because phi_odd is odd.
    out.hom_term =
        detail::even_moment(spectrum, [&](double w) { return std::cos(odd_phase(w)); }, cuts, opts);
    return out;
}

} // namespace biphoton
