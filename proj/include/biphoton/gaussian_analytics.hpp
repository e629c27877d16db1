#pragma once

// Closed-form results for a Gaussian spectrum. With the adimensional
// parameter gamma = 2 sigma^2 beta2 L the fringe visibility is
// V = (gamma^2 + 1)^(-1/4); the curve's inflexion at gamma = sqrt(2/3)
// is the highest-sensitivity operating point and the inversion
// V -> |gamma| -> beta2 is what turns a visibility into a CD value.

#include <cmath>
#include <limits>

#include "biphoton/errors.hpp"
#include "biphoton/units.hpp"

namespace biphoton {

struct GammaParameter {
    double value = 0.0;        // 2 sigma^2 beta2 L
    double sigma_omega = 0.0;  // rad/s
    double beta2 = 0.0;        // s^2/m
    double length = 0.0;       // m

    static GammaParameter from_components(double sigma_omega, double beta2, double length) {
        if (!(sigma_omega > 0.0) || !(length > 0.0))
            throw DomainError("GammaParameter: sigma and length must be positive");
        GammaParameter g;
        g.sigma_omega = sigma_omega;
        g.beta2 = beta2;
        g.length = length;
        g.value = 2.0 * sigma_omega * sigma_omega * beta2 * length;
        return g;
    }
};

// V(gamma) = (gamma^2 + 1)^(-1/4); even in gamma, in (0, 1].
inline double visibility_closed_form(double gamma) {
    return std::pow(gamma * gamma + 1.0, -0.25);
}

// d^2V/dgamma^2 = (3 gamma^2 - 2) / (4 (gamma^2 + 1)^(9/4)).
inline double visibility_second_derivative(double gamma) {
    const double g2 = gamma * gamma;
    return (3.0 * g2 - 2.0) / (4.0 * std::pow(g2 + 1.0, 2.25));
}

// Operating point where the sensitivity |dV/dgamma| is maximal.
inline double inflexion_gamma() { return std::sqrt(2.0 / 3.0); }

struct InvertedVisibility {
    double gamma = 0.0;             // |gamma|, the sign is not recoverable from V
    double condition_number = 0.0;  // |dgamma/dV|, diverges as V -> 1
};

// |gamma| = sqrt(V^-4 - 1). Only the magnitude is estimable; V > 1
// signals an estimator artifact upstream and is rejected.
inline InvertedVisibility invert_visibility(double visibility) {
    if (!(visibility > 0.0) || visibility > 1.0)
        throw DomainError("invert_visibility: visibility must lie in (0, 1]");
    const double v4 = std::pow(visibility, -4.0);
    InvertedVisibility out;
    out.gamma = std::sqrt(std::max(v4 - 1.0, 0.0));
    if (out.gamma > 0.0)
        out.condition_number = 2.0 * std::pow(visibility, -5.0) / out.gamma;
    else
        out.condition_number = std::numeric_limits<double>::infinity();
    return out;
}

struct CdFromGamma {
    double beta2 = 0.0;        // s^2/m, magnitude
    double d_ps_nm_km = 0.0;   // ps/(nm km), magnitude
};

// beta2 = gamma / (2 sigma^2 L); the wavelength fixes the D conversion.
inline CdFromGamma cd_from_gamma(double gamma, double sigma_omega, double length, double wavelength) {
    if (!(sigma_omega > 0.0) || !(length > 0.0))
        throw DomainError("cd_from_gamma: sigma and length must be positive");
    CdFromGamma out;
    out.beta2 = gamma / (2.0 * sigma_omega * sigma_omega * length);
    out.d_ps_nm_km =
        std::abs(dispersion_ps_nm_km_from_si(beta2_to_dispersion_coeff(out.beta2, wavelength)));
    return out;
}

} // namespace biphoton
