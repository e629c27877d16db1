#pragma once

// Unit conventions and conversions.
//
// Everything inside the library is SI: lengths in m, times in s, angular
// frequencies in rad/s, beta2 in s^2/m. The engineering dispersion
// coefficient D in ps/(nm km) and filter widths in nm exist only at the
// CLI/config boundary and are converted here.

#include <cmath>

#include "biphoton/errors.hpp"

namespace biphoton {

inline constexpr double kSpeedOfLight = 299'792'458.0; // m/s
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// 1 ps/(nm km) = 1e-12 s / (1e-9 m * 1e3 m) = 1e-6 s/m^2.
inline constexpr double kDispersionSiPerPsNmKm = 1e-6;

inline double dispersion_si_from_ps_nm_km(double d) { return d * kDispersionSiPerPsNmKm; }
inline double dispersion_ps_nm_km_from_si(double d) { return d / kDispersionSiPerPsNmKm; }

// beta2: 1 s^2/m = 1e24 ps^2 / 1e-3 km = 1e27 ps^2/km.
inline double beta2_ps2_km_from_si(double b) { return b * 1e27; }

// FWHM of a Gaussian = 2 sqrt(2 ln 2) sigma.
inline double fwhm_to_stddev(double fwhm) { return fwhm / (2.0 * std::sqrt(2.0 * std::log(2.0))); }
inline double stddev_to_fwhm(double sigma) { return sigma * 2.0 * std::sqrt(2.0 * std::log(2.0)); }

// Spectral width conversion between wavelength and angular frequency,
// first-order linearization of omega(lambda) around the center wavelength:
// sigma_omega = 2 pi c sigma_lambda / lambda0^2.
inline double sigma_lambda_to_omega(double sigma_lambda, double center_wavelength) {
    if (!(sigma_lambda > 0.0) || !(center_wavelength > 0.0))
        throw DomainError("sigma_lambda_to_omega: inputs must be positive");
    return kTwoPi * kSpeedOfLight * sigma_lambda / (center_wavelength * center_wavelength);
}

inline double sigma_omega_to_lambda(double sigma_omega, double center_wavelength) {
    if (!(sigma_omega > 0.0) || !(center_wavelength > 0.0))
        throw DomainError("sigma_omega_to_lambda: inputs must be positive");
    return sigma_omega * center_wavelength * center_wavelength / (kTwoPi * kSpeedOfLight);
}

// Standard relation between the engineering CD coefficient and the
// group-velocity dispersion: D = -2 pi c beta2 / lambda^2. Inputs in SI
// (D in s/m^2); combine with dispersion_si_from_ps_nm_km at the boundary.
inline double dispersion_coeff_to_beta2(double d_si, double center_wavelength) {
    if (!(center_wavelength > 0.0))
        throw DomainError("dispersion_coeff_to_beta2: wavelength must be positive");
    return -d_si * center_wavelength * center_wavelength / (kTwoPi * kSpeedOfLight);
}

inline double beta2_to_dispersion_coeff(double beta2, double center_wavelength) {
    if (!(center_wavelength > 0.0))
        throw DomainError("beta2_to_dispersion_coeff: wavelength must be positive");
    return -kTwoPi * kSpeedOfLight * beta2 / (center_wavelength * center_wavelength);
}

} // namespace biphoton
