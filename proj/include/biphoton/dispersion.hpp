#pragma once

// Sample under test: length plus Taylor coefficients beta^(n) of the
// propagation constant around the degeneracy frequency.

#include <cmath>
#include <vector>

#include "biphoton/errors.hpp"
#include "biphoton/units.hpp"

namespace biphoton {

struct DispersionProfile {
    double length = 0.0;             // m
    std::vector<double> betas;       // beta^(0) 1/m, beta^(1) s/m, beta^(2) s^2/m, ...

    DispersionProfile() = default;
    DispersionProfile(double length_m, std::vector<double> coefficients)
        : length(length_m), betas(std::move(coefficients)) {
        validate();
    }

    void validate() const {
        if (!(length > 0.0)) throw DomainError("DispersionProfile: length must be positive");
        if (betas.size() < 3) throw DomainError("DispersionProfile: coefficients through order 2 are required");
        for (double b : betas)
            if (!std::isfinite(b)) throw DomainError("DispersionProfile: coefficients must be finite");
    }

    // Missing higher orders read as zero.
    double beta(std::size_t order) const { return order < betas.size() ? betas[order] : 0.0; }
    std::size_t max_order() const { return betas.empty() ? 0 : betas.size() - 1; }
};

struct InterferometerConfig {
    double pump_wavelength = 780.23e-9;        // m
    double degeneracy_wavelength = 1560.46e-9; // m
    DispersionProfile sample;
    double static_phase_offset = 0.0;          // rad

    void validate() const {
        if (!(pump_wavelength > 0.0) || !(degeneracy_wavelength > 0.0))
            throw DomainError("InterferometerConfig: wavelengths must be positive");
        // Energy conservation at degeneracy: lambda0 = 2 lambda_pump.
        const double rel = std::abs(degeneracy_wavelength - 2.0 * pump_wavelength) / degeneracy_wavelength;
        if (rel > 1e-6)
            throw DomainError("InterferometerConfig: degeneracy wavelength must equal twice the pump wavelength");
        sample.validate();
    }
};

} // namespace biphoton
