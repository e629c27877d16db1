#pragma once

// Free-running phase drift models and the detector description used to
// turn a fringe into Poissonian coincidence counts.
//
// The thermal numbers: fused silica has dn/dT = 4.8e-6 * n per kelvin,
// so an unbalance L swept twice (double pass) moves one fringe per
// dT_fringe = lambda / (pass_factor * L * dn/dT). The pass factor is an
// explicit parameter because the double-pass vs two-photon bookkeeping
// conventions differ by factors of two between sources.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "biphoton/errors.hpp"
#include "biphoton/units.hpp"

namespace biphoton {

inline constexpr double kSilicaDnDtRelative = 4.8e-6;  // (dn/dT)/n per K
inline constexpr double kSilicaGroupIndex = 1.468;

struct ThermalComponent {
    double amplitude_kelvin = 0.0;
    double frequency_hz = 0.0;
    double phase_rad = 0.0;
};

struct DriftProcess {
    enum class Kind { uniform_random_phase, random_walk, thermal_sines };

    Kind kind = Kind::uniform_random_phase;
    double step_std_rad = 0.0;                     // random walk, rad per sqrt(bin)
    std::vector<ThermalComponent> components;      // thermal sines
    double sensitivity_rad_per_kelvin = 0.0;       // thermal sines

    static DriftProcess uniform_random_phase() { return DriftProcess{}; }

    static DriftProcess random_walk(double step_std) {
        DriftProcess d;
        d.kind = Kind::random_walk;
        d.step_std_rad = step_std;
        d.validate();
        return d;
    }

    static DriftProcess thermal_sines(std::vector<ThermalComponent> components,
                                      double sensitivity_rad_per_kelvin) {
        DriftProcess d;
        d.kind = Kind::thermal_sines;
        d.components = std::move(components);
        d.sensitivity_rad_per_kelvin = sensitivity_rad_per_kelvin;
        d.validate();
        return d;
    }

    void validate() const {
        switch (kind) {
            case Kind::uniform_random_phase:
                break;
            case Kind::random_walk:
                if (!(step_std_rad >= 0.0)) throw DomainError("DriftProcess: step std must be >= 0");
                break;
            case Kind::thermal_sines:
                if (!(sensitivity_rad_per_kelvin > 0.0))
                    throw DomainError("DriftProcess: thermal sensitivity must be positive");
                for (const auto& c : components)
                    if (!(c.frequency_hz > 0.0))
                        throw DomainError("DriftProcess: thermal frequencies must be positive");
                break;
        }
    }
};

struct DetectorModel {
    double bin_duration_s = 0.1;
    double max_rate_hz = 1e4;        // coincidence rate at the fringe maximum
    double accidental_rate_hz = 0.0; // uniform Poisson background
    std::uint64_t seed = 1;

    void validate() const {
        if (!(bin_duration_s > 0.0)) throw DomainError("DetectorModel: bin duration must be positive");
        if (!(max_rate_hz >= 0.0) || !(accidental_rate_hz >= 0.0))
            throw DomainError("DetectorModel: rates must be >= 0");
    }
};

// Interferometer phase response to a temperature change of the fiber
// unbalance, rad/K.
inline double phase_per_kelvin(double length, double wavelength, double pass_factor = 2.0,
                               double group_index = kSilicaGroupIndex) {
    if (!(length > 0.0) || !(wavelength > 0.0) || !(pass_factor > 0.0) || !(group_index > 0.0))
        throw DomainError("phase_per_kelvin: inputs must be positive");
    const double dn_per_kelvin = kSilicaDnDtRelative * group_index;
    return kTwoPi * pass_factor * length * dn_per_kelvin / wavelength;
}

// Temperature swing that moves the fringe by one period.
inline double fringe_temperature_period(double length, double wavelength, double pass_factor = 2.0,
                                        double group_index = kSilicaGroupIndex) {
    return kTwoPi / phase_per_kelvin(length, wavelength, pass_factor, group_index);
}

struct BandwidthCheck {
    bool warn = false;
    double rad_per_bin = 0.0;   // max |dphi/dt| * bin duration
    double threshold = kPi / 10.0;
};

// Advisory check that the phase moves slowly compared to one bin. The
// uniform-random-phase process models a phase constant within each bin,
// so it always passes.
inline BandwidthCheck drift_bandwidth_check(const DriftProcess& drift, const DetectorModel& detector,
                                            double threshold = kPi / 10.0) {
    drift.validate();
    detector.validate();
    BandwidthCheck check;
    check.threshold = threshold;
    switch (drift.kind) {
        case DriftProcess::Kind::uniform_random_phase:
            check.rad_per_bin = 0.0;
            break;
        case DriftProcess::Kind::random_walk:
            check.rad_per_bin = drift.step_std_rad; // one step per bin
            break;
        case DriftProcess::Kind::thermal_sines: {
            double max_rate = 0.0; // rad/s
            for (const auto& c : drift.components)
                max_rate += drift.sensitivity_rad_per_kelvin * c.amplitude_kelvin * kTwoPi * c.frequency_hz;
            check.rad_per_bin = max_rate * detector.bin_duration_s;
            break;
        }
    }
    check.warn = check.rad_per_bin > threshold;
    return check;
}

} // namespace biphoton
