#pragma once

// Synthetic free-running coincidence traces. Each time bin draws a phase
// from the drift process, projects it onto the fringe
//   mu = R_max T (1 + V cos(phi + phi0)) / (1 + V) + R_acc T
// (so the fringe maximum yields R_max T mean counts) and samples a
// Poisson count. Generation is deterministic for a fixed detector seed.

#include <cstdint>
#include <optional>
#include <vector>

#include "biphoton/drift.hpp"
#include "biphoton/errors.hpp"
#include "biphoton/rng.hpp"

namespace biphoton {

struct TraceMetadata {
    double visibility = 0.0;
    double phi0 = 0.0;
    DriftProcess drift;
    DetectorModel detector;
    std::size_t n_bins = 0;
};

struct CoincidenceTrace {
    double bin_duration_s = 0.0;
    std::vector<long long> counts;
    std::optional<double> true_visibility; // present for synthetic traces
    TraceMetadata metadata;

    void validate() const {
        if (counts.empty()) throw DomainError("CoincidenceTrace: must contain at least one bin");
        if (!(bin_duration_s > 0.0)) throw DomainError("CoincidenceTrace: bin duration must be positive");
        for (long long c : counts)
            if (c < 0) throw DomainError("CoincidenceTrace: counts must be nonnegative");
    }
};

inline CoincidenceTrace simulate_trace(double visibility, double phi0, const DriftProcess& drift,
                                       const DetectorModel& detector, std::size_t n_bins) {
    if (!(visibility >= 0.0) || visibility > 1.0)
        throw DomainError("simulate_trace: visibility must lie in [0, 1]");
    if (n_bins < 1) throw DomainError("simulate_trace: need at least one bin");
    drift.validate();
    detector.validate();

    Rng rng(detector.seed);
    const double mean_max = detector.max_rate_hz * detector.bin_duration_s;
    const double background = detector.accidental_rate_hz * detector.bin_duration_s;

    CoincidenceTrace trace;
    trace.bin_duration_s = detector.bin_duration_s;
    trace.counts.reserve(n_bins);
    trace.true_visibility = visibility;
    trace.metadata = TraceMetadata{visibility, phi0, drift, detector, n_bins};

    double walk_phase = 0.0;
    for (std::size_t i = 0; i < n_bins; ++i) {
        double phi = 0.0;
        switch (drift.kind) {
            case DriftProcess::Kind::uniform_random_phase:
                phi = rng.uniform(0.0, kTwoPi);
                break;
            case DriftProcess::Kind::random_walk:
                walk_phase += drift.step_std_rad * rng.normal();
                phi = walk_phase;
                break;
            case DriftProcess::Kind::thermal_sines: {
                const double t = (static_cast<double>(i) + 0.5) * detector.bin_duration_s;
                double temperature = 0.0;
                for (const auto& c : drift.components)
                    temperature += c.amplitude_kelvin * std::sin(kTwoPi * c.frequency_hz * t + c.phase_rad);
                phi = drift.sensitivity_rad_per_kelvin * temperature;
                break;
            }
        }
        const double mu = mean_max * (1.0 + visibility * std::cos(phi + phi0)) / (1.0 + visibility) + background;
        trace.counts.push_back(rng.poisson(mu));
    }
    return trace;
}

} // namespace biphoton
