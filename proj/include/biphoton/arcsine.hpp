#pragma once

// Arcsine statistics of a uniformly sampled fringe. With the normalized
// coincidence x = (1 + V cos phi)/2 and phi uniform, the CDF is
//   Psi(x) = asin((2/V)(x - 1/2))/pi + 1/2
// on the support [(1-V)/2, (1+V)/2] and the PDF is its derivative,
//   xi(x) = 2 / (pi sqrt(V^2 - (2x-1)^2)),
// which diverges (integrably) at the support edges.

#include <cmath>
#include <limits>

#include "biphoton/errors.hpp"
#include "biphoton/units.hpp"

namespace biphoton {

inline double arcsine_support_min(double visibility) { return 0.5 * (1.0 - visibility); }
inline double arcsine_support_max(double visibility) { return 0.5 * (1.0 + visibility); }

struct CdfValue {
    double probability = 0.0;
    bool clamped = false; // x fell outside the support (measurement noise)
};

inline CdfValue arcsine_cdf(double x, double visibility) {
    if (!(visibility > 0.0) || visibility > 1.0)
        throw DomainError("arcsine_cdf: visibility must lie in (0, 1]");
    CdfValue out;
    double u = (2.0 / visibility) * (x - 0.5);
    if (u < -1.0) {
        u = -1.0;
        out.clamped = true;
    } else if (u > 1.0) {
        u = 1.0;
        out.clamped = true;
    }
    out.probability = std::asin(u) / kPi + 0.5;
    return out;
}

enum class EdgePolicy { infinity_sentinel, throw_error };

// Density; +inf at the support edges (or a DomainError under the
// throwing policy) and 0 strictly outside.
inline double arcsine_pdf(double x, double visibility, EdgePolicy policy = EdgePolicy::infinity_sentinel) {
    if (!(visibility > 0.0) || visibility > 1.0)
        throw DomainError("arcsine_pdf: visibility must lie in (0, 1]");
    const double centered = 2.0 * x - 1.0;
    const double radicand = visibility * visibility - centered * centered;
    if (radicand <= 0.0) {
        const bool on_edge = radicand == 0.0 || std::abs(centered) <= visibility * (1.0 + 1e-15);
        if (policy == EdgePolicy::throw_error)
            throw DomainError("arcsine_pdf: x at or outside the support edge");
        return on_edge ? std::numeric_limits<double>::infinity() : 0.0;
    }
    return 2.0 / (kPi * std::sqrt(radicand));
}

// Count-space forms used when fitting histograms of raw coincidences.
// The scale S = C_max + C_min maps a count c to x = c / S.
inline CdfValue arcsine_count_cdf(double count, double scale, double visibility) {
    if (!(scale > 0.0)) throw DomainError("arcsine_count_cdf: scale must be positive");
    return arcsine_cdf(count / scale, visibility);
}

inline double arcsine_count_pdf(double count, double scale, double visibility,
                                EdgePolicy policy = EdgePolicy::infinity_sentinel) {
    if (!(scale > 0.0)) throw DomainError("arcsine_count_pdf: scale must be positive");
    return arcsine_pdf(count / scale, visibility, policy) / scale;
}

} // namespace biphoton
