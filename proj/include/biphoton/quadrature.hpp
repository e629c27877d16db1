#pragma once

// Adaptive Gauss-Kronrod (G7,K15) quadrature with worst-interval-first
// refinement. Callers integrating oscillatory phases pass explicit
// breakpoints so that no starting interval spans more than about one
// oscillation; the adaptive loop then drives the absolute error below
// the requested tolerance.

#include <algorithm>
#include <cmath>
#include <queue>
#include <span>
#include <vector>

#include "biphoton/errors.hpp"
#include "biphoton/units.hpp"

namespace biphoton {

struct QuadratureOptions {
    double abs_tol = 1e-10;
    int max_subdivisions = 200000;
};

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int subdivisions = 0;
};

namespace detail {

// 15-point Kronrod abscissae on [-1,1] (positive half) and weights,
// with the embedded 7-point Gauss weights (QUADPACK values).
inline constexpr double kKronrodNodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

inline constexpr double kKronrodWeights[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

inline constexpr double kGaussWeights[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <typename F>
inline void gauss_kronrod_15(const F& f, double a, double b, double& value, double& error) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    double fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(center - half * kKronrodNodes[i]);
        fv[14 - i] = f(center + half * kKronrodNodes[i]);
    }
    fv[7] = f(center);

    double kronrod = 0.0;
    for (int i = 0; i < 7; ++i) kronrod += kKronrodWeights[i] * (fv[i] + fv[14 - i]);
    kronrod += kKronrodWeights[7] * fv[7];

    // Gauss points are the odd-index Kronrod points.
    double gauss = kGaussWeights[3] * fv[7];
    for (int i = 0; i < 3; ++i) gauss += kGaussWeights[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);

    value = kronrod * half;
    const double diff = std::abs(kronrod - gauss) * half;
    // QUADPACK-style sharpened estimate.
    error = diff;
    if (diff > 0.0) {
        const double scaled = std::pow(200.0 * diff, 1.5);
        if (scaled < diff) error = scaled;
    }
}

struct Interval {
    double a, b, value, error;
    bool operator<(const Interval& o) const {
        if (error != o.error) return error < o.error;
        return a > o.a; // deterministic tie break
    }
};

} // namespace detail

template <typename F>
QuadratureResult integrate(const F& f, double a, double b, const QuadratureOptions& opts = {},
                           std::span<const double> breakpoints = {}) {
    QuadratureResult res;
    if (a == b) return res;
    if (a > b) {
        res = integrate(f, b, a, opts, breakpoints);
        res.value = -res.value;
        return res;
    }

    std::vector<double> edges;
    edges.push_back(a);
    for (double x : breakpoints)
        if (x > a && x < b) edges.push_back(x);
    edges.push_back(b);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    std::priority_queue<detail::Interval> heap;
    double total_value = 0.0;
    double total_error = 0.0;
    int evaluations = 0;

    auto push_interval = [&](double lo, double hi) {
        detail::Interval iv{lo, hi, 0.0, 0.0};
        detail::gauss_kronrod_15(f, lo, hi, iv.value, iv.error);
        total_value += iv.value;
        total_error += iv.error;
        heap.push(iv);
        ++evaluations;
    };

    for (std::size_t i = 1; i < edges.size(); ++i) push_interval(edges[i - 1], edges[i]);

    while (total_error > opts.abs_tol && !heap.empty()) {
        if (evaluations >= opts.max_subdivisions)
            throw NumericError("quadrature did not reach requested tolerance", total_error);
        detail::Interval worst = heap.top();
        heap.pop();
        total_value -= worst.value;
        total_error -= worst.error;
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b)
            throw NumericError("quadrature interval collapsed below machine precision", total_error);
        push_interval(worst.a, mid);
        push_interval(mid, worst.b);
    }

    res.value = total_value;
    res.error_estimate = total_error;
    res.subdivisions = evaluations;
    return res;
}

// Breakpoints that cut [0, omega_max] so each piece spans at most ~pi of
// the quadratic phase |beta2| L w^2 (cuts at sqrt spacing).
inline std::vector<double> quadratic_phase_breakpoints(double beta2, double length, double omega_max,
                                                       int max_cuts = 2000) {
    std::vector<double> cuts;
    const double rate = std::abs(beta2) * length;
    if (rate <= 0.0 || omega_max <= 0.0) return cuts;
    const double total_phase = rate * omega_max * omega_max;
    int n = static_cast<int>(std::ceil(total_phase / kPi));
    n = std::clamp(n, 1, max_cuts);
    for (int j = 1; j < n; ++j)
        cuts.push_back(omega_max * std::sqrt(static_cast<double>(j) / n));
    return cuts;
}

// Uniform cuts sized from the total phase excursion of an odd polynomial
// phase sum_n c_n w^n over [0, omega_max].
inline std::vector<double> polynomial_phase_breakpoints(std::span<const double> magnitudes,
                                                        std::span<const int> orders, double omega_max,
                                                        int max_cuts = 50000) {
    double total_phase = 0.0;
    for (std::size_t i = 0; i < magnitudes.size(); ++i)
        total_phase += std::abs(magnitudes[i]) * std::pow(omega_max, orders[i]);
    std::vector<double> cuts;
    if (total_phase <= 0.0 || omega_max <= 0.0) return cuts;
    int n = static_cast<int>(std::ceil(total_phase / kPi));
    n = std::clamp(n, 1, max_cuts);
    for (int j = 1; j < n; ++j)
        cuts.push_back(omega_max * static_cast<double>(j) / n);
    return cuts;
}

} // namespace biphoton
