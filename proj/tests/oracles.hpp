#pragma once

// Test-only reference implementations, independent of the library code
// they are used to check.

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

namespace oracles {

// Fresnel integrals C(x) = int_0^x cos(pi t^2/2) dt and S(x) likewise
// with sin. Power series for small arguments, modified Lentz continued
// fraction for the complementary error function of a complex argument
// otherwise (Numerical Recipes scheme). Accurate to ~1e-15.
struct FresnelCS {
    double c = 0.0;
    double s = 0.0;
};

inline FresnelCS fresnel(double x) {
    constexpr double kPi = 3.14159265358979323846;
    constexpr double kFpMin = 1e-300;
    constexpr double kEps = 6.0e-17;
    const double ax = std::abs(x);

    FresnelCS out;
    if (ax < 1e-30) {
        out.s = 0.0;
        out.c = ax;
    } else if (ax <= 1.5) {
        // Series: C + iS = sum over odd powers.
        double sum = 0.0, sum_s = 0.0, sum_c = ax;
        double sign = 1.0;
        double fact = (kPi / 2.0) * ax * ax;
        bool odd = true;
        double term = ax;
        double test = 0.0;
        int n = 3;
        for (int k = 1; k <= 100; ++k) {
            term *= fact / k;
            sum += sign * term / n;
            test = std::abs(sum) * kEps;
            if (odd) {
                sign = -sign;
                sum_s = sum;
                sum = sum_c;
            } else {
                sum_c = sum;
                sum = sum_s;
            }
            if (term < test) break;
            odd = !odd;
            n += 2;
        }
        out.s = sum_s;
        out.c = sum_c;
    } else {
        // Continued fraction for the auxiliary complex function.
        const std::complex<double> one(1.0, 0.0);
        std::complex<double> b(1.0, -kPi * ax * ax);
        std::complex<double> cc(1.0 / kFpMin, 0.0);
        std::complex<double> d = one / b;
        std::complex<double> h = d;
        int n = -1;
        for (int k = 2; k <= 200; ++k) {
            n += 2;
            const double a = -n * (n + 1);
            b += std::complex<double>(4.0, 0.0);
            d = one / (a * d + b);
            cc = b + a / cc;
            const std::complex<double> del = cc * d;
            h *= del;
            if (std::abs(del.real() - 1.0) + std::abs(del.imag()) < kEps) break;
        }
        h *= std::complex<double>(ax, -ax);
        const std::complex<double> phase(std::cos(0.5 * kPi * ax * ax), std::sin(0.5 * kPi * ax * ax));
        const std::complex<double> cs =
            std::complex<double>(0.5, 0.5) * (one - phase * h);
        out.c = cs.real();
        out.s = cs.imag();
    }
    if (x < 0.0) {
        out.c = -out.c;
        out.s = -out.s;
    }
    return out;
}

// Fringe visibility of a rectangular spectrum in terms of the Fresnel
// argument u = W sqrt(2 beta2 L / pi): V(u) = sqrt(C(u)^2 + S(u)^2)/u.
inline double rectangular_visibility(double u) {
    if (u <= 0.0) return 1.0;
    const auto f = fresnel(u);
    return std::sqrt(f.c * f.c + f.s * f.s) / u;
}

// Trapezoid rule over tabulated points.
inline double trapezoid(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("trapezoid: bad input");
    double acc = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) acc += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
    return acc;
}

// Central-difference first and second derivatives.
template <typename F>
double derivative(const F& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

template <typename F>
double second_derivative(const F& f, double x, double h) {
    return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

// Kolmogorov-Smirnov distance between a sample and a CDF.
template <typename Cdf>
double ks_distance(std::vector<double> sample, const Cdf& cdf) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double dist = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        dist = std::max(dist, std::max(std::abs(f - lo), std::abs(hi - f)));
    }
    return dist;
}

} // namespace oracles
