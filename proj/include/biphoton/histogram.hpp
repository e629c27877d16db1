#pragma once

// Histogram construction (Freedman-Diaconis width with a floor on the
// bin count) and a Gaussian profile fit used to aggregate CD samples.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "biphoton/errors.hpp"
#include "biphoton/levmar.hpp"

namespace biphoton {

struct HistogramBin {
    double left = 0.0;
    double right = 0.0;
    double count = 0.0;
};

struct Histogram {
    std::vector<HistogramBin> bins;
    std::size_t n_samples = 0;

    std::size_t populated() const {
        std::size_t n = 0;
        for (const auto& b : bins)
            if (b.count > 0.0) ++n;
        return n;
    }
};

// Linear-interpolation quantile of a sorted sample.
inline double quantile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw DomainError("quantile: empty sample");
    if (p <= 0.0) return sorted.front();
    if (p >= 1.0) return sorted.back();
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

inline Histogram build_histogram(std::span<const double> values, int min_bins = 20, int max_bins = 2000) {
    if (values.empty()) throw InsufficientDataError("histogram: no samples");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());

    const double lo = sorted.front();
    const double hi = sorted.back();
    const double range = hi - lo;

    Histogram hist;
    hist.n_samples = values.size();
    if (range <= 0.0) {
        hist.bins.push_back({lo - 0.5, lo + 0.5, static_cast<double>(values.size())});
        return hist;
    }

    const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
    const double fd_width = 2.0 * iqr / std::cbrt(static_cast<double>(values.size()));
    int n_bins = min_bins;
    if (fd_width > 0.0)
        n_bins = std::max(min_bins, static_cast<int>(std::ceil(range / fd_width)));
    n_bins = std::min(n_bins, max_bins);

    const double width = range / n_bins;
    hist.bins.resize(static_cast<std::size_t>(n_bins));
    for (int i = 0; i < n_bins; ++i) {
        hist.bins[static_cast<std::size_t>(i)].left = lo + i * width;
        hist.bins[static_cast<std::size_t>(i)].right = lo + (i + 1) * width;
    }
    for (double v : sorted) {
        int idx = static_cast<int>((v - lo) / width);
        idx = std::clamp(idx, 0, n_bins - 1);
        hist.bins[static_cast<std::size_t>(idx)].count += 1.0;
    }
    return hist;
}

struct GaussianFit {
    double amplitude = 0.0;
    double mean = 0.0;
    double sigma = 0.0;
    bool converged = false;
};

// Fit a e^{-(x-mu)^2 / (2 s^2)} to the bin contents.
inline GaussianFit fit_gaussian(const Histogram& hist) {
    if (hist.populated() < 3) throw InsufficientDataError("gaussian fit: fewer than 3 populated bins");

    double total = 0.0, mean = 0.0;
    for (const auto& b : hist.bins) {
        const double c = 0.5 * (b.left + b.right);
        total += b.count;
        mean += b.count * c;
    }
    mean /= total;
    double var = 0.0;
    double peak = 0.0;
    for (const auto& b : hist.bins) {
        const double c = 0.5 * (b.left + b.right);
        var += b.count * (c - mean) * (c - mean);
        peak = std::max(peak, b.count);
    }
    var /= total;
    const double sigma0 = std::sqrt(std::max(var, 1e-300));

    auto residuals = [&](const std::vector<double>& p, std::vector<double>& r) {
        r.resize(hist.bins.size());
        for (std::size_t i = 0; i < hist.bins.size(); ++i) {
            const auto& b = hist.bins[i];
            const double c = 0.5 * (b.left + b.right);
            const double z = (c - p[1]) / p[2];
            const double model = p[0] * std::exp(-0.5 * z * z);
            const double w = 1.0 / std::sqrt(std::max(b.count, 1.0));
            r[i] = w * (b.count - model);
        }
    };

    CurveFitOptions opts;
    opts.lower = {0.0, -std::numeric_limits<double>::infinity(), sigma0 * 1e-6};
    auto fit = fit_least_squares(residuals, {peak, mean, sigma0}, opts);

    GaussianFit out;
    out.amplitude = fit.params[0];
    out.mean = fit.params[1];
    out.sigma = std::abs(fit.params[2]);
    out.converged = fit.converged;
    return out;
}

} // namespace biphoton
