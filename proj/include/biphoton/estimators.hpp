#pragma once

// Fringe-visibility estimators for free-running coincidence traces.
//
//  - min/max:    Eq.-7 style extremes from quantile means, bootstrap errors.
//                Known to bias upward under Poisson noise.
//  - fringe fit: cosine fit over a window containing the first oscillations.
//  - pdf fit:    the free-running method. Histogram the counts, fit the
//                count-space arcsine law (scale S = C_max + C_min and V)
//                using only the low-count half of the histogram, where the
//                absolute Poisson error is smallest.

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "biphoton/arcsine.hpp"
#include "biphoton/errors.hpp"
#include "biphoton/histogram.hpp"
#include "biphoton/levmar.hpp"
#include "biphoton/quadrature.hpp"
#include "biphoton/rng.hpp"
#include "biphoton/trace.hpp"

namespace biphoton {

enum class EstimatorMethod { min_max, fringe_fit, pdf_fit };

inline const char* to_string(EstimatorMethod m) {
    switch (m) {
        case EstimatorMethod::min_max: return "min-max";
        case EstimatorMethod::fringe_fit: return "fringe-fit";
        case EstimatorMethod::pdf_fit: return "pdf-fit";
    }
    return "?";
}

struct FitDiagnostics {
    std::size_t n_bins_used = 0;        // trace bins consumed
    double residual_norm = 0.0;         // sqrt(chi2) of the final fit
    double scale_estimate = 0.0;        // C_max + C_min
    double pre_clamp_visibility = 0.0;  // estimate before clamping to [0,1]
    std::vector<std::string> warnings;
};

struct VisibilityEstimate {
    double visibility = 0.0;
    double std_error = 0.0;
    EstimatorMethod method = EstimatorMethod::pdf_fit;
    FitDiagnostics diagnostics;
};

namespace detail {

inline double clamp_visibility(double v, FitDiagnostics& diag) {
    diag.pre_clamp_visibility = v;
    if (v < 0.0) {
        diag.warnings.push_back("visibility clamped from below 0");
        return 0.0;
    }
    if (v > 1.0) {
        diag.warnings.push_back("visibility clamped from above 1");
        return 1.0;
    }
    return v;
}

// Means of the bottom / top q-quantile bins.
inline std::pair<double, double> quantile_extremes(const std::vector<long long>& counts, double q) {
    std::vector<long long> sorted = counts;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t k =
        std::max<std::size_t>(1, static_cast<std::size_t>(q * static_cast<double>(sorted.size())));
    double cmin = 0.0, cmax = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        cmin += static_cast<double>(sorted[i]);
        cmax += static_cast<double>(sorted[sorted.size() - 1 - i]);
    }
    return {cmin / static_cast<double>(k), cmax / static_cast<double>(k)};
}

} // namespace detail

struct MinMaxOptions {
    double quantile = 0.02;
    int bootstrap_resamples = 200;
    std::uint64_t bootstrap_seed = 0x5eedull;
};

inline VisibilityEstimate estimate_minmax(const CoincidenceTrace& trace, const MinMaxOptions& opts = {}) {
    trace.validate();
    if (trace.counts.size() < 10)
        throw InsufficientDataError("estimate_minmax: need at least 10 bins");

    auto estimate_from = [&](const std::vector<long long>& counts) {
        const auto [cmin, cmax] = detail::quantile_extremes(counts, opts.quantile);
        const double denom = cmax + cmin;
        if (denom <= 0.0) throw DegenerateTraceError("estimate_minmax: C_max + C_min is zero");
        return std::pair<double, double>{(cmax - cmin) / denom, denom};
    };

    const auto [v_raw, scale] = estimate_from(trace.counts);

    // Bootstrap standard error over seeded resamples.
    Rng rng(opts.bootstrap_seed);
    std::vector<long long> resample(trace.counts.size());
    double sum = 0.0, sum2 = 0.0;
    int used = 0;
    for (int b = 0; b < opts.bootstrap_resamples; ++b) {
        for (auto& c : resample)
            c = trace.counts[static_cast<std::size_t>(rng.uniform() * static_cast<double>(trace.counts.size()))];
        try {
            const double vb = estimate_from(resample).first;
            sum += vb;
            sum2 += vb * vb;
            ++used;
        } catch (const DegenerateTraceError&) {
            continue;
        }
    }

    VisibilityEstimate est;
    est.method = EstimatorMethod::min_max;
    est.diagnostics.n_bins_used = trace.counts.size();
    est.diagnostics.scale_estimate = scale;
    est.visibility = detail::clamp_visibility(v_raw, est.diagnostics);
    if (used > 1) {
        const double mean = sum / used;
        est.std_error = std::sqrt(std::max(sum2 / used - mean * mean, 0.0));
    }
    return est;
}

struct BinRange {
    std::size_t begin = 0;
    std::size_t end = 0; // exclusive
};

struct FringeFitOptions {
    int max_scan_harmonics = 200;
};

// Least-squares fit of A (1 + V cos(w t + phi0)) over the window. The
// initial frequency comes from a discrete scan of integer-cycle
// frequencies; the window must contain at least one full oscillation.
inline VisibilityEstimate estimate_fringefit(const CoincidenceTrace& trace, BinRange window,
                                             const FringeFitOptions& opts = {}) {
    trace.validate();
    if (window.end > trace.counts.size() || window.begin >= window.end)
        throw DomainError("estimate_fringefit: window out of range");
    const std::size_t n = window.end - window.begin;
    if (n < 8) throw InsufficientDataError("estimate_fringefit: window too short");

    std::vector<double> t(n), y(n);
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        t[i] = static_cast<double>(i) * trace.bin_duration_s;
        y[i] = static_cast<double>(trace.counts[window.begin + i]);
        mean += y[i];
    }
    mean /= static_cast<double>(n);
    const double t_span = static_cast<double>(n) * trace.bin_duration_s;

    // Frequency scan at integer cycles per window.
    const int max_m = std::min<int>(opts.max_scan_harmonics, static_cast<int>(n / 2));
    double best_power = -1.0;
    double omega0 = kTwoPi / t_span;
    double phi0_init = 0.0;
    for (int m = 1; m <= max_m; ++m) {
        const double w = kTwoPi * static_cast<double>(m) / t_span;
        double cs = 0.0, sn = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            cs += (y[i] - mean) * std::cos(w * t[i]);
            sn += (y[i] - mean) * std::sin(w * t[i]);
        }
        const double power = cs * cs + sn * sn;
        if (power > best_power) {
            best_power = power;
            omega0 = w;
            phi0_init = std::atan2(-sn, cs);
        }
    }

    double ymin = y[0], ymax = y[0];
    for (double v : y) {
        ymin = std::min(ymin, v);
        ymax = std::max(ymax, v);
    }
    const double v_init = std::clamp(ymax + ymin > 0.0 ? (ymax - ymin) / (ymax + ymin) : 0.5, 0.05, 0.99);

    auto residuals = [&](const std::vector<double>& p, std::vector<double>& r) {
        r.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double model = p[0] * (1.0 + p[1] * std::cos(p[2] * t[i] + p[3]));
            const double w = 1.0 / std::sqrt(std::max(y[i], 1.0));
            r[i] = w * (y[i] - model);
        }
    };

    CurveFitOptions fit_opts;
    fit_opts.lower = {0.0, 0.0, 0.0, -std::numeric_limits<double>::infinity()};
    fit_opts.upper = {std::numeric_limits<double>::infinity(), 1.5,
                      std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    auto fit = fit_least_squares(residuals, {mean, v_init, omega0, phi0_init}, fit_opts);
    if (!fit.converged) throw FitError("estimate_fringefit: fit did not converge");

    const double fitted_omega = fit.params[2];
    if (fitted_omega * t_span < kTwoPi)
        throw FitError("estimate_fringefit: window holds less than one oscillation");

    VisibilityEstimate est;
    est.method = EstimatorMethod::fringe_fit;
    est.diagnostics.n_bins_used = n;
    est.diagnostics.residual_norm = std::sqrt(fit.chi2);
    est.diagnostics.scale_estimate = 2.0 * fit.params[0]; // C_max + C_min = 2A
    est.visibility = detail::clamp_visibility(fit.params[1], est.diagnostics);
    est.std_error = fit.std_errors.size() > 1 ? fit.std_errors[1] : 0.0;
    return est;
}

struct PdfFitOptions {
    int min_hist_bins = 20;          // floor for the Freedman-Diaconis rule
    double init_quantile = 0.02;     // quantile means for the initial (S, V)
    bool poisson_mixture = false;    // maximum-likelihood variant
    std::size_t min_trace_bins = 100;
};

namespace detail {

// Expected histogram content between count levels [lo, hi) for N samples
// of the arcsine law: N (Psi(hi) - Psi(lo)).
inline double arcsine_bin_content(double lo, double hi, double scale, double visibility, double n) {
    const double p_hi = arcsine_count_cdf(hi, scale, visibility).probability;
    const double p_lo = arcsine_count_cdf(lo, scale, visibility).probability;
    return n * std::max(p_hi - p_lo, 0.0);
}

// Negative log-likelihood of the Poisson mixture: each count is Poisson
// with phase-dependent mean S (1 + V cos theta)/2 and theta uniform;
// the phase average uses a midpoint rule (the integrand is smooth and
// periodic in theta, so midpoint converges fast). lgamma terms are
// cached per unique count.
class PoissonMixtureNll {
public:
    PoissonMixtureNll(const std::vector<long long>& counts, int nodes = 96) : nodes_(nodes) {
        std::map<long long, int> multiplicity;
        for (long long c : counts) ++multiplicity[c];
        for (const auto& [count, mult] : multiplicity) {
            counts_.push_back(static_cast<double>(count));
            mults_.push_back(static_cast<double>(mult));
            lgam_.push_back(std::lgamma(static_cast<double>(count) + 1.0));
        }
    }

    double operator()(double scale, double visibility) const {
        if (!(scale > 0.0) || !(visibility > 1e-6) || visibility >= 1.0) return 1e300;
        std::vector<double> mu(static_cast<std::size_t>(nodes_)), log_mu(static_cast<std::size_t>(nodes_));
        for (int j = 0; j < nodes_; ++j) {
            const double theta = kPi * (static_cast<double>(j) + 0.5) / static_cast<double>(nodes_);
            mu[static_cast<std::size_t>(j)] =
                std::max(0.5 * scale * (1.0 + visibility * std::cos(theta)), 1e-12);
            log_mu[static_cast<std::size_t>(j)] = std::log(mu[static_cast<std::size_t>(j)]);
        }
        double nll = 0.0;
        std::vector<double> logs(static_cast<std::size_t>(nodes_));
        for (std::size_t i = 0; i < counts_.size(); ++i) {
            double max_log = -std::numeric_limits<double>::infinity();
            for (int j = 0; j < nodes_; ++j) {
                logs[static_cast<std::size_t>(j)] =
                    counts_[i] * log_mu[static_cast<std::size_t>(j)] - mu[static_cast<std::size_t>(j)];
                max_log = std::max(max_log, logs[static_cast<std::size_t>(j)]);
            }
            double acc = 0.0;
            for (double lg : logs) acc += std::exp(lg - max_log);
            nll -= mults_[i] *
                   (max_log + std::log(acc / static_cast<double>(nodes_)) - lgam_[i]);
        }
        return nll;
    }

private:
    int nodes_;
    std::vector<double> counts_, mults_, lgam_;
};

} // namespace detail

// The free-running estimator: histogram the counts and fit the arcsine
// law to the bins at or below the median count.
inline VisibilityEstimate estimate_pdf_fit(const CoincidenceTrace& trace, const PdfFitOptions& opts = {}) {
    trace.validate();
    const std::size_t n = trace.counts.size();
    if (n < opts.min_trace_bins)
        throw InsufficientDataError("estimate_pdf_fit: trace shorter than the required bin count");

    // Counts carry no intrinsic unit: reduce by their greatest common
    // divisor so integer rescalings of a trace reproduce the identical
    // computation (the scale estimate is restored at the end).
    long long gcd = 0;
    for (long long c : trace.counts) gcd = std::gcd(gcd, c);
    const double count_unit = gcd > 1 ? static_cast<double>(gcd) : 1.0;

    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i)
        values[i] = static_cast<double>(trace.counts[i]) / count_unit;
    const Histogram hist = build_histogram(values, opts.min_hist_bins);
    if (hist.populated() < 5)
        throw InsufficientDataError("estimate_pdf_fit: fewer than 5 populated histogram bins");

    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    const double median = quantile_sorted(sorted, 0.5);

    // Initial scale/visibility from quantile means (in reduced units).
    const std::size_t k_ext = std::max<std::size_t>(
        1, static_cast<std::size_t>(opts.init_quantile * static_cast<double>(n)));
    double cmin0 = 0.0, cmax0 = 0.0;
    for (std::size_t i = 0; i < k_ext; ++i) {
        cmin0 += sorted[i];
        cmax0 += sorted[n - 1 - i];
    }
    cmin0 /= static_cast<double>(k_ext);
    cmax0 /= static_cast<double>(k_ext);
    double scale0 = cmax0 + cmin0;
    if (scale0 <= 0.0) throw DegenerateTraceError("estimate_pdf_fit: all counts are zero");
    double v0 = std::clamp((cmax0 - cmin0) / scale0, 0.05, 0.995);

    VisibilityEstimate est;
    est.method = EstimatorMethod::pdf_fit;
    est.diagnostics.n_bins_used = n;

    if (opts.poisson_mixture) {
        // Maximum likelihood over the raw counts (absolute units: the
        // Poisson smear width is physical, unlike the plain-PDF shape).
        const detail::PoissonMixtureNll nll_of(trace.counts);
        auto negloglik = [&](const std::vector<double>& p) { return nll_of(p[0], p[1]); };
        NelderMeadOptions nm_opts;
        nm_opts.tolerance = 1e-9;
        const double scale0_raw = scale0 * count_unit;
        auto nm =
            minimize_nelder_mead(negloglik, {scale0_raw, v0}, {0.05 * scale0_raw, 0.05}, nm_opts);
        if (!nm.converged) throw FitError("estimate_pdf_fit: likelihood optimization did not converge");

        // Errors from the numeric Hessian of the negative log-likelihood.
        const double hs = std::max(1e-4 * nm.params[0], 1e-9);
        const double hv = 1e-4;
        auto f = [&](double s, double v) { return negloglik({s, v}); };
        const double f0 = f(nm.params[0], nm.params[1]);
        const double dss = (f(nm.params[0] + hs, nm.params[1]) - 2 * f0 + f(nm.params[0] - hs, nm.params[1])) / (hs * hs);
        const double dvv = (f(nm.params[0], nm.params[1] + hv) - 2 * f0 + f(nm.params[0], nm.params[1] - hv)) / (hv * hv);
        const double dsv = (f(nm.params[0] + hs, nm.params[1] + hv) - f(nm.params[0] + hs, nm.params[1] - hv) -
                            f(nm.params[0] - hs, nm.params[1] + hv) + f(nm.params[0] - hs, nm.params[1] - hv)) /
                           (4.0 * hs * hv);
        const double det = dss * dvv - dsv * dsv;
        est.std_error = det > 0.0 ? std::sqrt(std::max(dss / det, 0.0)) : 0.0;
        est.diagnostics.scale_estimate = nm.params[0];
        est.diagnostics.residual_norm = nm.value;
        est.visibility = detail::clamp_visibility(nm.params[1], est.diagnostics);
        return est;
    }

    // Weighted least squares on the low-count ("left") part of the
    // histogram; expected bin contents from CDF differences so that the
    // edge divergence integrates exactly.
    std::vector<const HistogramBin*> fit_bins;
    for (const auto& b : hist.bins)
        if (0.5 * (b.left + b.right) <= median) fit_bins.push_back(&b);
    if (fit_bins.size() < 3)
        throw InsufficientDataError("estimate_pdf_fit: fewer than 3 histogram bins below the median");

    const double n_total = static_cast<double>(n);
    auto residuals = [&](const std::vector<double>& p, std::vector<double>& r) {
        r.resize(fit_bins.size());
        for (std::size_t i = 0; i < fit_bins.size(); ++i) {
            const auto& b = *fit_bins[i];
            const double model = detail::arcsine_bin_content(b.left, b.right, p[0], p[1], n_total);
            const double w = 1.0 / std::sqrt(std::max(b.count, 1.0));
            r[i] = w * (b.count - model);
        }
    };

    CurveFitOptions fit_opts;
    fit_opts.lower = {1e-9, 1e-6};
    fit_opts.upper = {std::numeric_limits<double>::infinity(), 1.0};
    auto fit = fit_least_squares(residuals, {scale0, v0}, fit_opts);

    est.diagnostics.residual_norm = std::sqrt(fit.chi2);
    est.diagnostics.scale_estimate = fit.params[0] * count_unit;
    est.visibility = detail::clamp_visibility(fit.params[1], est.diagnostics);
    est.std_error = fit.std_errors.size() > 1 && std::isfinite(fit.std_errors[1]) ? fit.std_errors[1] : 0.0;
    if (!fit.converged) est.diagnostics.warnings.push_back("pdf fit reached iteration limit");
    return est;
}

} // namespace biphoton
