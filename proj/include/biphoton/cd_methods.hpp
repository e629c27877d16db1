#pragma once

// The two end-to-end CD measurement methods.
//
// Method A (inflexion point): every repetition yields a visibility
// estimate at a fixed operating point near gamma = sqrt(2/3); each is
// inverted to a CD sample and the sample histogram is summarized by a
// Gaussian fit.
//
// Method B (multiple operating points): visibility is estimated for a
// set of filter bandwidths and V(sigma_k) = (gamma_k^2+1)^(-1/4) with
// gamma_k = 2 sigma_k^2 beta2 L is fitted with beta2 as the only free
// parameter.

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "biphoton/errors.hpp"
#include "biphoton/estimators.hpp"
#include "biphoton/gaussian_analytics.hpp"
#include "biphoton/histogram.hpp"
#include "biphoton/trace.hpp"
#include "biphoton/units.hpp"

namespace biphoton {

enum class CdMethod { inflexion_point, multi_point };

inline const char* to_string(CdMethod m) {
    return m == CdMethod::inflexion_point ? "inflexion-point" : "multi-point";
}

// Pipeline default estimator: the Poisson-mixture likelihood variant.
// At the experiment's count level (1e3 per bin) the plain left-part
// histogram fit is limited by Poisson smearing of the arcsine edges to
// sigma_V ~ 1e-2; the mixture fit reaches ~3e-3 with negligible bias,
// which is what the per-measurement CD spread of the experiment implies.
inline PdfFitOptions pipeline_pdf_fit_options() {
    PdfFitOptions opts;
    opts.poisson_mixture = true;
    return opts;
}

struct CalibrationResult {
    bool passed = false;
    double threshold = 0.99;
    VisibilityEstimate estimate;
};

// Narrowband prerequisite: with gamma ~ 0 the visibility must reach the
// threshold, otherwise something other than CD degrades the fringes.
inline CalibrationResult calibrate(const CoincidenceTrace& narrowband_trace, double threshold = 0.99,
                                   const PdfFitOptions& estimator = pipeline_pdf_fit_options()) {
    CalibrationResult result;
    result.threshold = threshold;
    result.estimate = estimate_pdf_fit(narrowband_trace, estimator);
    result.passed = result.estimate.visibility >= threshold;
    return result;
}

struct InflexionDetails {
    double sample_mean = 0.0;
    double sample_std = 0.0;
    double gauss_mean = 0.0;   // Gaussian fit to the D histogram
    double gauss_sigma = 0.0;
    std::size_t excluded = 0;  // repetitions with V >= 1
    std::vector<double> visibilities;
};

struct MultiPointEntry {
    double sigma_omega = 0.0;  // rad/s
    double visibility = 0.0;   // aggregated estimate
    double std_error = 0.0;    // standard error of the aggregate
    double fit_visibility = 0.0;
    std::size_t n_traces = 0;
};

struct MultiPointDetails {
    std::vector<MultiPointEntry> points;
    double chi2 = 0.0;
    std::size_t dof = 0;
};

struct CdResult {
    double d_ps_nm_km = 0.0;        // magnitude
    double beta2 = 0.0;             // s^2/m, magnitude
    double std_error_ps_nm_km = 0.0;
    CdMethod method = CdMethod::inflexion_point;
    std::vector<double> samples;    // per-repetition D values (method A)
    InflexionDetails inflexion;
    MultiPointDetails multipoint;
};

struct MethodOptions {
    double wavelength = 1560.46e-9; // degeneracy wavelength for the D conversion
    PdfFitOptions estimator = pipeline_pdf_fit_options();
};

inline CdResult method_inflexion(std::span<const CoincidenceTrace> traces, double sigma_omega,
                                 double length, const MethodOptions& opts = {}) {
    if (traces.empty()) throw DomainError("method_inflexion: no traces");
    if (!(sigma_omega > 0.0) || !(length > 0.0))
        throw DomainError("method_inflexion: sigma and length must be positive");

    CdResult result;
    result.method = CdMethod::inflexion_point;
    result.samples.reserve(traces.size());

    for (const auto& trace : traces) {
        const auto est = estimate_pdf_fit(trace, opts.estimator);
        result.inflexion.visibilities.push_back(est.visibility);
        if (est.visibility >= 1.0) {
            // gamma = 0 edge: no dispersion information in this repetition.
            ++result.inflexion.excluded;
            continue;
        }
        const double gamma = invert_visibility(est.visibility).gamma;
        const auto cd = cd_from_gamma(gamma, sigma_omega, length, opts.wavelength);
        result.samples.push_back(cd.d_ps_nm_km);
    }
    if (result.samples.empty())
        throw InsufficientDataError("method_inflexion: every repetition was excluded");

    double mean = 0.0;
    for (double d : result.samples) mean += d;
    mean /= static_cast<double>(result.samples.size());
    double var = 0.0;
    for (double d : result.samples) var += (d - mean) * (d - mean);
    var = result.samples.size() > 1 ? var / static_cast<double>(result.samples.size() - 1) : 0.0;

    result.inflexion.sample_mean = mean;
    result.inflexion.sample_std = std::sqrt(var);

    // Aggregate like the histogram figure: Gaussian fit when the sample
    // is large enough to histogram meaningfully, plain moments otherwise.
    result.inflexion.gauss_mean = mean;
    result.inflexion.gauss_sigma = result.inflexion.sample_std;
    if (result.samples.size() >= 100) {
        try {
            const auto fit = fit_gaussian(build_histogram(result.samples));
            if (fit.converged && fit.sigma > 0.0) {
                result.inflexion.gauss_mean = fit.mean;
                result.inflexion.gauss_sigma = fit.sigma;
            }
        } catch (const InsufficientDataError&) {
            // keep moment-based aggregate
        }
    }

    result.d_ps_nm_km = result.inflexion.gauss_mean;
    result.beta2 = std::abs(
        dispersion_coeff_to_beta2(dispersion_si_from_ps_nm_km(result.d_ps_nm_km), opts.wavelength));
    result.std_error_ps_nm_km =
        result.inflexion.sample_std / std::sqrt(static_cast<double>(result.samples.size()));
    return result;
}

struct VisibilityPoint {
    double sigma_omega = 0.0; // rad/s
    double visibility = 0.0;
    double std_error = 0.0;   // 0 means "equal weights"
    std::size_t n_traces = 0;
};

// Weighted fit of V(sigma) = (gamma^2+1)^(-1/4), gamma = 2 sigma^2 beta2 L,
// with beta2 the only free parameter.
inline CdResult fit_visibility_curve(std::span<const VisibilityPoint> points, double length,
                                     const MethodOptions& opts = {}) {
    if (points.size() < 3)
        throw ConfigError("fit_visibility_curve: need at least 3 distinct bandwidths");
    if (!(length > 0.0)) throw DomainError("fit_visibility_curve: length must be positive");

    std::vector<double> sigmas, vhat, se;
    for (const auto& p : points) {
        if (!(p.sigma_omega > 0.0))
            throw DomainError("fit_visibility_curve: sigma_omega must be positive");
        sigmas.push_back(p.sigma_omega);
        vhat.push_back(p.visibility);
        se.push_back(p.std_error);
    }
    // Guard against zero uncertainties (noiseless inputs): fall back to
    // the smallest positive error, or unit weights.
    double min_positive = std::numeric_limits<double>::infinity();
    for (double e : se)
        if (e > 0.0) min_positive = std::min(min_positive, e);
    if (!std::isfinite(min_positive)) min_positive = 1.0;
    for (double& e : se)
        if (e <= 0.0) e = min_positive;

    // Initial beta2 from the most dispersive point with V clearly below 1.
    double beta2_init = 0.0;
    for (std::size_t i = points.size(); i-- > 0;) {
        if (vhat[i] < 0.999) {
            const double gamma = invert_visibility(std::max(vhat[i], 1e-3)).gamma;
            beta2_init = gamma / (2.0 * sigmas[i] * sigmas[i] * length);
            break;
        }
    }
    if (beta2_init <= 0.0) beta2_init = 1e-27;

    auto residuals = [&](const std::vector<double>& p, std::vector<double>& r) {
        r.resize(sigmas.size());
        for (std::size_t i = 0; i < sigmas.size(); ++i) {
            const double gamma = 2.0 * sigmas[i] * sigmas[i] * p[0] * length;
            r[i] = (vhat[i] - visibility_closed_form(gamma)) / se[i];
        }
    };
    CurveFitOptions fit_opts;
    fit_opts.lower = {0.0};
    auto fit = fit_least_squares(residuals, {beta2_init}, fit_opts);
    if (!fit.converged) throw FitError("fit_visibility_curve: dispersion fit did not converge");

    CdResult result;
    result.method = CdMethod::multi_point;
    const double beta2 = fit.params[0];
    result.beta2 = std::abs(beta2);
    result.d_ps_nm_km =
        std::abs(dispersion_ps_nm_km_from_si(beta2_to_dispersion_coeff(result.beta2, opts.wavelength)));
    const double dd_dbeta2 = result.beta2 > 0.0 ? result.d_ps_nm_km / result.beta2 : 0.0;
    result.std_error_ps_nm_km =
        fit.std_errors.empty() || !std::isfinite(fit.std_errors[0]) ? 0.0 : fit.std_errors[0] * dd_dbeta2;

    result.multipoint.chi2 = fit.chi2;
    result.multipoint.dof = sigmas.size() - 1;
    for (std::size_t i = 0; i < sigmas.size(); ++i) {
        MultiPointEntry entry;
        entry.sigma_omega = sigmas[i];
        entry.visibility = vhat[i];
        entry.std_error = se[i];
        entry.fit_visibility = visibility_closed_form(2.0 * sigmas[i] * sigmas[i] * beta2 * length);
        entry.n_traces = points[i].n_traces;
        result.multipoint.points.push_back(entry);
    }
    return result;
}

struct MultiPointOperatingPoint {
    double sigma_omega = 0.0; // rad/s
    std::vector<CoincidenceTrace> traces;
};

inline CdResult method_multipoint(std::span<const MultiPointOperatingPoint> points, double length,
                                  const MethodOptions& opts = {}) {
    if (points.size() < 3)
        throw ConfigError("method_multipoint: need at least 3 distinct bandwidths");
    if (!(length > 0.0)) throw DomainError("method_multipoint: length must be positive");

    std::vector<VisibilityPoint> aggregated;
    for (const auto& point : points) {
        if (point.traces.empty()) throw DomainError("method_multipoint: operating point without traces");
        double sum = 0.0, sum2 = 0.0;
        for (const auto& trace : point.traces) {
            const double v = estimate_pdf_fit(trace, opts.estimator).visibility;
            sum += v;
            sum2 += v * v;
        }
        const double n = static_cast<double>(point.traces.size());
        const double mean = sum / n;
        const double var = n > 1 ? std::max(sum2 - n * mean * mean, 0.0) / (n - 1.0) : 0.0;
        aggregated.push_back(
            {point.sigma_omega, mean, std::sqrt(var / std::max(n, 1.0)), point.traces.size()});
    }
    return fit_visibility_curve(aggregated, length, opts);
}

} // namespace biphoton
