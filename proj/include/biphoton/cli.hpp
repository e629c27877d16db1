#pragma once

// Command-line front end: simulate | estimate | method-a | method-b |
// theory-curves | convert-units. Data goes to files (or stdout for the
// estimate/convert-units reports); messages go to stderr. Exit codes:
// 0 success, 1 configuration/domain errors, 2 numeric failures.

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "biphoton/cd_methods.hpp"
#include "biphoton/estimators.hpp"
#include "biphoton/interferogram.hpp"
#include "biphoton/io/config.hpp"
#include "biphoton/io/csv.hpp"
#include "biphoton/io/manifest.hpp"
#include "biphoton/io/reports.hpp"
#include "biphoton/io/svg.hpp"
#include "biphoton/rng.hpp"
#include "biphoton/trace.hpp"
#include "biphoton/version.hpp"

namespace biphoton::cli {

namespace fs = std::filesystem;
using io::CampaignConfig;
using io::json;

struct RunOptions {
    fs::path out_dir = ".";
    int threads = 1;
    bool svg = false;
    bool save_traces = false;
};

// Stream index reserved for the calibration trace (repetitions use 0..N-1
// and method-b points use (k+1)*1e6 + r).
inline constexpr std::uint64_t kCalibrationStream = 1'000'000'007ull;

namespace detail {

inline double degeneracy_wavelength_m(const CampaignConfig& c) {
    return c.degeneracy_wavelength_nm * 1e-9;
}

inline double beta2_true_si(const CampaignConfig& c) {
    return dispersion_coeff_to_beta2(dispersion_si_from_ps_nm_km(c.d_true_ps_nm_km),
                                     degeneracy_wavelength_m(c));
}

inline DetectorModel detector_from(const CampaignConfig& c, std::uint64_t stream_seed) {
    DetectorModel det;
    det.bin_duration_s = c.bin_duration_s;
    det.max_rate_hz = c.max_rate_hz;
    det.accidental_rate_hz = c.accidental_rate_hz;
    det.seed = stream_seed;
    det.validate();
    return det;
}

inline DriftProcess drift_from(const CampaignConfig& c) {
    if (c.drift.kind == "uniform") return DriftProcess::uniform_random_phase();
    if (c.drift.kind == "random-walk") return DriftProcess::random_walk(c.drift.step_std_rad);
    double sensitivity = c.drift.sensitivity_rad_per_k;
    if (sensitivity <= 0.0)
        sensitivity = phase_per_kelvin(c.sample_length_m, degeneracy_wavelength_m(c));
    return DriftProcess::thermal_sines(c.drift.components, sensitivity);
}

inline PdfFitOptions estimator_from(const CampaignConfig& c) {
    PdfFitOptions opts;
    opts.poisson_mixture = c.estimator_variant == "pdf-fit-ml";
    return opts;
}

// Fringe parameters (true visibility, oscillation phase) for a gaussian
// filter of the given width through the configured sample.
struct FringeTruth {
    double visibility = 1.0;
    double phase = 0.0;
    double sigma_omega = 0.0;
};

inline FringeTruth fringe_truth(const CampaignConfig& c, double width_nm) {
    FringeTruth out;
    out.sigma_omega =
        io::sigma_omega_from_width(width_nm, *c.width_convention, degeneracy_wavelength_m(c));
    const auto spectrum =
        SpectralDensity::gaussian(out.sigma_omega, degeneracy_wavelength_m(c));
    const auto vp = franson_visibility_phase(spectrum, beta2_true_si(c), c.sample_length_m);
    out.visibility = vp.visibility;
    out.phase = vp.phase;
    return out;
}

inline void ensure_out_dir(const RunOptions& run) {
    std::error_code ec;
    fs::create_directories(run.out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + run.out_dir.string());
}

inline void emit_fringe_trace_svg(const fs::path& path, const CoincidenceTrace& trace) {
    io::PlotSeries series;
    series.label = "coincidences";
    series.kind = io::PlotSeries::Kind::line;
    for (std::size_t i = 0; i < trace.counts.size(); ++i)
        series.xy.push_back({static_cast<double>(i) * trace.bin_duration_s,
                             static_cast<double>(trace.counts[i])});
    io::write_svg_plot(path, {"Free-running coincidence trace", "time (s)", "counts per bin",
                              {series}});
}

inline CalibrationResult run_calibration(const CampaignConfig& c) {
    const auto truth = fringe_truth(c, c.calibration_width_nm);
    const auto det = detector_from(c, derive_stream_seed(c.seed, kCalibrationStream));
    const auto trace = simulate_trace(truth.visibility, c.static_phase_offset_rad + truth.phase,
                                      drift_from(c), det, static_cast<std::size_t>(c.bins_per_trace));
    return calibrate(trace, c.calibration_threshold, estimator_from(c));
}

} // namespace detail

inline void run_simulate(const CampaignConfig& c, const RunOptions& run) {
    detail::ensure_out_dir(run);
    double visibility;
    double phi0 = c.static_phase_offset_rad;
    if (c.visibility) {
        visibility = *c.visibility;
    } else {
        const auto truth = detail::fringe_truth(c, *c.filter_width_nm);
        visibility = truth.visibility;
        phi0 += truth.phase;
    }
    const auto det = detail::detector_from(c, c.seed);
    const auto trace = simulate_trace(visibility, phi0, detail::drift_from(c), det,
                                      static_cast<std::size_t>(c.bins_per_trace));
    io::save_trace(run.out_dir / "trace", trace);
    if (run.svg) detail::emit_fringe_trace_svg(run.out_dir / "fringe_trace.svg", trace);
    io::write_manifest(run.out_dir, "simulate", c);

    const auto check = drift_bandwidth_check(detail::drift_from(c), det);
    if (check.warn)
        std::cerr << "warning: drift moves " << check.rad_per_bin
                  << " rad per bin, above the " << check.threshold << " rad threshold\n";
}

inline CdResult run_method_a(const CampaignConfig& c, const RunOptions& run,
                             CalibrationResult* calibration_out = nullptr) {
    detail::ensure_out_dir(run);

    CalibrationResult calibration;
    if (!c.skip_calibration) {
        calibration = detail::run_calibration(c);
        if (!calibration.passed)
            throw DomainError("calibration failed: narrowband visibility " +
                              std::to_string(calibration.estimate.visibility) + " below threshold " +
                              std::to_string(calibration.threshold) +
                              " (set skip_calibration to override)");
    }
    if (calibration_out) *calibration_out = calibration;

    const auto truth = detail::fringe_truth(c, *c.filter_width_nm);
    std::vector<CoincidenceTrace> traces(static_cast<std::size_t>(c.repetitions));
    parallel_for(traces.size(), run.threads, [&](std::size_t i) {
        const auto det = detail::detector_from(c, derive_stream_seed(c.seed, i));
        traces[i] = simulate_trace(truth.visibility, c.static_phase_offset_rad + truth.phase,
                                   detail::drift_from(c), det,
                                   static_cast<std::size_t>(c.bins_per_trace));
    });
    if (run.save_traces) {
        for (std::size_t i = 0; i < traces.size(); ++i)
            io::save_trace(run.out_dir / ("trace_" + std::to_string(i)), traces[i]);
    }

    MethodOptions opts;
    opts.wavelength = detail::degeneracy_wavelength_m(c);
    opts.estimator = detail::estimator_from(c);
    const auto result = method_inflexion(traces, truth.sigma_omega, c.sample_length_m, opts);

    json report = io::cd_result_report(result, opts.wavelength);
    if (!c.skip_calibration) {
        report["calibration"] = {{"passed", calibration.passed},
                                 {"threshold", calibration.threshold},
                                 {"visibility", calibration.estimate.visibility}};
    }
    io::write_text_file(run.out_dir / "results_method_a.json", report.dump(2) + "\n");

    // The CD histogram and its Gaussian fit.
    const auto hist = build_histogram(result.samples);
    const auto gauss = [&](double x) {
        const double z = (x - result.inflexion.gauss_mean) /
                         std::max(result.inflexion.gauss_sigma, 1e-300);
        double amp = 0.0;
        for (const auto& b : hist.bins) amp = std::max(amp, b.count);
        return amp * std::exp(-0.5 * z * z);
    };
    io::write_histogram_csv(run.out_dir / "cd_histogram.csv", hist, [&](const HistogramBin& b) {
        return gauss(0.5 * (b.left + b.right));
    });
    io::PlotSeries bars;
    bars.label = "samples";
    bars.kind = io::PlotSeries::Kind::bars;
    io::PlotSeries fit;
    fit.label = "gaussian fit";
    fit.color = "#d62728";
    for (const auto& b : hist.bins) {
        const double center = 0.5 * (b.left + b.right);
        bars.xy.push_back({center, b.count});
        fit.xy.push_back({center, gauss(center)});
    }
    io::write_svg_plot(run.out_dir / "cd_histogram.svg",
                       {"Chromatic dispersion samples", "D (ps/(nm km))", "occurrences",
                        {bars, fit}});
    io::write_manifest(run.out_dir, "method-a", c);
    return result;
}

inline CdResult run_method_b(const CampaignConfig& c, const RunOptions& run,
                             CalibrationResult* calibration_out = nullptr) {
    detail::ensure_out_dir(run);

    CalibrationResult calibration;
    if (!c.skip_calibration) {
        calibration = detail::run_calibration(c);
        if (!calibration.passed)
            throw DomainError("calibration failed: narrowband visibility " +
                              std::to_string(calibration.estimate.visibility) + " below threshold " +
                              std::to_string(calibration.threshold) +
                              " (set skip_calibration to override)");
    }
    if (calibration_out) *calibration_out = calibration;

    const auto& widths = *c.filter_widths_nm;
    std::vector<MultiPointOperatingPoint> points(widths.size());
    std::vector<detail::FringeTruth> truths(widths.size());
    for (std::size_t k = 0; k < widths.size(); ++k) {
        truths[k] = detail::fringe_truth(c, widths[k]);
        points[k].sigma_omega = truths[k].sigma_omega;
        points[k].traces.resize(static_cast<std::size_t>(c.repetitions));
    }
    const std::size_t reps = static_cast<std::size_t>(c.repetitions);
    parallel_for(widths.size() * reps, run.threads, [&](std::size_t flat) {
        const std::size_t k = flat / reps;
        const std::size_t r = flat % reps;
        const auto det =
            detail::detector_from(c, derive_stream_seed(c.seed, (k + 1) * 1'000'000ull + r));
        points[k].traces[r] = simulate_trace(
            truths[k].visibility, c.static_phase_offset_rad + truths[k].phase, detail::drift_from(c),
            det, static_cast<std::size_t>(c.bins_per_trace));
    });

    MethodOptions opts;
    opts.wavelength = detail::degeneracy_wavelength_m(c);
    opts.estimator = detail::estimator_from(c);
    const auto result = method_multipoint(points, c.sample_length_m, opts);

    json report = io::cd_result_report(result, opts.wavelength);
    if (!c.skip_calibration) {
        report["calibration"] = {{"passed", calibration.passed},
                                 {"threshold", calibration.threshold},
                                 {"visibility", calibration.estimate.visibility}};
    }
    io::write_text_file(run.out_dir / "results_method_b.json", report.dump(2) + "\n");

    // Visibility vs bandwidth table (sigma in nm at the boundary).
    std::ostringstream table;
    table << "sigma_nm,visibility,std_error,fit_visibility\n";
    io::PlotSeries meas;
    meas.label = "measured";
    meas.kind = io::PlotSeries::Kind::points;
    for (const auto& p : result.multipoint.points) {
        const double sigma_nm = sigma_omega_to_lambda(p.sigma_omega, opts.wavelength) * 1e9;
        table << io::format_double(sigma_nm) << ',' << io::format_double(p.visibility) << ','
              << io::format_double(p.std_error) << ',' << io::format_double(p.fit_visibility)
              << '\n';
        meas.xy.push_back({sigma_nm, p.visibility});
        meas.yerr.push_back(p.std_error);
    }
    io::write_text_file(run.out_dir / "visibility_vs_bandwidth.csv", table.str());

    // Dense fitted curve for plotting.
    io::PlotSeries fit;
    fit.label = "fit";
    fit.color = "#d62728";
    const double lo = result.multipoint.points.front().sigma_omega;
    const double hi = result.multipoint.points.back().sigma_omega;
    std::vector<std::pair<double, double>> curve;
    for (int i = 0; i <= 200; ++i) {
        const double sigma = lo + (hi - lo) * i / 200.0;
        const double gamma = 2.0 * sigma * sigma * result.beta2 * c.sample_length_m;
        const double v = visibility_closed_form(gamma);
        const double sigma_nm = sigma_omega_to_lambda(sigma, opts.wavelength) * 1e9;
        fit.xy.push_back({sigma_nm, v});
        curve.push_back({sigma_nm, v});
    }
    io::write_curve_csv(run.out_dir / "visibility_fit_curve.csv", curve);
    io::write_svg_plot(run.out_dir / "visibility_vs_bandwidth.svg",
                       {"Visibility vs filter bandwidth", "filter sigma (nm)", "visibility",
                        {fit, meas}});
    io::write_manifest(run.out_dir, "method-b", c);
    return result;
}

inline void run_theory_curves(const CampaignConfig& c, const RunOptions& run) {
    detail::ensure_out_dir(run);
    const int n = c.curve_points;
    std::vector<io::PlotSeries> series;

    if (c.curve_shape == "gaussian" || c.curve_shape == "both") {
        std::vector<std::pair<double, double>> curve;
        for (int i = 0; i < n; ++i) {
            const double gamma = c.gamma_max * i / (n - 1);
            curve.push_back({gamma, visibility_closed_form(gamma)});
        }
        io::write_curve_csv(run.out_dir / "gamma_curve_gaussian.csv", curve);
        io::PlotSeries s;
        s.label = "gaussian";
        s.xy = curve;
        series.push_back(s);
    }
    if (c.curve_shape == "rectangular" || c.curve_shape == "both") {
        // gamma uses the spectral standard deviation for every shape:
        // a rectangle of half width W has sigma^2 = W^2/3.
        const double w = 5e12;
        const double length = 1.0;
        const auto rect = SpectralDensity::rectangular(w, detail::degeneracy_wavelength_m(c));
        std::vector<std::pair<double, double>> curve;
        for (int i = 0; i < n; ++i) {
            const double gamma = c.gamma_max * i / (n - 1);
            const double beta2 = 3.0 * gamma / (2.0 * w * w * length);
            curve.push_back({gamma, franson_visibility_phase(rect, beta2, length).visibility});
        }
        io::write_curve_csv(run.out_dir / "gamma_curve_rectangular.csv", curve);
        io::PlotSeries s;
        s.label = "rectangular";
        s.color = "#2ca02c";
        s.xy = curve;
        series.push_back(s);
    }
    if (c.curve_shape == "gaussian" || c.curve_shape == "both") {
        io::PlotSeries dot;
        dot.label = "inflexion point";
        dot.color = "#d62728";
        dot.kind = io::PlotSeries::Kind::points;
        dot.xy.push_back({inflexion_gamma(), visibility_closed_form(inflexion_gamma())});
        series.push_back(dot);
    }
    io::write_svg_plot(run.out_dir / "gamma_curve.svg",
                       {"Two-photon visibility vs gamma", "gamma", "visibility", series});
    io::write_manifest(run.out_dir, "theory-curves", c);
}

inline int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Two-photon interferometry chromatic-dispersion measurement simulator"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    std::string config_path, out_dir = ".", trace_path, method = "pdf-fit", out_file;
    std::uint64_t seed = 0;
    bool have_seed = false, svg = false, save_traces = false, skip_calibration = false;
    int threads = 1, bins = 0, repetitions = 0;
    double v = -1.0, mean_max = 0.0, bin_duration = 0.0, step_std = 0.1;
    double d_coeff = 0.0, beta2_in = 0.0, lambda_m = 1560.46e-9;
    double gamma_max = 6.0;
    std::string drift_kind, shape = "both";
    std::size_t window_begin = 0, window_end = 0;

    auto* sim = app.add_subcommand("simulate", "generate a synthetic free-running trace");
    sim->add_option("--config", config_path);
    sim->add_option("--out", out_dir);
    sim->add_option("--v", v, "fringe visibility in [0,1]");
    sim->add_option("--mean-max", mean_max, "mean counts per bin at the fringe maximum");
    sim->add_option("--bins", bins, "number of time bins");
    sim->add_option("--bin-duration", bin_duration, "bin duration in seconds");
    sim->add_option("--drift", drift_kind, "uniform | random-walk | thermal(config only)");
    sim->add_option("--step-std", step_std, "random-walk step std in rad per bin");
    sim->add_option("--seed", seed)->each([&](const std::string&) { have_seed = true; });
    sim->add_flag("--svg", svg, "also write an SVG rendering");

    auto* est = app.add_subcommand("estimate", "estimate visibility from a trace CSV");
    est->add_option("--trace", trace_path, "trace CSV (sidecar JSON expected next to it)")
        ->required();
    est->add_option("--method", method, "pdf-fit | pdf-fit-ml | min-max | fringe-fit");
    est->add_option("--bin-duration", bin_duration, "bin duration when no sidecar is present");
    est->add_option("--window-begin", window_begin, "fringe-fit window start bin");
    est->add_option("--window-end", window_end, "fringe-fit window end bin (exclusive)");
    est->add_option("--out", out_file, "also write the report JSON here");

    auto* ma = app.add_subcommand("method-a", "inflexion-point CD measurement campaign");
    ma->add_option("--config", config_path)->required();
    ma->add_option("--out", out_dir);
    ma->add_option("--threads", threads);
    ma->add_option("--seed", seed)->each([&](const std::string&) { have_seed = true; });
    ma->add_option("--repetitions", repetitions);
    ma->add_flag("--save-traces", save_traces);
    ma->add_flag("--skip-calibration", skip_calibration);

    auto* mb = app.add_subcommand("method-b", "multi-bandwidth CD measurement campaign");
    mb->add_option("--config", config_path)->required();
    mb->add_option("--out", out_dir);
    mb->add_option("--threads", threads);
    mb->add_option("--seed", seed)->each([&](const std::string&) { have_seed = true; });
    mb->add_option("--repetitions", repetitions);
    mb->add_flag("--skip-calibration", skip_calibration);

    auto* tc = app.add_subcommand("theory-curves", "emit visibility-vs-gamma curves");
    tc->add_option("--config", config_path);
    tc->add_option("--out", out_dir);
    tc->add_option("--shape", shape, "gaussian | rectangular | both");
    tc->add_option("--gamma-max", gamma_max);

    auto* cu = app.add_subcommand("convert-units", "convert between D and beta2");
    cu->add_option("--d", d_coeff, "dispersion coefficient in ps/(nm km)");
    cu->add_option("--beta2", beta2_in, "beta2 in s^2/m");
    cu->add_option("--lambda", lambda_m, "wavelength in meters");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            std::cout << app.help();
            return 0;
        }
        std::cerr << e.what() << "\n" << app.help() << "\n";
        return 1;
    }

    try {
        RunOptions run;
        run.out_dir = out_dir;
        run.threads = threads;
        run.svg = svg;
        run.save_traces = save_traces;

        if (sim->parsed()) {
            CampaignConfig c;
            if (!config_path.empty()) c = io::load_config(config_path);
            c.mode = "simulate";
            if (v >= 0.0) c.visibility = v;
            if (mean_max > 0.0) c.max_rate_hz = mean_max / c.bin_duration_s;
            if (bin_duration > 0.0) {
                // Keep the configured mean-max when rebinning.
                const double mm = c.max_rate_hz * c.bin_duration_s;
                c.bin_duration_s = bin_duration;
                c.max_rate_hz = mm / bin_duration;
            }
            if (bins > 0) c.bins_per_trace = bins;
            if (!drift_kind.empty()) {
                if (drift_kind == "thermal" && config_path.empty())
                    throw ConfigError("thermal drift needs a config file with components");
                c.drift.kind = drift_kind;
                c.drift.step_std_rad = step_std;
            }
            if (have_seed) c.seed = seed;
            io::validate(c);
            run_simulate(c, run);
            return 0;
        }
        if (est->parsed()) {
            CoincidenceTrace trace;
            if (bin_duration > 0.0)
                trace = io::read_trace_csv(trace_path, bin_duration);
            else
                trace = io::load_trace(trace_path);
            VisibilityEstimate result;
            if (method == "pdf-fit") {
                result = estimate_pdf_fit(trace);
            } else if (method == "pdf-fit-ml") {
                PdfFitOptions opts;
                opts.poisson_mixture = true;
                result = estimate_pdf_fit(trace, opts);
            } else if (method == "min-max") {
                result = estimate_minmax(trace);
            } else if (method == "fringe-fit") {
                BinRange window{window_begin,
                                window_end > 0 ? window_end : trace.counts.size()};
                result = estimate_fringefit(trace, window);
            } else {
                throw ConfigError("unknown estimator '" + method + "'");
            }
            const json report = io::estimation_report(result);
            std::cout << report.dump(2) << "\n";
            if (!out_file.empty()) io::write_text_file(out_file, report.dump(2) + "\n");
            return 0;
        }
        if (ma->parsed() || mb->parsed()) {
            CampaignConfig c = io::load_config(config_path);
            if (have_seed) c.seed = seed;
            if (repetitions > 0) c.repetitions = repetitions;
            if (skip_calibration) c.skip_calibration = true;
            c.mode = ma->parsed() ? "method-a" : "method-b";
            io::validate(c);
            const auto result = ma->parsed() ? run_method_a(c, run) : run_method_b(c, run);
            std::cerr << to_string(result.method) << ": |D| = " << result.d_ps_nm_km << " +- "
                      << result.std_error_ps_nm_km << " ps/(nm km)\n";
            return 0;
        }
        if (tc->parsed()) {
            CampaignConfig c;
            if (!config_path.empty()) c = io::load_config(config_path);
            c.mode = "theory-curves";
            if (tc->count("--shape")) c.curve_shape = shape;
            if (tc->count("--gamma-max")) c.gamma_max = gamma_max;
            io::validate(c);
            run_theory_curves(c, run);
            return 0;
        }
        if (cu->parsed()) {
            json out;
            out["schema"] = 1;
            out["wavelength_m"] = lambda_m;
            if (cu->count("--d")) {
                const double beta2 =
                    dispersion_coeff_to_beta2(dispersion_si_from_ps_nm_km(d_coeff), lambda_m);
                out["d_ps_nm_km"] = d_coeff;
                out["beta2_s2_m"] = beta2;
                out["beta2_ps2_km"] = beta2_ps2_km_from_si(beta2);
            } else if (cu->count("--beta2")) {
                out["beta2_s2_m"] = beta2_in;
                out["beta2_ps2_km"] = beta2_ps2_km_from_si(beta2_in);
                out["d_ps_nm_km"] =
                    dispersion_ps_nm_km_from_si(beta2_to_dispersion_coeff(beta2_in, lambda_m));
            } else {
                throw ConfigError("convert-units needs --d or --beta2");
            }
            std::cout << out.dump(2) << "\n";
            return 0;
        }
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 2;
    } catch (const FitError& e) {
        std::cerr << "fit error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

} // namespace biphoton::cli
