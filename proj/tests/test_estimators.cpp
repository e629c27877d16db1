#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "biphoton/drift.hpp"
#include "biphoton/estimators.hpp"
#include "biphoton/trace.hpp"

using namespace biphoton;
using Catch::Approx;

namespace {

CoincidenceTrace grid_fringe_trace(double visibility, double amplitude, std::size_t n,
                                   double bin_s = 0.1) {
    // Noiseless fringe sampled on an equidistributed phase grid (golden
    // ratio step), rounded to integer counts.
    CoincidenceTrace trace;
    trace.bin_duration_s = bin_s;
    trace.true_visibility = visibility;
    const double step = kTwoPi * 0.6180339887498949;
    for (std::size_t i = 0; i < n; ++i) {
        const double phi = std::fmod(step * static_cast<double>(i), kTwoPi);
        trace.counts.push_back(
            static_cast<long long>(std::llround(amplitude * (1.0 + visibility * std::cos(phi)))));
    }
    return trace;
}

CoincidenceTrace uniform_grid_trace(double visibility, double amplitude, std::size_t n) {
    // Exact uniform phase grid over [0, 2pi).
    CoincidenceTrace trace;
    trace.bin_duration_s = 0.1;
    trace.true_visibility = visibility;
    for (std::size_t i = 0; i < n; ++i) {
        const double phi = kTwoPi * static_cast<double>(i) / static_cast<double>(n);
        trace.counts.push_back(
            static_cast<long long>(std::llround(amplitude * (1.0 + visibility * std::cos(phi)))));
    }
    return trace;
}

CoincidenceTrace poisson_trace(double visibility, double mean_max, std::size_t n, std::uint64_t seed) {
    DetectorModel det;
    det.bin_duration_s = 0.1;
    det.max_rate_hz = mean_max / det.bin_duration_s;
    det.seed = seed;
    return simulate_trace(visibility, 0.0, DriftProcess::uniform_random_phase(), det, n);
}

} // namespace

TEST_CASE("minmax recovers a noiseless dense fringe") {
    const auto trace = uniform_grid_trace(0.75, 1000.0 / 1.75, 5000);
    const auto est = estimate_minmax(trace);
    CHECK(est.visibility == Approx(0.75).margin(1e-3));
    CHECK(est.method == EstimatorMethod::min_max);
}

TEST_CASE("minmax of a constant trace is zero") {
    CoincidenceTrace trace;
    trace.bin_duration_s = 0.1;
    trace.counts.assign(200, 500);
    CHECK(estimate_minmax(trace).visibility == 0.0);
}

TEST_CASE("minmax rejects an all-zero trace") {
    CoincidenceTrace trace;
    trace.bin_duration_s = 0.1;
    trace.counts.assign(200, 0);
    CHECK_THROWS_AS(estimate_minmax(trace), DegenerateTraceError);
}

TEST_CASE("minmax requires at least 10 bins") {
    CoincidenceTrace trace;
    trace.bin_duration_s = 0.1;
    trace.counts.assign(9, 5);
    CHECK_THROWS_AS(estimate_minmax(trace), InsufficientDataError);
}

TEST_CASE("minmax is biased upward on poisson traces, pdf fit less so") {
    const double v_true = 0.75;
    double mm_sum = 0.0, pdf_sum = 0.0;
    const int n_rep = 40;
    for (int rep = 0; rep < n_rep; ++rep) {
        const auto trace = poisson_trace(v_true, 1000.0, 500, derive_stream_seed(31337, rep));
        mm_sum += estimate_minmax(trace).visibility;
        pdf_sum += estimate_pdf_fit(trace).visibility;
    }
    const double mm_bias = mm_sum / n_rep - v_true;
    const double pdf_bias = pdf_sum / n_rep - v_true;
    CHECK(mm_bias > 0.0); // extremes of Poisson samples overshoot
    CHECK(std::abs(mm_bias) > std::abs(pdf_bias));
}

TEST_CASE("fringe fit recovers a noiseless linear-drift fringe") {
    // phi(t) = w t: exactly the model class. Large amplitude so integer
    // rounding stays below the 1e-6 target.
    CoincidenceTrace trace;
    trace.bin_duration_s = 0.1;
    const double amp = 1e8, v_true = 0.62, omega = 2.7, phi0 = 0.4;
    for (int i = 0; i < 400; ++i) {
        const double t = i * trace.bin_duration_s;
        trace.counts.push_back(
            static_cast<long long>(std::llround(amp * (1.0 + v_true * std::cos(omega * t + phi0)))));
    }
    const auto est = estimate_fringefit(trace, {0, 400});
    CHECK(est.visibility == Approx(v_true).margin(1e-6));
    CHECK(est.diagnostics.scale_estimate == Approx(2.0 * amp).epsilon(1e-6));
}

TEST_CASE("fringe fit on a poisson linear-drift fringe lands within three standard errors") {
    const double v_true = 0.8, amp = 1000.0, omega = 2.2, phi0 = 0.7;
    CoincidenceTrace trace;
    trace.bin_duration_s = 0.1;
    trace.true_visibility = v_true;
    Rng rng(404);
    for (int i = 0; i < 600; ++i) {
        const double t = i * trace.bin_duration_s;
        trace.counts.push_back(rng.poisson(amp * (1.0 + v_true * std::cos(omega * t + phi0))));
    }
    const auto est = estimate_fringefit(trace, {0, 600});
    CHECK(std::abs(est.visibility - v_true) < 3.0 * std::max(est.std_error, 1e-3));
}

TEST_CASE("fringe fit refuses a window without a full oscillation") {
    CoincidenceTrace trace;
    trace.bin_duration_s = 0.1;
    const double amp = 1000.0;
    for (int i = 0; i < 200; ++i) {
        const double t = i * trace.bin_duration_s;
        // 0.3 oscillations over the window.
        trace.counts.push_back(static_cast<long long>(
            std::llround(amp * (1.0 + 0.7 * std::cos(0.3 * kTwoPi * t / 20.0)))));
    }
    CHECK_THROWS_AS(estimate_fringefit(trace, {0, 200}), FitError);
}

TEST_CASE("pdf fit recovers noiseless uniform-phase samples to 1e-3") {
    const double v_true = 0.75;
    const auto trace = uniform_grid_trace(v_true, 1e6, 500);
    const auto est = estimate_pdf_fit(trace);
    CHECK(est.visibility == Approx(v_true).margin(1e-3));

    // Quantile-matching oracle, scale-free: count_q = S/2 (1 - V cos(pi q)),
    // so S = 2 count_{0.5} and V from the 0.2/0.8 quantile spread.
    std::vector<double> sorted(trace.counts.begin(), trace.counts.end());
    std::sort(sorted.begin(), sorted.end());
    auto count_at = [&](double q) { return sorted[static_cast<std::size_t>(q * sorted.size())]; };
    const double oracle_v = (count_at(0.8) - count_at(0.2)) /
                            (2.0 * count_at(0.5) * std::cos(0.2 * kPi));
    CHECK(oracle_v == Approx(v_true).margin(2e-3));
    CHECK(est.visibility == Approx(oracle_v).margin(2e-3));
}

TEST_CASE("pdf fit estimates a poisson trace within three standard errors") {
    const auto trace = poisson_trace(0.88, 1000.0, 500, 2027);
    const auto est = estimate_pdf_fit(trace);
    CHECK(std::abs(est.visibility - 0.88) < 3.0 * std::max(est.std_error, 1e-3));
    CHECK(est.diagnostics.scale_estimate > 0.0);
}

TEST_CASE("pdf fit rejects degenerate traces") {
    CoincidenceTrace constant;
    constant.bin_duration_s = 0.1;
    constant.counts.assign(500, 700);
    CHECK_THROWS_AS(estimate_pdf_fit(constant), InsufficientDataError);

    CoincidenceTrace tiny;
    tiny.bin_duration_s = 0.1;
    tiny.counts.assign(50, 700);
    CHECK_THROWS_AS(estimate_pdf_fit(tiny), InsufficientDataError);
}

TEST_CASE("pdf fit is invariant under integer count rescaling") {
    const auto trace = poisson_trace(0.8, 1000.0, 500, 555);
    CoincidenceTrace scaled = trace;
    for (auto& c : scaled.counts) c *= 3;
    const auto a = estimate_pdf_fit(trace);
    const auto b = estimate_pdf_fit(scaled);
    CHECK(b.diagnostics.scale_estimate == Approx(3.0 * a.diagnostics.scale_estimate).epsilon(1e-6));
    CHECK(std::abs(b.visibility - a.visibility) < 1e-9);
}

TEST_CASE("all three estimators agree on noiseless fully-explored traces") {
    for (double v : {0.3, 0.6, 0.95}) {
        const auto trace = grid_fringe_trace(v, 1e6, 2000);
        const double mm = estimate_minmax(trace).visibility;
        const double pdf = estimate_pdf_fit(trace).visibility;
        // Fringe fit needs a model-compatible trace: linear drift.
        CoincidenceTrace linear;
        linear.bin_duration_s = 0.1;
        for (int i = 0; i < 2000; ++i) {
            const double t = i * linear.bin_duration_s;
            linear.counts.push_back(
                static_cast<long long>(std::llround(1e6 * (1.0 + v * std::cos(0.37 * t + 0.2)))));
        }
        const double ff = estimate_fringefit(linear, {0, 2000}).visibility;
        CHECK(std::abs(mm - v) / v < 0.005);
        CHECK(std::abs(pdf - v) / v < 0.005);
        CHECK(std::abs(ff - v) / v < 0.005);
    }
}

TEST_CASE("pdf fit standard error shrinks like one over sqrt(bins)") {
    std::vector<double> log_n, log_se;
    for (std::size_t n : {250u, 500u, 1000u, 2000u}) {
        double se_sum = 0.0;
        const int reps = 8;
        for (int rep = 0; rep < reps; ++rep) {
            const auto trace =
                poisson_trace(0.75, 1000.0, n, derive_stream_seed(9000 + n, rep));
            se_sum += estimate_pdf_fit(trace).std_error;
        }
        log_n.push_back(std::log(static_cast<double>(n)));
        log_se.push_back(std::log(se_sum / reps));
    }
    // Least-squares slope of log(se) vs log(n).
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < log_n.size(); ++i) {
        mx += log_n[i];
        my += log_se[i];
    }
    mx /= log_n.size();
    my /= log_se.size();
    double num = 0, den = 0;
    for (std::size_t i = 0; i < log_n.size(); ++i) {
        num += (log_n[i] - mx) * (log_se[i] - my);
        den += (log_n[i] - mx) * (log_n[i] - mx);
    }
    const double slope = num / den;
    CHECK(slope == Approx(-0.5).margin(0.15));
}

TEST_CASE("poisson-mixture variant matches the plain fit on clean data and beats it under noise") {
    PdfFitOptions ml;
    ml.poisson_mixture = true;

    const auto clean = uniform_grid_trace(0.75, 1e6, 500);
    CHECK(estimate_pdf_fit(clean, ml).visibility == Approx(0.75).margin(2e-3));

    double plain_bias = 0.0, ml_bias = 0.0;
    const int reps = 20;
    for (int rep = 0; rep < reps; ++rep) {
        const auto trace = poisson_trace(0.88, 1000.0, 500, derive_stream_seed(77, rep));
        plain_bias += estimate_pdf_fit(trace).visibility - 0.88;
        ml_bias += estimate_pdf_fit(trace, ml).visibility - 0.88;
    }
    CHECK(std::abs(ml_bias / reps) < std::abs(plain_bias / reps) + 1e-3);
}
