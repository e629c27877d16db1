#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "biphoton/gaussian_analytics.hpp"
#include "biphoton/interferogram.hpp"

#include "oracles.hpp"

using namespace biphoton;
using Catch::Approx;

namespace {
constexpr double kLambda0 = 1560.46e-9;

DispersionProfile profile_with(double beta0, double beta1, double beta2, double beta3, double length) {
    return DispersionProfile(length, {beta0, beta1, beta2, beta3});
}
} // namespace

TEST_CASE("noon phase plugs directly into the even-order sum") {
    const auto p = profile_with(0.0, 0.0, 1.0, 0.0, 1.0);
    CHECK(noon_phase(p, 2.0) == Approx(4.0)); // L (2 b0 + b2 dw^2) = 1*(0 + 1*4)
}

TEST_CASE("noon phase at zero detuning is the carrier phase") {
    const auto p = profile_with(3.0, 5.0, -2e-26, 1e-40, 2.4);
    CHECK(noon_phase(p, 0.0) == Approx(2.0 * 3.0 * 2.4));
}

TEST_CASE("noon phase is exactly invariant under odd-order coefficients") {
    const auto base = profile_with(1.0, 0.0, 2e-26, 0.0, 2.4);
    const auto odd = profile_with(1.0, 5.0, 2e-26, 7e-30, 2.4);
    for (double dw : {0.0, 1e12, 3e12, 8e12}) {
        CHECK(noon_phase(base, dw) == noon_phase(odd, dw));
    }
}

TEST_CASE("gaussian visibility at the inflexion gamma matches the closed value") {
    const double sigma = 3e12;
    const double length = 2.4;
    const double gamma = std::sqrt(2.0 / 3.0);
    const double beta2 = gamma / (2.0 * sigma * sigma * length);
    const auto s = SpectralDensity::gaussian(sigma, kLambda0);
    const auto vp = franson_visibility_phase(s, beta2, length);
    CHECK(vp.visibility == Approx(std::pow(5.0 / 3.0, -0.25)).margin(1e-8));
    CHECK(vp.visibility == Approx(0.8801).margin(1e-4));
}

TEST_CASE("zero dispersion gives unit visibility and zero phase") {
    const auto s = SpectralDensity::rectangular(5e12, kLambda0);
    const auto vp = franson_visibility_phase(s, 0.0, 2.4);
    CHECK(vp.visibility == Approx(1.0).margin(1e-10));
    CHECK(vp.phase == Approx(0.0).margin(1e-10));
}

TEST_CASE("rectangular spectrum matches the Fresnel oracle") {
    const double w = 6e12;
    const double length = 4.5;
    for (double u : {0.25, 0.5, 1.0, 2.0, 3.5, 5.0}) {
        // u = W sqrt(2 b2 L / pi)  =>  b2 = pi u^2 / (2 W^2 L).
        const double beta2 = kPi * u * u / (2.0 * w * w * length);
        const auto s = SpectralDensity::rectangular(w, kLambda0);
        const auto vp = franson_visibility_phase(s, beta2, length);
        CHECK(vp.visibility == Approx(oracles::rectangular_visibility(u)).margin(1e-6));
    }
}

TEST_CASE("gaussian quadrature visibility matches the closed form over gamma") {
    const double sigma = 2.5e12;
    const double length = 2.4;
    const auto s = SpectralDensity::gaussian(sigma, kLambda0);
    for (double gamma : {0.0, 0.05, 0.3, 0.8164965809277260, 1.0, 2.0, 5.0, 10.0}) {
        const double beta2 = gamma / (2.0 * sigma * sigma * length);
        const auto vp = franson_visibility_phase(s, beta2, length);
        CHECK(vp.visibility == Approx(visibility_closed_form(gamma)).margin(1e-8));
    }
}

TEST_CASE("gaussian oscillation phase equals atan(gamma)/2") {
    const double sigma = 2.5e12;
    const double length = 2.4;
    const auto s = SpectralDensity::gaussian(sigma, kLambda0);
    for (double gamma : {0.2, 0.8164965809277260, 1.5, 4.0}) {
        const double beta2 = gamma / (2.0 * sigma * sigma * length);
        const auto vp = franson_visibility_phase(s, beta2, length);
        CHECK(vp.phase == Approx(0.5 * std::atan(gamma)).margin(1e-8));
    }
}

TEST_CASE("visibility is even in beta2") {
    const auto s = SpectralDensity::gaussian(3e12, kLambda0);
    const auto plus = franson_visibility_phase(s, 2.2e-26, 2.4);
    const auto minus = franson_visibility_phase(s, -2.2e-26, 2.4);
    CHECK(plus.visibility == Approx(minus.visibility).margin(1e-10));
    CHECK(plus.phase == Approx(-minus.phase).margin(1e-10));
}

TEST_CASE("visibility is non-increasing in |beta2| L") {
    // The gaussian curve is globally monotone. The rectangular one ripples
    // once the Cornu spiral starts winding (u > ~2), so its check stops at
    // the first Fresnel oscillation.
    const auto gauss = SpectralDensity::gaussian(3e12, kLambda0);
    double prev = 2.0;
    for (int i = 0; i <= 28; ++i) {
        const double beta2 = 1e-27 * std::pow(1.45, i);
        const double v = franson_visibility_phase(gauss, beta2, 2.4).visibility;
        CHECK(v <= prev + 1e-9);
        prev = v;
    }

    const double w = 5e12;
    const auto rect = SpectralDensity::rectangular(w, kLambda0);
    prev = 2.0;
    for (int i = 0; i <= 20; ++i) {
        const double u = 0.09 * (i + 1); // up to u = 1.89
        const double beta2 = kPi * u * u / (2.0 * w * w * 2.4);
        const double v = franson_visibility_phase(rect, beta2, 2.4).visibility;
        CHECK(v <= prev + 1e-9);
        prev = v;
    }
}

TEST_CASE("cauchy-schwarz bound holds for randomized tabulated spectra") {
    std::uint64_t state = 7;
    auto next_uniform = [&state]() {
        state = state * 6364136223846793005ull + 1442695040888963407ull;
        return static_cast<double>(state >> 11) * 0x1.0p-53;
    };
    for (int trial = 0; trial < 12; ++trial) {
        std::vector<TabulatedPoint> pts;
        const double span = 2e12 + 8e12 * next_uniform();
        const int n = 15 + static_cast<int>(20 * next_uniform());
        for (int i = 0; i <= n; ++i) {
            const double w = -span + 2.0 * span * i / n;
            pts.push_back({w, 0.05 + next_uniform()});
        }
        const auto s = SpectralDensity::tabulated(pts, kLambda0);
        const double beta2 = (0.1 + 4.0 * next_uniform()) * 1e-26;

        // Raw quadrature moments, before any clamping in the library path.
        const double wmax = s.support_max();
        std::vector<double> cuts = quadratic_phase_breakpoints(beta2, 2.4, wmax);
        for (double g : s.grid()) cuts.push_back(g);
        const double c = 2.0 * integrate([&](double w) { return s.density(w) * std::cos(beta2 * w * w * 2.4); },
                                         0.0, wmax, {5e-11, 20000}, cuts)
                                   .value;
        const double sn = 2.0 * integrate([&](double w) { return s.density(w) * std::sin(beta2 * w * w * 2.4); },
                                          0.0, wmax, {5e-11, 20000}, cuts)
                                    .value;
        CHECK(std::hypot(c, sn) <= 1.0 + 1e-12);
    }
}

TEST_CASE("interferogram constant term and zero-delay HOM peak") {
    const auto s = SpectralDensity::gaussian(3e12, kLambda0);
    const auto d = coincidence_interferogram(s, profile_with(0.0, 0.0, 1e-26, 0.0, 2.4));
    CHECK(d.constant_term == 0.5);
    CHECK(d.hom_term == Approx(1.0).margin(1e-9));
}

TEST_CASE("gaussian HOM term matches the analytic characteristic function") {
    const double sigma = 3e12;
    const auto s = SpectralDensity::gaussian(sigma, kLambda0);
    for (double tau : {1e-13, 4e-13, 1e-12}) {
        const double beta1 = tau / 2.0 / 2.4; // beta1 L = tau/2
        const auto d = coincidence_interferogram(s, profile_with(0.0, beta1, 1e-27, 0.0, 2.4));
        CHECK(d.hom_term == Approx(std::exp(-0.5 * sigma * sigma * tau * tau)).margin(1e-8));
    }
}

TEST_CASE("franson term does not depend on beta1") {
    const auto s = SpectralDensity::gaussian(3e12, kLambda0);
    const auto ref = coincidence_interferogram(s, profile_with(0.0, 1e-12, 2.2e-26, 0.0, 2.4));
    for (double beta1 : {1e-11, 1e-10, 1e-9}) {
        const auto d = coincidence_interferogram(s, profile_with(0.0, beta1, 2.2e-26, 0.0, 2.4));
        CHECK(d.franson_term.visibility == Approx(ref.franson_term.visibility).margin(1e-12));
        CHECK(d.franson_term.phase == Approx(ref.franson_term.phase).margin(1e-12));
    }
}

TEST_CASE("odd orders leave the franson visibility untouched, beta3 moves the HOM term") {
    const auto s = SpectralDensity::gaussian(3e12, kLambda0);
    const auto base = coincidence_interferogram(s, profile_with(0.0, 0.0, 2.2e-26, 0.0, 2.4));
    const auto with_beta3 = coincidence_interferogram(s, profile_with(0.0, 0.0, 2.2e-26, 5e-40, 2.4));
    CHECK(with_beta3.franson_term.visibility == Approx(base.franson_term.visibility).margin(1e-12));
    CHECK(std::abs(with_beta3.hom_term) <= 1.0 + 1e-9);
}

TEST_CASE("higher even orders enter only with the extended flag") {
    const auto s = SpectralDensity::gaussian(3e12, kLambda0);
    DispersionProfile p(2.4, {0.0, 0.0, 2.2e-26, 0.0, 5e-52});
    const auto def = franson_visibility_phase(s, p, false);
    const auto ext = franson_visibility_phase(s, p, true);
    const auto trunc = franson_visibility_phase(s, 2.2e-26, 2.4);
    CHECK(def.visibility == Approx(trunc.visibility).margin(1e-12));
    CHECK(ext.visibility != Approx(def.visibility).margin(1e-6));
}
