#include <catch2/catch_amalgamated.hpp>

#include "biphoton/units.hpp"

using namespace biphoton;
using Catch::Approx;

TEST_CASE("spectral width conversion matches hand evaluation") {
    // 2 pi c * 4.57 nm / (1560.46 nm)^2
    const double sigma_omega = sigma_lambda_to_omega(4.57e-9, 1560.46e-9);
    CHECK(sigma_omega == Approx(3.535e12).epsilon(1e-3));
}

TEST_CASE("spectral width conversion rejects non-positive input") {
    CHECK_THROWS_AS(sigma_lambda_to_omega(0.0, 1560.46e-9), DomainError);
    CHECK_THROWS_AS(sigma_lambda_to_omega(1e-9, -1.0), DomainError);
    CHECK_THROWS_AS(sigma_omega_to_lambda(0.0, 1560.46e-9), DomainError);
}

TEST_CASE("width conversion round trip is an identity") {
    const double lambda0 = 1560.46e-9;
    for (double sigma : {1e9, 3.5e12, 7.7e12, 2.2e13}) {
        const double back = sigma_lambda_to_omega(sigma_omega_to_lambda(sigma, lambda0), lambda0);
        CHECK(back == Approx(sigma).epsilon(1e-12));
    }
}

TEST_CASE("D to beta2 matches hand evaluation") {
    // -D lambda^2 / (2 pi c) with D = 17 ps/(nm km).
    const double beta2 = dispersion_coeff_to_beta2(dispersion_si_from_ps_nm_km(17.0), 1560.46e-9);
    CHECK(beta2 == Approx(-2.198e-26).epsilon(1e-3));
    CHECK(beta2_ps2_km_from_si(beta2) == Approx(-21.98).epsilon(1e-3));
}

TEST_CASE("D of zero maps to beta2 of zero") {
    CHECK(dispersion_coeff_to_beta2(0.0, 1560.46e-9) == 0.0);
}

TEST_CASE("beta2 back to D recovers the engineering value") {
    const double d = dispersion_ps_nm_km_from_si(beta2_to_dispersion_coeff(-2.198e-26, 1560.46e-9));
    CHECK(d == Approx(17.0).epsilon(1e-3));
}

TEST_CASE("dispersion conversion round trip over random positive inputs") {
    std::uint64_t state = 42;
    auto next_uniform = [&state]() {
        state = state * 6364136223846793005ull + 1442695040888963407ull;
        return static_cast<double>(state >> 11) * 0x1.0p-53;
    };
    for (int i = 0; i < 200; ++i) {
        const double d = 0.1 + 40.0 * next_uniform();
        const double lambda = 800e-9 + 1200e-9 * next_uniform();
        const double round =
            beta2_to_dispersion_coeff(dispersion_coeff_to_beta2(d * 1e-6, lambda), lambda) * 1e6;
        CHECK(round == Approx(d).epsilon(1e-12));
    }
}

TEST_CASE("FWHM to sigma uses the Gaussian factor") {
    CHECK(fwhm_to_stddev(2.354820045) == Approx(1.0).epsilon(1e-9));
    CHECK(stddev_to_fwhm(fwhm_to_stddev(4.5e-9)) == Approx(4.5e-9).epsilon(1e-12));
}
