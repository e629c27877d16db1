#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "biphoton/arcsine.hpp"
#include "biphoton/quadrature.hpp"

#include "oracles.hpp"

using namespace biphoton;
using Catch::Approx;

TEST_CASE("cdf midpoint and edges") {
    // asin amplifies the one-ulp rounding of (2/V)(x - 1/2) near the
    // edges to ~sqrt(eps), hence the 1e-7 margins.
    for (double v : {0.25, 0.5, 0.75, 0.95}) {
        CHECK(arcsine_cdf(0.5, v).probability == Approx(0.5));
        CHECK(arcsine_cdf(arcsine_support_max(v), v).probability == Approx(1.0).margin(1e-7));
        CHECK(arcsine_cdf(arcsine_support_min(v), v).probability == Approx(0.0).margin(1e-7));
    }
}

TEST_CASE("cdf hand value at V = 0.75") {
    // asin(-2/3)/pi + 1/2
    const auto c = arcsine_cdf(0.25, 0.75);
    CHECK_FALSE(c.clamped);
    CHECK(c.probability == Approx(0.2677).margin(5e-5));
    CHECK(c.probability == Approx(std::asin(-2.0 / 3.0) / kPi + 0.5).epsilon(1e-14));
}

TEST_CASE("cdf clamps outside the support and flags it") {
    const auto below = arcsine_cdf(0.05, 0.75);
    CHECK(below.clamped);
    CHECK(below.probability == 0.0);
    const auto above = arcsine_cdf(0.95, 0.75);
    CHECK(above.clamped);
    CHECK(above.probability == 1.0);
}

TEST_CASE("cdf is monotone non-decreasing") {
    for (double v : {0.3, 0.75}) {
        double prev = -1.0;
        for (int i = 0; i <= 200; ++i) {
            const double x = i / 200.0;
            const double p = arcsine_cdf(x, v).probability;
            CHECK(p >= prev);
            prev = p;
        }
    }
}

TEST_CASE("pdf midpoint value") {
    CHECK(arcsine_pdf(0.5, 0.75) == Approx(2.0 / (kPi * 0.75)).epsilon(1e-14));
    CHECK(arcsine_pdf(0.5, 0.75) == Approx(0.8488).margin(5e-5));
}

TEST_CASE("pdf integrates to one over the support") {
    for (double v : {0.25, 0.5, 0.75, 0.9}) {
        // Substitution x = (1 + v sin u)/2 removes the edge singularity:
        // the integrand becomes 1/pi du over (-pi/2, pi/2).
        const auto q = integrate(
            [&](double u) {
                const double x = 0.5 * (1.0 + v * std::sin(u));
                return arcsine_pdf(x, v) * 0.5 * v * std::cos(u);
            },
            -0.5 * kPi, 0.5 * kPi, {1e-12, 20000});
        CHECK(q.value == Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("pdf is the derivative of the cdf") {
    for (double v : {0.25, 0.5, 0.75, 0.95}) {
        const double lo = arcsine_support_min(v);
        const double hi = arcsine_support_max(v);
        for (int i = 1; i <= 19; ++i) {
            const double x = lo + (hi - lo) * i / 20.0;
            const double numeric = oracles::derivative(
                [&](double t) { return arcsine_cdf(t, v).probability; }, x, 1e-7);
            CHECK(arcsine_pdf(x, v) == Approx(numeric).margin(1e-5));
        }
    }
}

TEST_CASE("pdf edge policy") {
    const double edge = arcsine_support_max(0.75);
    CHECK(std::isinf(arcsine_pdf(edge, 0.75)));
    CHECK(arcsine_pdf(1.2, 0.75) == 0.0);
    CHECK_THROWS_AS(arcsine_pdf(edge, 0.75, EdgePolicy::throw_error), DomainError);
}

TEST_CASE("count-space forms rescale by S") {
    const double s = 1063.8;
    const double v = 0.88;
    CHECK(arcsine_count_cdf(s / 2.0, s, v).probability == Approx(0.5));
    CHECK(arcsine_count_pdf(s / 2.0, s, v) == Approx(arcsine_pdf(0.5, v) / s).epsilon(1e-12));
    CHECK_THROWS_AS(arcsine_count_pdf(10.0, 0.0, v), DomainError);
}

TEST_CASE("visibility domain is validated") {
    CHECK_THROWS_AS(arcsine_cdf(0.5, 0.0), DomainError);
    CHECK_THROWS_AS(arcsine_cdf(0.5, 1.2), DomainError);
    CHECK_THROWS_AS(arcsine_pdf(0.5, -0.5), DomainError);
}
