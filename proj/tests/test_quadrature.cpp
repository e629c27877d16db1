#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "biphoton/quadrature.hpp"

#include "oracles.hpp"

using namespace biphoton;
using Catch::Approx;

TEST_CASE("polynomial integrals are exact") {
    const auto q = integrate([](double x) { return 3.0 * x * x; }, 0.0, 2.0);
    CHECK(q.value == Approx(8.0).epsilon(1e-13));
}

TEST_CASE("oscillatory integral reaches the requested tolerance") {
    // int_0^10 cos(x^2) dx = sqrt(pi/2) C(10 sqrt(2/pi)) via Fresnel.
    const double expected = std::sqrt(kPi / 2.0) * oracles::fresnel(10.0 * std::sqrt(2.0 / kPi)).c;
    const auto cuts = quadratic_phase_breakpoints(1.0, 1.0, 10.0);
    const auto q = integrate([](double x) { return std::cos(x * x); }, 0.0, 10.0, {1e-10, 20000}, cuts);
    CHECK(q.value == Approx(expected).margin(1e-9));
    CHECK(q.error_estimate <= 1e-10);
}

TEST_CASE("gaussian tail integral") {
    const auto q = integrate([](double x) { return std::exp(-0.5 * x * x); }, -8.0, 8.0);
    CHECK(q.value == Approx(std::sqrt(2.0 * kPi)).epsilon(1e-12));
}

TEST_CASE("reversed limits flip the sign") {
    const auto q = integrate([](double x) { return x; }, 1.0, 0.0);
    CHECK(q.value == Approx(-0.5));
}

TEST_CASE("unreachable tolerance raises a numeric error with the achieved estimate") {
    QuadratureOptions opts;
    opts.abs_tol = 1e-16;
    opts.max_subdivisions = 24;
    try {
        integrate([](double x) { return std::cos(50.0 * x * x); }, 0.0, 10.0, opts);
        FAIL("expected NumericError");
    } catch (const NumericError& e) {
        CHECK(e.achieved_error > 0.0);
    }
}

TEST_CASE("fresnel oracle sanity against published values") {
    // Abramowitz & Stegun table values.
    const auto f05 = oracles::fresnel(0.5);
    CHECK(f05.c == Approx(0.4923442).margin(5e-7));
    CHECK(f05.s == Approx(0.0647324).margin(5e-7));
    const auto f10 = oracles::fresnel(1.0);
    CHECK(f10.c == Approx(0.7798934).margin(5e-7));
    CHECK(f10.s == Approx(0.4382591).margin(5e-7));
    const auto f20 = oracles::fresnel(2.0);
    CHECK(f20.c == Approx(0.4882534).margin(5e-7));
    CHECK(f20.s == Approx(0.3434157).margin(5e-7));
    // Large-argument limit: both tend to 1/2.
    const auto f50 = oracles::fresnel(50.0);
    CHECK(f50.c == Approx(0.5).margin(1e-2));
    CHECK(f50.s == Approx(0.5).margin(1e-2));
}

TEST_CASE("fresnel oracle agrees with direct quadrature of its definition") {
    for (double x : {0.3, 0.9, 1.4, 2.2, 3.7}) {
        const auto f = oracles::fresnel(x);
        const auto qc = integrate([](double t) { return std::cos(0.5 * kPi * t * t); }, 0.0, x,
                                  {1e-12, 20000});
        const auto qs = integrate([](double t) { return std::sin(0.5 * kPi * t * t); }, 0.0, x,
                                  {1e-12, 20000});
        CHECK(f.c == Approx(qc.value).margin(1e-10));
        CHECK(f.s == Approx(qs.value).margin(1e-10));
    }
}
