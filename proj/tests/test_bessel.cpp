#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "e2i2/bessel.hpp"

using namespace e2i2;

namespace {

// Integral representation J1(z) = (1/pi) int_0^pi cos(t - z sin t) dt.
// The integrand is periodic-smooth at the endpoints, so the trapezoid rule
// converges spectrally; N = 400 is far past machine precision for z <= 40.
double j1_integral(double z) {
    const int n = 400;
    const double h = M_PI / n;
    double sum = 0.5 * (std::cos(0.0) + std::cos(n * h - z * std::sin(n * h)));
    for (int i = 1; i < n; ++i) {
        const double t = i * h;
        sum += std::cos(t - z * std::sin(t));
    }
    return sum * h / M_PI;
}

} // namespace

TEST_CASE("J1 matches the integral representation over the working range") {
    double worst = 0.0;
    for (int i = 0; i <= 4000; ++i) {
        const double z = 40.0 * i / 4000.0;
        worst = std::max(worst, std::fabs(bessel_j1(z) - j1_integral(z)));
    }
    CHECK(worst < 1e-13);
}

TEST_CASE("pinned first zero agrees with a bisection on J1") {
    double lo = 3.0, hi = 4.5;
    REQUIRE(bessel_j1(lo) > 0.0);
    REQUIRE(bessel_j1(hi) < 0.0);
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        (bessel_j1(mid) > 0.0 ? lo : hi) = mid;
    }
    CHECK(0.5 * (lo + hi) == doctest::Approx(kJ1FirstZero).epsilon(1e-12));
}

TEST_CASE("J1 is odd, jinc is even") {
    for (double z : {0.1, 1.7, 5.3, 11.0}) {
        CHECK(bessel_j1(-z) == doctest::Approx(-bessel_j1(z)));
        CHECK(jinc(-z) == doctest::Approx(jinc(z)));
    }
}

TEST_CASE("jinc limit and small-argument continuity") {
    CHECK(jinc(0.0) == 1.0);
    // Series branch and direct branch must agree across the switch point.
    CHECK(jinc(9.9e-7) == doctest::Approx(jinc(1.1e-6)).epsilon(1e-12));
    CHECK(jinc(0.5) == doctest::Approx(2.0 * bessel_j1(0.5) / 0.5));
    // Zero of the envelope at the first root of J1.
    CHECK(std::fabs(jinc(kJ1FirstZero)) < 1e-14);
}
