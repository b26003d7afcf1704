#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "e2i2/bessel.hpp"
#include "e2i2/estimation.hpp"

using namespace e2i2;

namespace {

const double kLy = 9460730472580800.0;
const double kDistance = 8.611 * kLy;
const double kLambda1 = 292e-9;
const double kLambda2 = 828e-9;

CorrelationCurve synth_curve(int n, double stop, Variant variant,
                             double (*fn)(double)) {
    CorrelationCurve c;
    c.variant = variant;
    for (int i = 0; i < n; ++i) {
        const double s = stop * i / (n - 1);
        c.points.push_back({s, fn(s), 0.0, false});
    }
    return c;
}

} // namespace

TEST_CASE("spectral peak recovers a synthetic tone") {
    const double freq = 0.455;
    std::vector<double> values;
    for (int i = 0; i < 256; ++i) {
        values.push_back(0.3 + std::cos(2.0 * M_PI * freq * i * 0.25));
    }
    const auto peak = analyze_spectrum(values, 0.25);
    REQUIRE(peak.found);
    CHECK(peak.frequency == doctest::Approx(freq).epsilon(1e-3));
    CHECK(peak.snr_db > 20.0);
}

TEST_CASE("monotone input yields no interior spectral peak") {
    std::vector<double> values;
    for (int i = 0; i < 128; ++i) values.push_back(std::exp(-0.05 * i));
    const auto peak = analyze_spectrum(values, 0.5);
    if (peak.found) CHECK(peak.snr_db < 6.0);
}

TEST_CASE("aliased expectations are refused up front") {
    std::vector<double> values(64, 1.0);
    EstimationOptions opts;
    opts.max_expected_frequency = 3.0; // Nyquist here is 1 cycle/m
    CHECK_THROWS_AS(analyze_spectrum(values, 0.5, opts), estimation_error);
}

TEST_CASE("angular diameter round-trips through the envelope first zero") {
    const double theta = 2.0 * 2e9 / kDistance;
    static double s_theta;
    s_theta = theta;
    auto model = [](double rho) {
        const double z = M_PI * s_theta * rho / kLambda1;
        return 1.0 + jinc(z) * jinc(z);
    };
    const auto curve = synth_curve(400, 20.0, Variant::single, model);
    const auto est = estimate_diameter(curve, kLambda1);
    const double rho_star = kJ1FirstZero * kLambda1 / (M_PI * theta);
    CHECK(est.first_zero_m == doctest::Approx(rho_star).epsilon(1e-3));
    CHECK(est.angular_diameter == doctest::Approx(theta).epsilon(1e-3));
    CHECK(est.uncertainty_m > 0.0);
}

TEST_CASE("diameter estimation reports an insufficient sweep") {
    auto flat = [](double) { return 1.5; };
    CHECK_THROWS_AS(estimate_diameter(synth_curve(64, 3.0, Variant::single, flat),
                                      kLambda1),
                    estimation_error);
}

TEST_CASE("separation round-trips through the cross-term oscillation") {
    const double d = 1.6e10;
    const double inv_sum = 0.5 * (1.0 / kLambda1 + 1.0 / kLambda2);
    static double s_freq;
    s_freq = d * inv_sum / kDistance;
    auto model = [](double rho) { return 2.0 * std::cos(2.0 * M_PI * s_freq * rho); };
    const auto curve = synth_curve(401, 100.0, Variant::delta, model);
    const auto est = estimate_separation(curve, kLambda1, kLambda2, kDistance);
    CHECK(est.separation_m == doctest::Approx(d).epsilon(0.01));
    CHECK(est.snr_db > 6.0);
    CHECK(est.confidence_width_m > 0.0);
}

TEST_CASE("a flat delta curve raises the no-oscillation error") {
    auto flat = [](double) { return 0.0; };
    const auto curve = synth_curve(128, 50.0, Variant::delta, flat);
    CHECK_THROWS_WITH_AS(
        estimate_separation(curve, kLambda1, kLambda2, kDistance),
        "no oscillation detected in the delta curve", estimation_error);
}

TEST_CASE("center vectors are recovered from a three-source grid") {
    // Three pairwise cross terms with distinct spatial frequencies and
    // well-separated magnitudes.
    const int nx = 48, ny = 48;
    const double dx = 1.0, dy = 1.0;
    struct Tone {
        double fx, fy, amp;
    };
    const std::vector<Tone> tones = {
        {6.0 / (nx * dx), 4.0 / (ny * dy), 3.0},
        {11.0 / (nx * dx), -7.0 / (ny * dy), 2.0},
        {17.0 / (nx * dx), 12.0 / (ny * dy), 1.0},
    };
    DeltaGrid grid;
    grid.nx = nx;
    grid.ny = ny;
    grid.dx = dx;
    grid.dy = dy;
    grid.values.resize(nx * ny);
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            double v = 0.0;
            for (const auto& t : tones) {
                v += t.amp * std::cos(2.0 * M_PI * (t.fx * ix * dx + t.fy * iy * dy));
            }
            grid.values[iy * nx + ix] = v;
        }
    }
    const auto report = extract_center_vectors(grid, 3, kDistance);
    REQUIRE(report.vectors.size() == 3);
    CHECK(report.ambiguous_pairs.empty());
    for (size_t i = 0; i < 3; ++i) {
        const auto& cv = report.vectors[i];
        REQUIRE(cv.resolved);
        const double ex = tones[i].fx * kDistance;
        const double ey = tones[i].fy * kDistance;
        const bool direct = std::fabs(cv.vx - ex) < 0.1 * std::fabs(ex) &&
                            std::fabs(cv.vy - ey) < 0.1 * std::fabs(ex);
        const bool mirrored = std::fabs(cv.vx + ex) < 0.1 * std::fabs(ex) &&
                              std::fabs(cv.vy + ey) < 0.1 * std::fabs(ex);
        CHECK((direct || mirrored)); // sign is inherently ambiguous
        const auto rev = cv.reversed();
        CHECK(rev.vx == -cv.vx);
        CHECK(rev.vy == -cv.vy);
        CHECK(rev.p == cv.q);
    }
}

TEST_CASE("missing grid peaks leave pairs unresolved rather than guessed") {
    DeltaGrid grid;
    grid.nx = 16;
    grid.ny = 16;
    grid.dx = 1.0;
    grid.dy = 1.0;
    grid.values.assign(256, 0.0);
    const auto report = extract_center_vectors(grid, 3, kDistance);
    REQUIRE(report.vectors.size() == 3);
    for (const auto& cv : report.vectors) CHECK_FALSE(cv.resolved);
}

TEST_CASE("grid input is validated") {
    DeltaGrid bad;
    bad.nx = 4;
    bad.ny = 4;
    bad.dx = 1.0;
    bad.dy = 1.0;
    bad.values.assign(16, 0.0);
    CHECK_THROWS_AS(extract_center_vectors(bad, 2, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(extract_center_vectors(bad, 1, 1.0), std::invalid_argument);
}
