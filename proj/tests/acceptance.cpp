// End-to-end acceptance gate: one pass/fail line per criterion, exit
// status 0 only when every criterion holds. Tolerances are pinned here.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "e2i2/bessel.hpp"
#include "e2i2/conversion.hpp"
#include "e2i2/correlation.hpp"
#include "e2i2/estimation.hpp"
#include "e2i2/montecarlo.hpp"

using namespace e2i2;

namespace {

constexpr double kLy = 9460730472580800.0;
constexpr double kDistance = 8.611 * kLy;
constexpr double kLambda1 = 292e-9;
constexpr double kLambda2 = 828e-9;
constexpr double kDiscRadius = 2e9;

int g_failures = 0;

void report(int criterion, bool ok, const char* what, const std::string& detail) {
    std::printf("%s  criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", criterion,
                what, detail.c_str());
    if (!ok) ++g_failures;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

DiscSource unit_disc() { return {{0.0, 0.0, kDistance}, kDiscRadius, kLambda1, 1.0}; }

std::vector<SourceModel> two_star() {
    return {SourceModel{DiscSource{{-8e9, 0.0, kDistance}, kDiscRadius, kLambda1, 1.0}},
            SourceModel{DiscSource{{8e9, 0.0, kDistance}, kDiscRadius, kLambda2, 1.0}}};
}

// 1. The numeric disc integral reproduces the closed-form envelope to
//    1e-6 across the first several oscillation rings, in bounded time.
void criterion_disc_quadrature() {
    const auto t0 = std::chrono::steady_clock::now();
    const SourceModel src{unit_disc()};
    const double theta = unit_disc().angular_diameter_small_angle();
    const double sep_at_z20 = 20.0 * kLambda1 / (M_PI * theta);
    double worst = 0.0;
    for (int i = 0; i <= 200; ++i) {
        const double sep = sep_at_z20 * i / 200.0;
        const Baseline bl{{sep, 0.0, 0.0}, {0.0, 0.0, 0.0}};
        const auto a = gamma_analytic(src, bl);
        const auto q = gamma_quadrature(src, bl);
        const double err = std::abs(a.envelope - q.envelope) /
                           std::max(1.0, std::abs(a.envelope));
        worst = std::max(worst, err);
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report(1, worst <= 1e-6 && secs < 10.0,
           "disc quadrature matches the closed-form envelope",
           "max rel err " + fmt(worst) + ", " + fmt(secs) + " s");
}

// 2. The single-disc correlation has the right shape and its first zero
//    recovers the angular diameter to 0.1%.
void criterion_single_disc_shape() {
    const SourceModel src{unit_disc()};
    const auto curve = sweep_curve({src}, {0.0, 20.0, 400, 1.0, 0.0}, Variant::single);
    const double peak = curve.points.front().value;
    double tail = 0.0;
    for (int i = 300; i < 400; ++i) tail = std::max(tail, std::fabs(curve.points[i].value - 1.0));
    const auto est = estimate_diameter(curve, kLambda1);
    const double theta_true = unit_disc().angular_diameter_small_angle();
    const double rho_true = kJ1FirstZero * kLambda1 / (M_PI * theta_true);
    const double rho_err = std::fabs(est.first_zero_m - rho_true) / rho_true;
    const double theta_err = std::fabs(est.angular_diameter - theta_true) / theta_true;
    const bool ok = std::fabs(peak - 2.0) < 1e-9 && tail < 0.05 && rho_err < 1e-3 &&
                    theta_err < 1e-3;
    report(2, ok, "single-disc curve peaks at 2, settles at 1, sizes the disc",
           "first-zero err " + fmt(rho_err) + ", diameter err " + fmt(theta_err));
}

// 3. The full correlation splits exactly into the per-color part plus the
//    cross-color part, and only the cross part oscillates.
void criterion_decomposition() {
    const auto sources = two_star();
    const BaselineSweep sweep{0.0, 48.0, 193, 1.0, 0.0};
    double worst = 0.0;
    CorrelationCurve delta_curve, base_curve;
    delta_curve.variant = Variant::delta;
    base_curve.variant = Variant::no_e2i2;
    for (int i = 0; i < sweep.samples; ++i) {
        const auto bl = sweep.at(i);
        const double full = g2_e2i2(sources, bl);
        const double base = g2_no_e2i2(sources, bl);
        const double delta = g2_delta(sources, bl);
        worst = std::max(worst, std::fabs(full - (base + delta)) / std::fabs(full));
        delta_curve.points.push_back({sweep.separation_at(i), delta, 0.0, false});
        base_curve.points.push_back({sweep.separation_at(i), base, 0.0, false});
    }
    const auto delta_peak = analyze_spectrum(delta_curve.values(), delta_curve.spacing());
    const auto base_peak = analyze_spectrum(base_curve.values(), base_curve.spacing());
    const bool base_quiet = !base_peak.found || base_peak.snr_db < 3.0;
    const bool ok = worst <= 1e-12 && delta_peak.found && delta_peak.snr_db > 20.0 &&
                    base_quiet;
    report(3, ok, "correlation decomposes; only the cross-color term oscillates",
           "identity err " + fmt(worst) + ", cross SNR " + fmt(delta_peak.snr_db) +
               " dB, per-color SNR " +
               fmt(base_peak.found ? base_peak.snr_db : 0.0) + " dB");
}

// 4. The oscillation frequency obeys nu = d (1/l1 + 1/l2) / (2 L): the
//    recovered separation is within 1% analytically and 5% from sampling.
void criterion_frequency_law() {
    const auto sources = two_star();
    const double d_true = 1.6e10;
    const BaselineSweep sweep{0.0, 48.0, 97, 1.0, 0.0};

    const auto analytic = sweep_curve(sources, sweep, Variant::delta);
    const auto est = estimate_separation(analytic, kLambda1, kLambda2, kDistance);
    const double err_analytic = std::fabs(est.separation_m - d_true) / d_true;

    McScenario mc;
    mc.sources = sources;
    mc.sweep = sweep;
    mc.method = McMethod::single_crystal;
    const auto on = histogram_to_curve(run_trials(mc, 1000000, 41));
    mc.method = McMethod::none;
    const auto off = histogram_to_curve(run_trials(mc, 1000000, 43));
    CorrelationCurve sampled;
    sampled.variant = Variant::delta;
    for (size_t i = 0; i < on.points.size(); ++i) {
        sampled.points.push_back({on.points[i].separation,
                                  on.points[i].value - off.points[i].value, 0.0,
                                  false});
    }
    const auto est_mc = estimate_separation(sampled, kLambda1, kLambda2, kDistance);
    const double err_mc = std::fabs(est_mc.separation_m - d_true) / d_true;

    report(4, err_analytic < 0.01 && err_mc < 0.05,
           "separation recovered from the oscillation frequency",
           "analytic err " + fmt(err_analytic) + ", sampled err " + fmt(err_mc));
}

// 5. The conversion-and-filter pipeline at balanced mixing reproduces the
//    two-detector interference rate times the 1/4 post-selection factor.
void criterion_pipeline_quarter() {
    std::mt19937_64 rng(51);
    std::uniform_real_distribution<double> ang(-M_PI, M_PI);
    const double m = 1.0 / std::sqrt(2.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        AmplitudeSet amps;
        amps.d_1a = std::polar(m, ang(rng));
        amps.d_1b = std::polar(m, ang(rng));
        amps.d_2a = std::polar(m, ang(rng));
        amps.d_2b = std::polar(m, ang(rng));
        const ConversionUnitary u{M_PI / 4.0, ang(rng)};
        const double expected = 0.25 * hbt_coincidence(amps, CoincidenceMode::e2i2);
        worst = std::max(worst,
                         std::fabs(single_crystal_coincidence(amps, u) - expected));
    }
    report(5, worst <= 1e-12, "conversion pipeline equals interference rate / 4",
           "max abs err " + fmt(worst));
}

// 6. The reference-source fourfold rate equals the two-pathway sum for
//    random propagation phases.
void criterion_reference_fourfold() {
    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> ang(-M_PI, M_PI);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        AmplitudeSet ph;
        const double p1a = ang(rng), p1b = ang(rng), p2a = ang(rng), p2b = ang(rng);
        const double p3ar = ang(rng), p3br = ang(rng), p3ab = ang(rng), p3bb = ang(rng);
        ph.d_1a = std::polar(1.0, p1a);
        ph.d_1b = std::polar(1.0, p1b);
        ph.d_2a = std::polar(1.0, p2a);
        ph.d_2b = std::polar(1.0, p2b);
        ph.d_3a_red = std::polar(1.0, p3ar);
        ph.d_3b_red = std::polar(1.0, p3br);
        ph.d_3a_blue = std::polar(1.0, p3ab);
        ph.d_3b_blue = std::polar(1.0, p3bb);
        const cd path1 = 0.25 * std::polar(1.0, p1a + p2b + p3ab + p3br);
        const cd path2 = 0.25 * std::polar(1.0, p2a + p1b + p3ar + p3bb);
        worst = std::max(worst,
                         std::fabs(reference_fourfold(ph) - std::norm(path1 + path2)));
    }
    AmplitudeSet flat;
    flat.d_1a = flat.d_1b = flat.d_2a = flat.d_2b = cd{1.0, 0.0};
    flat.d_3a_red = flat.d_3b_red = flat.d_3a_blue = flat.d_3b_blue = cd{1.0, 0.0};
    const bool quarter = reference_fourfold(flat) == 0.25;
    report(6, worst <= 1e-12 && quarter,
           "reference fourfold rate equals the pathway sum",
           "max abs err " + fmt(worst) + ", zero-phase rate 1/4: " +
               (quarter ? "yes" : "no"));
}

// 7. The staggered two-crystal stage post-selects with probability
//    (1 + cos delta) / 2 over a full phase sweep.
void criterion_two_crystal() {
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double delta = -M_PI + 2.0 * M_PI * (i + 0.5) / 100.0;
        std::array<cd, PhotonState::kDim> amps{};
        amps[0] = cd{1.0 / std::sqrt(2.0), 0.0};
        amps[4] = std::polar(1.0 / std::sqrt(2.0), delta);
        const auto r = two_crystal_evolve(PhotonState::from_amplitudes(amps));
        worst = std::max(worst, std::fabs(r.success_probability -
                                          0.5 * (1.0 + std::cos(delta))));
    }
    report(7, worst <= 1e-12, "two-crystal post-selection follows (1+cos)/2",
           "max abs err " + fmt(worst));
}

// 8. The sampler agrees with the analytic curve within 3 sigma at almost
//    every baseline, and its error shrinks like 1/sqrt(trials).
void criterion_sampler_agreement() {
    const auto t0 = std::chrono::steady_clock::now();
    McScenario mc;
    mc.sources = {SourceModel{unit_disc()}};
    mc.sweep = {0.0, 12.0, 25, 1.0, 0.0};
    mc.method = McMethod::none;

    std::vector<double> expected(25);
    for (int i = 0; i < 25; ++i) {
        expected[i] = g2_single(mc.sources[0], mc.sweep.at(i));
    }

    auto rms_err = [&](const CorrelationCurve& c) {
        double acc = 0.0;
        for (int i = 0; i < 25; ++i) {
            acc += (c.points[i].value - expected[i]) * (c.points[i].value - expected[i]);
        }
        return std::sqrt(acc / 25.0);
    };

    const auto hi = histogram_to_curve(run_trials(mc, 1000000, 61));
    int within = 0;
    for (int i = 0; i < 25; ++i) {
        const auto& p = hi.points[i];
        if (!p.empty && std::fabs(p.value - expected[i]) <= 3.0 * p.stderror) ++within;
    }
    const auto lo = histogram_to_curve(run_trials(mc, 10000, 67));
    const double ratio = rms_err(lo) / rms_err(hi);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const bool ok = within >= 24 && ratio > 7.0 && ratio < 13.0 && secs < 300.0;
    report(8, ok, "sampler matches the analytic curve and scales as 1/sqrt(n)",
           std::to_string(within) + "/25 within 3 sigma, error ratio " + fmt(ratio) +
               ", " + fmt(secs) + " s");
}

// 9. The conversion map conserves probability for randomized states and
//    angles.
void criterion_unitarity() {
    std::mt19937_64 rng(73);
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> ang(-M_PI, M_PI);
    double worst = 0.0, worst_split = 0.0;
    for (int i = 0; i < 10000; ++i) {
        std::array<cd, PhotonState::kDim> amps;
        for (auto& a : amps) a = cd{g(rng), g(rng)};
        const auto state = PhotonState::from_amplitudes(amps);
        const ConversionUnitary u{ang(rng), ang(rng)};
        const auto out = apply_conversion(state, u);
        worst = std::max(worst, std::fabs(out.norm_squared() - 1.0));

        // Kept plus discarded probability must account for the whole state.
        double kept = 0.0;
        for (auto keep : {WavelengthMode::l1, WavelengthMode::l2, WavelengthMode::l3}) {
            kept += filter_project(out, keep).success_probability;
        }
        worst_split = std::max(worst_split, std::fabs(kept - 1.0));
    }
    double worst_pump = 0.0;
    for (double nbar : {0.0, 0.5, 1.0, 10.0, 1e4, 1e8}) {
        worst_pump = std::max(worst_pump, std::fabs(pump_fidelity({nbar, 0.0, 0.0}) -
                                                    (1.0 - 1.0 / (1.0 + nbar))));
    }
    report(9, worst <= 1e-12 && worst_split <= 1e-12 && worst_pump == 0.0,
           "conversion conserves probability end to end",
           "max norm drift " + fmt(worst) + ", max split drift " + fmt(worst_split));
}

} // namespace

int main() {
    criterion_disc_quadrature();
    criterion_single_disc_shape();
    criterion_decomposition();
    criterion_frequency_law();
    criterion_pipeline_quarter();
    criterion_reference_fourfold();
    criterion_two_crystal();
    criterion_sampler_agreement();
    criterion_unitarity();
    if (g_failures > 0) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all 9 criteria passed\n");
    return 0;
}
