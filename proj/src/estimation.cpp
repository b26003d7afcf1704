#include "e2i2/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

#include "e2i2/bessel.hpp"

namespace e2i2 {

namespace {

std::vector<double> window_weights(const std::string& window, int n) {
    std::vector<double> w(n, 1.0);
    if (window == "hann") {
        for (int i = 0; i < n; ++i) {
            w[i] = 0.5 - 0.5 * std::cos(2.0 * M_PI * i / (n - 1));
        }
    } else if (window != "rect") {
        throw std::invalid_argument("unknown window '" + window + "'");
    }
    return w;
}

double parabolic_offset(double lm, double lc, double lp) {
    const double denom = lm - 2.0 * lc + lp;
    if (denom >= 0.0) return 0.0; // not a proper maximum
    return std::clamp(0.5 * (lm - lp) / denom, -0.5, 0.5);
}

} // namespace

SpectrumPeak analyze_spectrum(const std::vector<double>& values, double spacing,
                              const EstimationOptions& opts) {
    const int n = static_cast<int>(values.size());
    if (n < 8) throw std::invalid_argument("spectrum needs at least 8 samples");
    if (!(spacing > 0.0)) throw std::invalid_argument("spacing must be positive");

    if (opts.max_expected_frequency > 0.0 &&
        opts.max_expected_frequency > 0.5 / spacing) {
        throw estimation_error(
            "expected frequency exceeds the Nyquist limit of the baseline grid; "
            "refusing to estimate from an aliased curve");
    }

    // The curve lives on separations >= 0 but is even in the separation, so
    // taper with a half window and mirror before transforming. Without the
    // mirror the half-line transform picks up a band-edge artifact that
    // drags the peak off the true frequency.
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) {
        double w = 1.0;
        if (opts.window == "hann") {
            w = 0.5 + 0.5 * std::cos(M_PI * i / (n - 1));
        } else if (opts.window != "rect") {
            throw std::invalid_argument("unknown window '" + opts.window + "'");
        }
        x[i] = values[i] * w;
    }
    const int m = 2 * n - 2;
    std::vector<double> ext(m);
    for (int i = 0; i < n; ++i) ext[i] = x[i];
    for (int j = 1; j < n - 1; ++j) ext[n - 1 + j] = x[n - 1 - j];
    const double mean = std::accumulate(ext.begin(), ext.end(), 0.0) / m;
    for (auto& v : ext) v -= mean;

    const int n_bins = n - 1;
    std::vector<double> power(n_bins + 1, 0.0);
    for (int k = 0; k <= n_bins; ++k) {
        std::complex<double> acc{0.0, 0.0};
        const double omega = -2.0 * M_PI * k / m;
        for (int i = 0; i < m; ++i) {
            acc += ext[i] * std::polar(1.0, omega * i);
        }
        power[k] = std::norm(acc);
    }

    SpectrumPeak peak;
    peak.bin_width = 1.0 / (m * spacing);

    // Dominant local maximum strictly inside the positive-frequency band.
    int best = -1;
    for (int k = 2; k < n_bins; ++k) {
        if (power[k] >= power[k - 1] && power[k] >= power[k + 1]) {
            if (best < 0 || power[k] > power[best]) best = k;
        }
    }
    if (best < 0 || power[best] <= 0.0) return peak;

    double bg = 0.0;
    int bg_count = 0;
    for (int k = 2; k <= n_bins; ++k) {
        if (std::abs(k - best) <= 6) continue;
        bg += power[k];
        ++bg_count;
    }
    const double bg_mean = bg_count > 0 ? bg / bg_count : 0.0;
    peak.snr_db = bg_mean > 0.0 ? 10.0 * std::log10(power[best] / bg_mean) : 300.0;
    peak.power = power[best];

    // Sub-bin refinement on log power.
    const double offset = parabolic_offset(std::log(power[best - 1]),
                                           std::log(power[best]),
                                           std::log(power[best + 1]));
    peak.frequency = (best + offset) * peak.bin_width;
    peak.found = true;
    return peak;
}

DiameterEstimate estimate_diameter(const CorrelationCurve& curve, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("wavelength must be positive");
    const int n = static_cast<int>(curve.points.size());
    if (n < 8) throw std::invalid_argument("curve has too few samples");
    const double h = curve.spacing();

    // Plateau from the tail quarter of the sweep.
    std::vector<double> tail;
    for (int i = 3 * n / 4; i < n; ++i) tail.push_back(curve.points[i].value);
    std::nth_element(tail.begin(), tail.begin() + tail.size() / 2, tail.end());
    const double plateau = tail[tail.size() / 2];

    std::vector<double> env(n);
    double env_peak = 0.0;
    for (int i = 0; i < n; ++i) {
        env[i] = curve.points[i].value - plateau;
        env_peak = std::max(env_peak, env[i]);
    }
    if (env_peak <= 0.0) {
        throw estimation_error("insufficient baseline span: no envelope peak");
    }

    // First dip of the envelope toward zero; the Airy envelope touches
    // rather than crosses, so "zero" is a noise-aware threshold.
    int first = -1;
    for (int i = 1; i < n; ++i) {
        const double noise = curve.has_stderr ? 3.0 * curve.points[i].stderror : 0.0;
        if (env[i] <= 0.02 * env_peak + noise) {
            first = i;
            break;
        }
    }
    if (first < 0) {
        throw estimation_error(
            "insufficient baseline span: envelope never reaches zero within the "
            "sampled range");
    }

    // Walk to the local minimum and refine by a parabola through its
    // neighbors.
    int j = first;
    while (j + 1 < n && env[j + 1] < env[j]) ++j;
    double rho = curve.points[j].separation;
    if (j > 0 && j + 1 < n) {
        const double denom = env[j - 1] - 2.0 * env[j] + env[j + 1];
        if (denom > 0.0) {
            const double off =
                std::clamp(0.5 * (env[j - 1] - env[j + 1]) / denom, -1.0, 1.0);
            rho += off * h;
        }
    }
    if (!(rho > 0.0)) {
        throw estimation_error("degenerate first-zero location");
    }

    DiameterEstimate est;
    est.first_zero_m = rho;
    est.angular_diameter = kJ1FirstZero * lambda / (M_PI * rho);
    est.uncertainty_m = h;
    return est;
}

SeparationEstimate estimate_separation(const CorrelationCurve& delta_curve,
                                       double lambda1, double lambda2,
                                       double distance_l,
                                       const EstimationOptions& opts) {
    if (!(lambda1 > 0.0) || !(lambda2 > 0.0)) {
        throw std::invalid_argument("wavelengths must be positive");
    }
    if (!(distance_l > 0.0)) {
        throw std::invalid_argument("source distance must be positive");
    }
    const double h = delta_curve.spacing();
    const auto peak = analyze_spectrum(delta_curve.values(), h, opts);
    if (!peak.found || peak.snr_db < opts.snr_threshold_db) {
        throw estimation_error("no oscillation detected in the delta curve");
    }
    const double inv_sum = 0.5 * (1.0 / lambda1 + 1.0 / lambda2);
    SeparationEstimate est;
    est.frequency = peak.frequency;
    est.snr_db = peak.snr_db;
    est.separation_m = peak.frequency * distance_l / inv_sum;
    est.confidence_width_m = peak.bin_width * distance_l / inv_sum;
    return est;
}

namespace {

struct GridPeak {
    double fx = 0.0, fy = 0.0;
    double power = 0.0;
};

} // namespace

CenterVectorReport extract_center_vectors(const DeltaGrid& grid, int n_sources,
                                          double distance_l,
                                          const EstimationOptions& opts) {
    if (n_sources < 2) throw std::invalid_argument("need at least two sources");
    if (grid.nx < 8 || grid.ny < 8) {
        throw std::invalid_argument("grid too small for spectral estimation");
    }
    if (static_cast<int>(grid.values.size()) != grid.nx * grid.ny) {
        throw std::invalid_argument("grid size mismatch");
    }

    const int nx = grid.nx, ny = grid.ny;
    const double mean =
        std::accumulate(grid.values.begin(), grid.values.end(), 0.0) /
        grid.values.size();
    const auto wx = window_weights(opts.window, nx);
    const auto wy = window_weights(opts.window, ny);
    std::vector<double> x(grid.values.size());
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            x[iy * nx + ix] = (grid.at(ix, iy) - mean) * wx[ix] * wy[iy];
        }
    }

    // Full 2D DFT power; search the half-plane kx in [0, nx/2],
    // ky in (-ny/2, ny/2], with ky > 0 required on the kx = 0 axis.
    auto power_at = [&](int kx, int ky) {
        std::complex<double> acc{0.0, 0.0};
        for (int iy = 0; iy < ny; ++iy) {
            for (int ix = 0; ix < nx; ++ix) {
                const double arg =
                    -2.0 * M_PI * (static_cast<double>(kx) * ix / nx +
                                   static_cast<double>(ky) * iy / ny);
                acc += x[iy * nx + ix] * std::polar(1.0, arg);
            }
        }
        return std::norm(acc);
    };

    const int kx_max = nx / 2, ky_max = ny / 2;
    std::vector<std::vector<double>> p(kx_max + 1,
                                       std::vector<double>(2 * ky_max + 1, 0.0));
    for (int kx = 0; kx <= kx_max; ++kx) {
        for (int ky = -ky_max; ky <= ky_max; ++ky) {
            p[kx][ky + ky_max] = power_at(kx, ky);
        }
    }

    auto pw = [&](int kx, int ky) -> double {
        if (kx < 0 || kx > kx_max || ky < -ky_max || ky > ky_max) return -1.0;
        return p[kx][ky + ky_max];
    };

    std::vector<GridPeak> peaks;
    for (int kx = 0; kx <= kx_max - 1; ++kx) {
        for (int ky = -ky_max + 1; ky <= ky_max - 1; ++ky) {
            if (kx == 0 && ky <= 0) continue;
            if (kx <= 1 && std::abs(ky) <= 1) continue; // DC neighborhood
            const double c = pw(kx, ky);
            if (c <= 0.0) continue;
            if (c < pw(kx - 1, ky) || c < pw(kx + 1, ky) || c < pw(kx, ky - 1) ||
                c < pw(kx, ky + 1)) {
                continue;
            }
            GridPeak gp;
            const double offx = kx > 0 && kx < kx_max && pw(kx - 1, ky) > 0 &&
                                        pw(kx + 1, ky) > 0
                                    ? parabolic_offset(std::log(pw(kx - 1, ky)),
                                                       std::log(c),
                                                       std::log(pw(kx + 1, ky)))
                                    : 0.0;
            const double offy =
                pw(kx, ky - 1) > 0 && pw(kx, ky + 1) > 0
                    ? parabolic_offset(std::log(pw(kx, ky - 1)), std::log(c),
                                       std::log(pw(kx, ky + 1)))
                    : 0.0;
            gp.fx = (kx + offx) / (nx * grid.dx);
            gp.fy = (ky + offy) / (ny * grid.dy);
            gp.power = c;
            peaks.push_back(gp);
        }
    }
    std::sort(peaks.begin(), peaks.end(),
              [](const GridPeak& a, const GridPeak& b) { return a.power > b.power; });

    // Drop shoulder peaks that sit within one bin of a stronger one.
    std::vector<GridPeak> distinct;
    for (const auto& gp : peaks) {
        const bool dup = std::any_of(
            distinct.begin(), distinct.end(), [&](const GridPeak& d) {
                return std::fabs(gp.fx - d.fx) < 1.5 / (nx * grid.dx) &&
                       std::fabs(gp.fy - d.fy) < 1.5 / (ny * grid.dy);
            });
        if (!dup) distinct.push_back(gp);
    }

    const int n_pairs = n_sources * (n_sources - 1) / 2;
    CenterVectorReport report;
    int peak_idx = 0;
    for (int pp = 0; pp < n_sources; ++pp) {
        for (int q = pp + 1; q < n_sources; ++q) {
            CenterVector cv;
            cv.p = pp;
            cv.q = q;
            if (peak_idx < static_cast<int>(distinct.size())) {
                const auto& gp = distinct[peak_idx];
                cv.vx = gp.fx * distance_l;
                cv.vy = gp.fy * distance_l;
                cv.resolved = true;
                if (peak_idx + 1 < static_cast<int>(distinct.size()) &&
                    peak_idx + 1 < n_pairs) {
                    const double next = distinct[peak_idx + 1].power;
                    if (next > (1.0 - opts.ambiguity_rel_tol) * gp.power) {
                        report.ambiguous_pairs.emplace_back(pp, q);
                    }
                }
            }
            report.vectors.push_back(cv);
            ++peak_idx;
        }
    }
    return report;
}

} // namespace e2i2
