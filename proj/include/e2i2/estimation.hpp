#pragma once

#include <utility>
#include <vector>

#include "e2i2/correlation.hpp"

namespace e2i2 {

struct estimation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EstimationOptions {
    std::string window = "hann";       // "hann" or "rect"
    double snr_threshold_db = 6.0;     // below this: no oscillation detected
    double max_expected_frequency = 0; // cycles/m; 0 disables the Nyquist guard
    double ambiguity_rel_tol = 0.05;   // peak magnitudes closer than this are ambiguous
};

/// Dominant interior spectral peak of a uniformly sampled real series.
struct SpectrumPeak {
    bool found = false;
    double frequency = 0.0; // cycles per meter, sub-bin refined
    double power = 0.0;
    double snr_db = 0.0;
    double bin_width = 0.0;
};

/// Half-window taper, even mirror (the series is a function of a
/// separation magnitude), mean-subtract, DFT; the peak must be a local
/// maximum strictly inside the positive-frequency band. SNR is the peak
/// power against the mean in-band power excluding the peak neighborhood.
SpectrumPeak analyze_spectrum(const std::vector<double>& values, double spacing,
                              const EstimationOptions& opts = {});

struct DiameterEstimate {
    double angular_diameter = 0.0; // radians
    double first_zero_m = 0.0;     // baseline separation of the first envelope zero
    double uncertainty_m = 0.0;    // from sample spacing
};

/// Angular diameter from the first zero of the single-source envelope
/// (value minus plateau); theta = j11 * lambda / (pi * rho*).
DiameterEstimate estimate_diameter(const CorrelationCurve& curve, double lambda);

struct SeparationEstimate {
    double separation_m = 0.0;      // recovered source separation d
    double frequency = 0.0;         // dominant spatial frequency, cycles/m
    double confidence_width_m = 0.0;
    double snr_db = 0.0;
};

/// Separation from the oscillation frequency of the delta (cross-
/// wavelength) curve: freq = d * (1/lambda1 + 1/lambda2) / (2 L).
SeparationEstimate estimate_separation(const CorrelationCurve& delta_curve,
                                       double lambda1, double lambda2,
                                       double distance_l,
                                       const EstimationOptions& opts = {});

/// Delta correlation sampled on a 2D baseline grid,
/// value(ix, iy) at baseline (ix * dx, iy * dy), row-major in iy.
struct DeltaGrid {
    int nx = 0, ny = 0;
    double dx = 0.0, dy = 0.0;
    std::vector<double> values;

    double at(int ix, int iy) const { return values[iy * nx + ix]; }
};

/// Recovered (1/lambda_p) c_p - (1/lambda_q) c_q transverse vector
/// (dimensionless), antisymmetric under swapping p and q; sign of the
/// assignment is fixed only up to the inherent +- ambiguity of the real
/// spectrum.
struct CenterVector {
    int p = 0, q = 0;
    double vx = 0.0, vy = 0.0;
    bool resolved = false;

    CenterVector reversed() const { return {q, p, -vx, -vy, resolved}; }
};

struct CenterVectorReport {
    std::vector<CenterVector> vectors; // one per source pair p < q
    std::vector<std::pair<int, int>> ambiguous_pairs;
};

/// 2D spectral peaks of the delta grid assigned to source pairs by
/// magnitude ordering; unresolved pairs (including degenerate
/// zero-frequency ones) are flagged rather than guessed.
CenterVectorReport extract_center_vectors(const DeltaGrid& grid, int n_sources,
                                          double distance_l,
                                          const EstimationOptions& opts = {});

} // namespace e2i2
