#pragma once

#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

#include "e2i2/sources.hpp"

namespace e2i2 {

/// Quadrature did not converge under grid refinement.
struct convergence_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Mutual coherence integral gamma-tilde(r_A, r_B) for one source.
///
/// The rapidly oscillating center phase e^{-i(2*pi/(lambda*L)) (r_A-r_B).c}
/// is carried as a raw accumulator and only turned into a phasor when two
/// coherences are combined, so it never degrades the slowly varying
/// envelope.
struct Coherence {
    std::complex<double> envelope{0.0, 0.0};
    double center_phase = 0.0;

    std::complex<double> value() const;
};

/// Product gamma_p(r_A, r_B) * conj(gamma_q(r_A, r_B)); center phases are
/// combined by difference before exponentiation.
std::complex<double> coherence_cross(const Coherence& p, const Coherence& q);

/// Closed-form disc coherence envelope, decomposed into the quadratic
/// detector phase and the real Airy amplitude 2*J1(z)/z with
/// z = (2*pi/lambda) * (theta/2) * |r_A - r_B|.
struct DiscEnvelope {
    double quadratic_phase = 0.0;
    double airy_amplitude = 1.0;
    double z = 0.0;

    std::complex<double> value() const;
};

DiscEnvelope f_disc_closed_form(const DiscSource& src, const Baseline& bl);

struct QuadratureOptions {
    int radial = 64;
    int angular = 64;
    double tolerance = 1e-9;
};

/// Coherence integral by Gauss-Legendre product quadrature over the source
/// support, using the far-field phase; throws convergence_error when a
/// doubled grid still moves the result by more than the tolerance.
Coherence gamma_quadrature(const SourceModel& src, const Baseline& bl,
                           const QuadratureOptions& opts = {});

/// Coherence via the analytic route: exact for point sources, closed-form
/// Airy envelope for discs. Sampled sources have no closed form and throw.
Coherence gamma_analytic(const SourceModel& src, const Baseline& bl);

using GammaFn = Coherence (*)(const SourceModel&, const Baseline&,
                              const QuadratureOptions&);

/// Single-source two-point intensity correlation
/// G2 = g(A,A) g(B,B) + g(A,B) g(B,A).
double g2_single(const SourceModel& src, const Baseline& bl,
                 bool quadrature = false, const QuadratureOptions& opts = {});

/// Distinguishable-sources correlation: interference only inside equal
/// wavelength groups.
double g2_no_e2i2(const std::vector<SourceModel>& sources, const Baseline& bl,
                  bool quadrature = false, const QuadratureOptions& opts = {});

/// Full correlation with conversion in place: interference across all
/// sources regardless of wavelength.
double g2_e2i2(const std::vector<SourceModel>& sources, const Baseline& bl,
               bool quadrature = false, const QuadratureOptions& opts = {});

/// Cross-wavelength-group interference terms only; identically
/// g2_e2i2 - g2_no_e2i2.
double g2_delta(const std::vector<SourceModel>& sources, const Baseline& bl,
                bool quadrature = false, const QuadratureOptions& opts = {});

enum class Variant { single, no_e2i2, e2i2, delta, multi };

std::string variant_name(Variant v);
Variant variant_from_name(const std::string& name);

struct CurvePoint {
    double separation = 0.0;
    double value = 0.0;
    double stderror = 0.0; // 0 for analytic curves
    bool empty = false;    // Monte Carlo bin with no statistics
};

/// Sampled correlation values versus baseline separation.
struct CorrelationCurve {
    std::vector<CurvePoint> points;
    Variant variant = Variant::single;
    std::string normalization = "unit-weight";

    bool has_stderr = false;

    std::vector<double> separations() const;
    std::vector<double> values() const;
    /// Uniform sample spacing; throws if the grid is not uniform to 1e-9
    /// relative.
    double spacing() const;
};

/// Baseline sweep along a transverse direction: r_B fixed at the origin,
/// r_A = separation * dir.
struct BaselineSweep {
    double start = 0.0;
    double stop = 0.0;
    int samples = 0;
    double dir_x = 1.0;
    double dir_y = 0.0;

    Baseline at(int i) const;
    double separation_at(int i) const;
};

CorrelationCurve sweep_curve(const std::vector<SourceModel>& sources,
                             const BaselineSweep& sweep, Variant variant,
                             bool quadrature = false,
                             const QuadratureOptions& opts = {});

/// CSV with exact header `separation_m,value,variant`; curves carrying
/// standard errors get a fourth `stderr` column.
void write_curve_csv(std::ostream& os, const CorrelationCurve& curve);
CorrelationCurve read_curve_csv(std::istream& is);

} // namespace e2i2
