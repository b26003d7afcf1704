#include "e2i2/geometry.hpp"

namespace e2i2 {

namespace {
// 2*pi split into a rounded head and the residual tail.
constexpr double kTwoPiHi = 6.283185307179586;
constexpr double kTwoPiLo = 2.4492935982947064e-16;
constexpr double kInvTwoPi = 0.15915494309189535;
} // namespace

double reduce_two_pi(double phi) {
    const double n = std::nearbyint(phi * kInvTwoPi);
    // fma keeps n * hi exact, so the fractional part survives even when the
    // accumulated phase is ~1e9 rad.
    double r = std::fma(-n, kTwoPiLo, std::fma(-n, kTwoPiHi, phi));
    if (r <= -M_PI) r += kTwoPiHi; // contract is (-pi, pi]
    return r;
}

std::complex<double> unit_phasor(double phi) {
    const double r = reduce_two_pi(phi);
    return {std::cos(r), std::sin(r)};
}

double phase_delta_exact(const Position3& r, double lambda, const Baseline& bl) {
    if (!(lambda > 0.0)) {
        throw std::invalid_argument("phase_delta_exact: wavelength must be positive");
    }
    const double da = distance(r, bl.r_a);
    const double db = distance(r, bl.r_b);
    if (da / lambda >= 1e12 || db / lambda >= 1e12) {
        throw std::domain_error(
            "phase_delta_exact: path length exceeds 1e12 wavelengths; "
            "use phase_delta_farfield at this scale");
    }
    return (2.0 * M_PI / lambda) * (da - db);
}

double phase_delta_farfield(double x, double y, double lambda, double big_l,
                            const Baseline& bl) {
    if (!(lambda > 0.0)) {
        throw std::invalid_argument("phase_delta_farfield: wavelength must be positive");
    }
    if (!(big_l > 0.0)) {
        throw std::invalid_argument("phase_delta_farfield: source distance must be positive");
    }
    const double qa = 0.5 * (bl.r_a.x * bl.r_a.x + bl.r_a.y * bl.r_a.y);
    const double qb = 0.5 * (bl.r_b.x * bl.r_b.x + bl.r_b.y * bl.r_b.y);
    const double dx = bl.r_a.x - bl.r_b.x;
    const double dy = bl.r_a.y - bl.r_b.y;
    return (2.0 * M_PI / (lambda * big_l)) * (qa - qb - (dx * x + dy * y));
}

} // namespace e2i2
