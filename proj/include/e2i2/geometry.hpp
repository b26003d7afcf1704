#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>

namespace e2i2 {

/// Cartesian position in meters. Detectors live in the z = 0 plane,
/// sources at z > 0.
struct Position3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    bool finite() const {
        return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
    }
};

inline Position3 operator-(const Position3& a, const Position3& b) {
    return {a.x - b.x, a.y - b.y, a.z - b.z};
}

inline double norm(const Position3& p) {
    return std::sqrt(p.x * p.x + p.y * p.y + p.z * p.z);
}

inline double distance(const Position3& a, const Position3& b) {
    return norm(a - b);
}

inline bool operator==(const Position3& a, const Position3& b) {
    return a.x == b.x && a.y == b.y && a.z == b.z;
}

/// A pair of detector positions. Coincident detectors are a valid
/// degenerate input (zero baseline).
struct Baseline {
    Position3 r_a;
    Position3 r_b;

    Baseline swapped() const { return {r_b, r_a}; }
    double separation() const { return distance(r_a, r_b); }
};

/// Raw phase in radians reduced to (-pi, pi] by subtracting the nearest
/// multiple of 2*pi in two-term compensated arithmetic, so that large
/// accumulated phases do not lose the fractional part.
double reduce_two_pi(double phi);

/// e^{i*phi} with the argument reduced first.
std::complex<double> unit_phasor(double phi);

/// Exact propagation phase difference (2*pi/lambda)(|r - r_A| - |r - r_B|).
///
/// Restricted by contract to |r - r_A|/lambda < 1e12: beyond that the
/// absolute phase overwhelms double precision and the far-field form must
/// be used instead. Throws std::domain_error outside the contract.
double phase_delta_exact(const Position3& r, double lambda, const Baseline& bl);

/// Far-field propagation phase difference for a source point (x, y) on a
/// plane at distance L, detectors in the z = 0 plane:
///   (2*pi/(lambda*L)) * (0.5*(xA^2+yA^2) - 0.5*(xB^2+yB^2)
///                        - (xA-xB)*x - (yA-yB)*y)
double phase_delta_farfield(double x, double y, double lambda, double big_l,
                            const Baseline& bl);

} // namespace e2i2
