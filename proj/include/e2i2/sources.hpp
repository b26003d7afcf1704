#pragma once

#include <utility>
#include <variant>
#include <vector>

#include "e2i2/geometry.hpp"

namespace e2i2 {

/// Point emitter with a total intensity weight.
struct PointSource {
    Position3 center;
    double wavelength = 0.0;
    double weight = 1.0;
};

/// Uniform disc of radius a (meters) centered at `center`, which must lie
/// at positive z; the distance L is center.z and the angular diameter is
/// derived from (a, L).
struct DiscSource {
    Position3 center;
    double radius = 0.0;
    double wavelength = 0.0;
    double weight = 1.0;

    double distance_l() const { return center.z; }
    double angular_diameter() const { return 2.0 * std::atan(radius / center.z); }
    double angular_diameter_small_angle() const { return 2.0 * radius / center.z; }
};

/// Arbitrary intensity distribution given as (position, nonnegative
/// intensity) samples; quadrature weights are the sample intensities, so
/// nonuniform grids must fold cell areas into them.
struct SampledSource {
    std::vector<std::pair<Position3, double>> samples;
    double wavelength = 0.0;
};

class SourceModel {
public:
    SourceModel(PointSource p) : v_(validate(std::move(p))) {}
    SourceModel(DiscSource d) : v_(validate(std::move(d))) {}
    SourceModel(SampledSource s) : v_(validate(std::move(s))) {}

    bool is_point() const { return std::holds_alternative<PointSource>(v_); }
    bool is_disc() const { return std::holds_alternative<DiscSource>(v_); }
    bool is_sampled() const { return std::holds_alternative<SampledSource>(v_); }

    const PointSource& point() const { return std::get<PointSource>(v_); }
    const DiscSource& disc() const { return std::get<DiscSource>(v_); }
    const SampledSource& sampled() const { return std::get<SampledSource>(v_); }

    double wavelength() const {
        return std::visit([](const auto& s) { return s.wavelength; }, v_);
    }

    /// Total intensity, i.e. the value of the coherence integral at zero
    /// baseline.
    double weight() const;

private:
    using Variant = std::variant<PointSource, DiscSource, SampledSource>;

    static PointSource validate(PointSource p);
    static DiscSource validate(DiscSource d);
    static SampledSource validate(SampledSource s);

    Variant v_;
};

/// True when the two wavelengths belong to the same interference group
/// (relative difference below 1e-9).
inline bool same_wavelength_group(double a, double b) {
    return std::abs(a - b) <= 1e-9 * std::max(a, b);
}

} // namespace e2i2
