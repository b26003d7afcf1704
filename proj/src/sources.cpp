#include "e2i2/sources.hpp"

#include <numeric>

namespace e2i2 {

namespace {
void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}
} // namespace

PointSource SourceModel::validate(PointSource p) {
    require(p.center.finite(), "PointSource: center must be finite");
    require(p.wavelength > 0.0, "PointSource: wavelength must be positive");
    require(p.weight >= 0.0 && std::isfinite(p.weight),
            "PointSource: weight must be nonnegative");
    return p;
}

DiscSource SourceModel::validate(DiscSource d) {
    require(d.center.finite(), "DiscSource: center must be finite");
    require(d.center.z > 0.0, "DiscSource: center must lie at positive z");
    require(d.radius > 0.0, "DiscSource: radius must be positive");
    require(d.wavelength > 0.0, "DiscSource: wavelength must be positive");
    require(d.weight >= 0.0 && std::isfinite(d.weight),
            "DiscSource: weight must be nonnegative");
    return d;
}

SampledSource SourceModel::validate(SampledSource s) {
    require(!s.samples.empty(), "SampledSource: needs at least one sample");
    require(s.wavelength > 0.0, "SampledSource: wavelength must be positive");
    for (const auto& [pos, intensity] : s.samples) {
        require(pos.finite(), "SampledSource: sample position must be finite");
        require(intensity >= 0.0 && std::isfinite(intensity),
                "SampledSource: sample intensity must be nonnegative");
    }
    return s;
}

double SourceModel::weight() const {
    if (is_point()) return point().weight;
    if (is_disc()) return disc().weight;
    const auto& s = sampled().samples;
    return std::accumulate(s.begin(), s.end(), 0.0,
                           [](double acc, const auto& kv) { return acc + kv.second; });
}

} // namespace e2i2
