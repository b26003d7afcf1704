#include "e2i2/conversion.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace e2i2 {

namespace {

int idx(WavelengthMode w, SpatialMode m) {
    return static_cast<int>(w) * 4 + static_cast<int>(m);
}

const char* wavelength_label(WavelengthMode w) {
    switch (w) {
        case WavelengthMode::l1: return "lambda1";
        case WavelengthMode::l2: return "lambda2";
        case WavelengthMode::l3: return "lambda3";
    }
    return "?";
}

} // namespace

PhotonState PhotonState::basis(WavelengthMode w, SpatialMode m) {
    PhotonState s;
    s.amps_[idx(w, m)] = cd{1.0, 0.0};
    return s;
}

PhotonState PhotonState::from_amplitudes(const std::array<cd, kDim>& amps) {
    PhotonState s;
    s.amps_ = amps;
    const double n2 = s.norm_squared();
    if (n2 <= 0.0) {
        throw std::invalid_argument("PhotonState: cannot normalize zero amplitudes");
    }
    const double inv = 1.0 / std::sqrt(n2);
    for (auto& a : s.amps_) a *= inv;
    return s;
}

PhotonState PhotonState::null_state() {
    PhotonState s;
    s.null_ = true;
    return s;
}

cd PhotonState::amplitude(WavelengthMode w, SpatialMode m) const {
    return amps_[idx(w, m)];
}

void PhotonState::set_amplitude(WavelengthMode w, SpatialMode m, cd a) {
    amps_[idx(w, m)] = a;
}

double PhotonState::norm_squared() const {
    double n2 = 0.0;
    for (const auto& a : amps_) n2 += std::norm(a);
    return n2;
}

bool PhotonState::is_normalized(double tol) const {
    return !null_ && std::fabs(norm_squared() - 1.0) <= tol;
}

std::string PhotonState::to_text() const {
    if (null_) return "(null)\n";
    std::ostringstream os;
    for (int w = 0; w < 3; ++w) {
        for (int m = 0; m < 4; ++m) {
            const cd a = amps_[w * 4 + m];
            if (a == cd{0.0, 0.0}) continue;
            char buf[80];
            std::snprintf(buf, sizeof buf, "%.9g%+.9g*i", a.real(), a.imag());
            os << '(' << wavelength_label(static_cast<WavelengthMode>(w)) << ",m"
               << m << "): " << buf << '\n';
        }
    }
    return os.str();
}

cd ConversionUnitary::matrix_element(WavelengthMode to, WavelengthMode from) const {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    if (from == WavelengthMode::l1 && to == WavelengthMode::l1) return c;
    if (from == WavelengthMode::l1 && to == WavelengthMode::l2)
        return std::polar(s, phi);
    if (from == WavelengthMode::l2 && to == WavelengthMode::l1)
        return -std::polar(s, -phi);
    if (from == WavelengthMode::l2 && to == WavelengthMode::l2) return c;
    return from == to ? cd{1.0, 0.0} : cd{0.0, 0.0};
}

PhotonState apply_conversion(const PhotonState& state, const ConversionUnitary& u) {
    if (!state.is_normalized()) {
        throw std::invalid_argument("apply_conversion: state is not normalized");
    }
    PhotonState out;
    for (int m = 0; m < 4; ++m) {
        const auto mode = static_cast<SpatialMode>(m);
        const cd a1 = state.amplitude(WavelengthMode::l1, mode);
        const cd a2 = state.amplitude(WavelengthMode::l2, mode);
        out.set_amplitude(WavelengthMode::l1, mode,
                          u.matrix_element(WavelengthMode::l1, WavelengthMode::l1) * a1 +
                              u.matrix_element(WavelengthMode::l1, WavelengthMode::l2) * a2);
        out.set_amplitude(WavelengthMode::l2, mode,
                          u.matrix_element(WavelengthMode::l2, WavelengthMode::l1) * a1 +
                              u.matrix_element(WavelengthMode::l2, WavelengthMode::l2) * a2);
        out.set_amplitude(WavelengthMode::l3, mode,
                          state.amplitude(WavelengthMode::l3, mode));
    }
    return out;
}

ProjectionResult filter_project(const PhotonState& state, WavelengthMode keep) {
    if (!state.is_normalized()) {
        throw std::invalid_argument("filter_project: state is not normalized");
    }
    std::array<cd, PhotonState::kDim> kept{};
    double n2 = 0.0;
    for (int m = 0; m < 4; ++m) {
        const auto mode = static_cast<SpatialMode>(m);
        const cd a = state.amplitude(keep, mode);
        kept[static_cast<int>(keep) * 4 + m] = a;
        n2 += std::norm(a);
    }
    if (n2 <= 0.0) {
        return {PhotonState::null_state(), 0.0};
    }
    return {PhotonState::from_amplitudes(kept), std::min(n2, 1.0)};
}

double pump_fidelity(const CoherentPump& pump) {
    if (!(pump.mean_photon_number >= 0.0)) {
        throw std::invalid_argument("pump_fidelity: mean photon number must be >= 0");
    }
    return 1.0 - 1.0 / (1.0 + pump.mean_photon_number);
}

double hbt_coincidence(const AmplitudeSet& amps, CoincidenceMode mode) {
    const double base =
        std::norm(amps.d_1a * amps.d_2b) + std::norm(amps.d_2a * amps.d_1b);
    if (mode == CoincidenceMode::distinguishable) return base;
    return base + 2.0 * std::real(amps.d_1a * amps.d_2b *
                                  std::conj(amps.d_2a) * std::conj(amps.d_1b));
}

double single_crystal_coincidence(const AmplitudeSet& amps, const ConversionUnitary& u) {
    // Conversion-then-filter amplitude for a photon entering at the given
    // wavelength; identical at both arms.
    const auto survive = [&u](WavelengthMode in) {
        const PhotonState converted =
            apply_conversion(PhotonState::basis(in, SpatialMode::m0), u);
        return converted.amplitude(WavelengthMode::l2, SpatialMode::m0);
    };
    const cd m1 = survive(WavelengthMode::l1);
    const cd m2 = survive(WavelengthMode::l2);
    const cd amp = amps.d_1a * m1 * amps.d_2b * m2 + amps.d_2a * m2 * amps.d_1b * m1;
    return std::norm(amp);
}

ProjectionResult two_crystal_evolve(const PhotonState& input) {
    if (!input.is_normalized()) {
        throw std::invalid_argument("two_crystal_evolve: state is not normalized");
    }
    const cd a = input.amplitude(WavelengthMode::l1, SpatialMode::m0);
    const cd b = input.amplitude(WavelengthMode::l2, SpatialMode::m0);
    if (std::fabs(std::norm(a) + std::norm(b) - 1.0) > 1e-9) {
        throw std::invalid_argument(
            "two_crystal_evolve: input must be supported on {(l1,m0), (l2,m0)}");
    }
    // (l1,m0) -> (l3,m1), (l2,m0) -> (l3,m2), then project the spatial part
    // onto (|m1> + |m2>)/sqrt(2).
    const cd post = (a + b) / std::sqrt(2.0);
    const double p = std::norm(post);
    if (p <= 0.0) {
        return {PhotonState::null_state(), 0.0};
    }
    PhotonState out;
    out.set_amplitude(WavelengthMode::l3, SpatialMode::m3, post / std::abs(post));
    return {out, std::min(p, 1.0)};
}

double reference_fourfold(const AmplitudeSet& phases) {
    const double combo = std::arg(phases.d_1a) - std::arg(phases.d_1b) -
                         std::arg(phases.d_2a) + std::arg(phases.d_2b) -
                         std::arg(phases.d_3a_red) + std::arg(phases.d_3b_red) +
                         std::arg(phases.d_3a_blue) - std::arg(phases.d_3b_blue);
    return 0.125 + 0.125 * std::cos(combo);
}

} // namespace e2i2
