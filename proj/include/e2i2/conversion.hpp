#pragma once

#include <array>
#include <complex>
#include <stdexcept>
#include <string>

namespace e2i2 {

using cd = std::complex<double>;

enum class WavelengthMode { l1 = 0, l2 = 1, l3 = 2 };
enum class SpatialMode { m0 = 0, m1 = 1, m2 = 2, m3 = 3 };

/// Normalized single-photon superposition over (wavelength-mode,
/// spatial-mode) basis labels. A projection with empty support yields a
/// null state (is_null() true) with success probability 0.
class PhotonState {
public:
    static constexpr int kDim = 12;

    PhotonState() = default;
    static PhotonState basis(WavelengthMode w, SpatialMode m);
    /// Builds a state from raw amplitudes and normalizes; throws on zero norm.
    static PhotonState from_amplitudes(const std::array<cd, kDim>& amps);
    static PhotonState null_state();

    cd amplitude(WavelengthMode w, SpatialMode m) const;
    void set_amplitude(WavelengthMode w, SpatialMode m, cd a);

    double norm_squared() const;
    bool is_null() const { return null_; }
    bool is_normalized(double tol = 1e-9) const;

    /// Canonical text form, one `(<wavelength>,<mode>): re+im*i` line per
    /// nonzero amplitude, sorted by label.
    std::string to_text() const;

private:
    std::array<cd, kDim> amps_{};
    bool null_ = false;
};

/// Wavelength-subspace beamsplitter-like map on {l1, l2}:
///   |l1> -> cos(theta)|l1> + e^{i phi} sin(theta)|l2>
///   |l2> -> -e^{-i phi} sin(theta)|l1> + cos(theta)|l2>
/// The sign on the second map is what makes the pair norm-preserving.
/// identity on l3 and on the spatial label.
struct ConversionUnitary {
    double theta = 0.0;
    double phi = 0.0;

    /// Amplitude <to| U |from> on the {l1, l2} subspace.
    cd matrix_element(WavelengthMode to, WavelengthMode from) const;
};

PhotonState apply_conversion(const PhotonState& state, const ConversionUnitary& u);

struct ProjectionResult {
    PhotonState state;
    double success_probability = 0.0;
};

/// Ideal wavelength filter: zeroes every amplitude with a different
/// wavelength label, renormalizes, and reports the pre-normalization
/// norm squared as the success probability.
ProjectionResult filter_project(const PhotonState& state, WavelengthMode keep);

/// Strong coherent pump; the conversion treats it as unchanged by gaining
/// or losing one photon.
struct CoherentPump {
    double mean_photon_number = 0.0;
    double wavelength = 0.0;
    double phase_reference = 0.0;
};

/// Overlap-norm-squared of the photon-shifted coherent state with the
/// original: 1 - 1/(1 + n).
double pump_fidelity(const CoherentPump& pump);

/// Complex propagation amplitudes for the toy two-source/two-detector
/// geometry, plus the reference-source arms.
struct AmplitudeSet {
    cd d_1a{0.0, 0.0}, d_1b{0.0, 0.0};
    cd d_2a{0.0, 0.0}, d_2b{0.0, 0.0};
    // Reference-source propagators, per color.
    cd d_3a_red{0.0, 0.0}, d_3b_red{0.0, 0.0};
    cd d_3a_blue{0.0, 0.0}, d_3b_blue{0.0, 0.0};
};

enum class CoincidenceMode { distinguishable, e2i2 };

/// Two-detector coincidence probability of the toy model:
/// distinguishable -> |D1A D2B|^2 + |D2A D1B|^2, e2i2 adds the
/// interference term 2 Re(D1A D2B D2A* D1B*).
double hbt_coincidence(const AmplitudeSet& amps, CoincidenceMode mode);

/// Post-selected coincidence probability when each arm runs the incoming
/// photon through the conversion unitary and an l2 filter. At
/// theta = pi/4 this reproduces the e2i2 coincidence times the 1/4
/// post-selection factor.
double single_crystal_coincidence(const AmplitudeSet& amps, const ConversionUnitary& u);

/// Staggered two-crystal upconversion followed by the beamsplitter
/// projection onto (|m1> + |m2>)/sqrt(2): input supported on
/// {(l1, m0), (l2, m0)} maps to (l3, m3) with the relative phase intact.
ProjectionResult two_crystal_evolve(const PhotonState& input);

/// Four-fold coincidence probability of the reference-source method with
/// all propagator magnitudes fixed at 1/sqrt(2); only the phases of the
/// amplitude set are used.
double reference_fourfold(const AmplitudeSet& phases);

} // namespace e2i2
