#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "e2i2/correlation.hpp"
#include "e2i2/sources.hpp"

namespace e2i2 {

/// Philox4x32-10 counter-based block cipher; same counter and key always
/// give the same block, independent of call order or thread placement.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Uniform-deviate stream for one (seed, baseline, trial) triple.
class TrialRng {
public:
    TrialRng(std::uint64_t seed, std::uint32_t baseline, std::uint64_t trial);

    /// Next double in [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    void refill();

    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> counter_;
    std::array<std::uint32_t, 4> block_{};
    int cursor_ = 4;
};

enum class McMethod { none, single_crystal };

/// One photon drawn from the incoherent source mixture.
struct EmissionEvent {
    int source_index = 0;
    Position3 point;
    double source_phase = 0.0; // uniform on [0, 2pi), independent per event
    double wavelength = 0.0;
};

struct McScenario {
    std::vector<SourceModel> sources;
    BaselineSweep sweep;
    McMethod method = McMethod::single_crystal;
    double theta = M_PI / 4.0;
    double phi = 0.0;
    double detector_efficiency = 1.0; // per-photon detection probability
    double filter_extinction = 0.0;   // leakage probability of a blocked photon
    double acceptance_floor = 0.0;    // warn when acceptance drops below this
    int threads = 0;                  // 0 = hardware concurrency
};

struct BaselineTally {
    double separation = 0.0;
    std::uint64_t coincidences = 0;
    std::uint64_t singles_a = 0;
    std::uint64_t singles_b = 0;
};

struct CoincidenceTally {
    std::vector<BaselineTally> bins;
    std::uint64_t trials = 0; // per baseline
    std::uint64_t seed = 0;
    McMethod method = McMethod::single_crystal;
    std::size_t n_sources = 0;
    double acceptance_rate = 0.0; // detected photons / emitted photons
    bool low_acceptance = false;
    std::string scenario_hash;
};

/// Photon-pair sampling loop: per trial two emissions are drawn from the
/// intensity-weighted source mixture, routed, converted/filtered, and a
/// coincidence is drawn from the interferential joint probability.
/// Deterministic in (seed, n_trials, scenario) for any thread count.
CoincidenceTally run_trials(const McScenario& scenario, std::uint64_t n_trials,
                            std::uint64_t seed);

/// Coincidences normalized by the singles product and scaled to the
/// analytic convention (single unit source plateaus at 1); binomial
/// standard errors attached, empty bins flagged.
CorrelationCurve histogram_to_curve(const CoincidenceTally& tally);

/// Tally CSV `separation_m,coincidences,singles_a,singles_b,trials` with a
/// leading `#` metadata line carrying seed and scenario hash.
void write_tally_csv(std::ostream& os, const CoincidenceTally& tally);

/// FNV-1a hash of a scenario's canonical serialization, hex-encoded.
std::string fnv1a_hex(const std::string& text);

} // namespace e2i2
