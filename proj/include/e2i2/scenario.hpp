#pragma once

#include <string>
#include <vector>

#include "e2i2/correlation.hpp"
#include "e2i2/estimation.hpp"
#include "e2i2/montecarlo.hpp"
#include "e2i2/sources.hpp"

namespace e2i2 {

/// Scenario file problem; the message carries the line and field.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SourceSpec {
    enum class Kind { point, disc, sampled };
    Kind kind = Kind::point;
    Position3 center;                // point/disc
    double radius = 0.0;             // disc
    double wavelength = 0.0;
    double weight = 1.0;
    std::vector<std::pair<Position3, double>> samples; // sampled

    bool operator==(const SourceSpec&) const = default;
};

struct ConversionSpec {
    enum class Method { none, single_crystal, two_crystal, reference };
    Method method = Method::single_crystal;
    double theta = M_PI / 4.0;
    double phi = 0.0;

    bool operator==(const ConversionSpec&) const = default;
};

struct QuadratureSpec {
    int radial = 64;
    int angular = 64;
    double tolerance = 1e-9;
    bool use_quadrature = false; // route coherence through the grid integral

    bool operator==(const QuadratureSpec&) const = default;
};

struct MonteCarloSpec {
    std::uint64_t trials = 100000;
    std::uint64_t seed = 1;
    int threads = 0;
    double acceptance_floor = 0.0;
    double detector_efficiency = 1.0;
    double filter_extinction = 0.0;

    bool operator==(const MonteCarloSpec&) const = default;
};

struct EstimationSpec {
    std::string window = "hann";
    double snr_threshold_db = 6.0;
    double max_expected_frequency = 0.0;

    bool operator==(const EstimationSpec&) const = default;

    EstimationOptions options() const {
        return {window, snr_threshold_db, max_expected_frequency, 0.05};
    }
};

struct SweepSpec {
    double start = 0.0;
    double stop = 0.0;
    int samples = 0;
    double dir_x = 1.0;
    double dir_y = 0.0;

    bool operator==(const SweepSpec&) const = default;

    BaselineSweep sweep() const { return {start, stop, samples, dir_x, dir_y}; }
};

/// Declarative scenario: sources, detector sweep, conversion parameters,
/// numerics and seeds. Parses losslessly from the `.scenario` text format;
/// unknown sections or keys are errors.
struct ScenarioConfig {
    std::vector<SourceSpec> sources;
    SweepSpec detectors;
    ConversionSpec conversion;
    QuadratureSpec quadrature;
    MonteCarloSpec montecarlo;
    EstimationSpec estimation;

    bool operator==(const ScenarioConfig&) const = default;

    static ScenarioConfig parse(const std::string& text);
    static ScenarioConfig parse_file(const std::string& path);
    std::string serialize() const;

    std::vector<SourceModel> build_sources() const;
    McScenario build_mc_scenario() const;
};

/// "292 nm" / "8.611 ly" / "2e6 km" -> meters. Accepted units:
/// m, mm, cm, km, nm, um, ly.
double parse_length(const std::string& text);

} // namespace e2i2
