#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "e2i2/scenario.hpp"

using namespace e2i2;

namespace {

const char* kTwoStar = R"(# two discs, two colors
[source]
type = disc
center = -8e9 m, 0 m, 8.611 ly
radius = 2e6 km
wavelength = 292 nm
weight = 1

[source]
type = disc
center = 8e9 m, 0 m, 8.611 ly
radius = 2e6 km
wavelength = 828 nm
weight = 1

[detectors]
start = 0 m
stop = 100 m
samples = 401
direction = 1, 0

[conversion]
method = single-crystal
theta = 0.78539816339744828
phi = 0

[montecarlo]
trials = 1000
seed = 7
)";

} // namespace

TEST_CASE("length parsing honors units") {
    CHECK(parse_length("1 m") == 1.0);
    CHECK(parse_length("2.5 km") == 2500.0);
    CHECK(parse_length("292 nm") == doctest::Approx(292e-9));
    CHECK(parse_length("15 um") == doctest::Approx(15e-6));
    CHECK(parse_length("3 cm") == doctest::Approx(0.03));
    CHECK(parse_length("1 ly") == doctest::Approx(9460730472580800.0));
    CHECK_THROWS_AS(parse_length("10"), config_error);
    CHECK_THROWS_AS(parse_length("10 furlongs"), config_error);
}

TEST_CASE("a scenario survives a parse, serialize, parse cycle") {
    const auto cfg = ScenarioConfig::parse(kTwoStar);
    REQUIRE(cfg.sources.size() == 2);
    CHECK(cfg.sources[0].kind == SourceSpec::Kind::disc);
    CHECK(cfg.sources[0].radius == doctest::Approx(2e9));
    CHECK(cfg.sources[0].center.x == doctest::Approx(-8e9));
    CHECK(cfg.sources[1].wavelength == doctest::Approx(828e-9));
    CHECK(cfg.detectors.samples == 401);
    CHECK(cfg.conversion.method == ConversionSpec::Method::single_crystal);
    CHECK(cfg.montecarlo.trials == 1000);

    const auto again = ScenarioConfig::parse(cfg.serialize());
    CHECK(again == cfg);
    // Serialization is canonical, so a second cycle is byte-identical.
    CHECK(again.serialize() == cfg.serialize());
}

TEST_CASE("sampled sources parse into sample rows") {
    const auto cfg = ScenarioConfig::parse(R"([source]
type = sampled
wavelength = 500 nm
sample = 0 m, 0 m, 1e12 m, 1.0
sample = 1 km, 0 m, 1e12 m, 0.5

[detectors]
start = 0 m
stop = 10 m
samples = 11
)");
    REQUIRE(cfg.sources.size() == 1);
    REQUIRE(cfg.sources[0].samples.size() == 2);
    CHECK(cfg.sources[0].samples[1].first.x == doctest::Approx(1000.0));
    CHECK(cfg.sources[0].samples[1].second == doctest::Approx(0.5));
    CHECK(ScenarioConfig::parse(cfg.serialize()) == cfg);
}

TEST_CASE("errors carry the line number and the field name") {
    const auto check_message = [](const std::string& text, const char* needle) {
        try {
            ScenarioConfig::parse(text);
            FAIL_CHECK("expected config_error for: " << needle);
        } catch (const config_error& e) {
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };
    check_message("[source]\ntype = point\nbogus_key = 1\n", "line 3");
    check_message("[source]\ntype = point\nbogus_key = 1\n", "bogus_key");
    check_message("[source]\ntype = point\nwavelength = 292\n", "missing a unit");
    check_message("[source]\ntype = point\nwavelength = 292 parsec\n",
                  "unknown unit 'parsec'");
    check_message("[bogus]\n", "unknown section 'bogus'");
    check_message("[source]\ntype = moon\n", "unknown source type");
    check_message("weight = 1\n", "outside any section");
    check_message("[montecarlo]\ntrials = 10\n", "no [source] section");
}

TEST_CASE("structural validation happens after parsing") {
    CHECK_THROWS_AS(ScenarioConfig::parse("[source]\ntype = point\n"
                                          "wavelength = 292 nm\n"),
                    config_error); // no detectors
    CHECK_THROWS_AS(ScenarioConfig::parse("[source]\ntype = disc\n"
                                          "wavelength = 292 nm\n"
                                          "[detectors]\nstart = 0 m\nstop = 1 m\n"
                                          "samples = 2\n"),
                    config_error); // disc without radius
}

TEST_CASE("model construction follows the declared kinds") {
    const auto cfg = ScenarioConfig::parse(kTwoStar);
    const auto sources = cfg.build_sources();
    REQUIRE(sources.size() == 2);
    CHECK(sources[0].is_disc());
    CHECK(sources[0].weight() == doctest::Approx(1.0));

    const auto mc = cfg.build_mc_scenario();
    CHECK(mc.method == McMethod::single_crystal);
    CHECK(mc.sweep.samples == 401);

    auto ref = cfg;
    ref.conversion.method = ConversionSpec::Method::reference;
    CHECK_THROWS_AS(ref.build_mc_scenario(), config_error);
}
