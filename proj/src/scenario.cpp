#include "e2i2/scenario.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace e2i2 {

namespace {

constexpr double kLightYear = 9460730472580800.0; // c * Julian year

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    return out;
}

[[noreturn]] void fail(int line, const std::string& what) {
    throw config_error("line " + std::to_string(line) + ": " + what);
}

double to_number(const std::string& s, int line, const std::string& field) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) fail(line, "field '" + field + "': trailing junk in '" + s + "'");
        return v;
    } catch (const config_error&) {
        throw;
    } catch (const std::exception&) {
        fail(line, "field '" + field + "': not a number: '" + s + "'");
    }
}

double unit_factor(const std::string& unit) {
    if (unit == "m") return 1.0;
    if (unit == "mm") return 1e-3;
    if (unit == "cm") return 1e-2;
    if (unit == "km") return 1e3;
    if (unit == "um") return 1e-6;
    if (unit == "nm") return 1e-9;
    if (unit == "ly") return kLightYear;
    return 0.0;
}

double length_value(const std::string& text, int line, const std::string& field) {
    const auto sp = text.find_last_of(" \t");
    if (sp == std::string::npos) {
        fail(line, "field '" + field + "': length '" + text +
                       "' is missing a unit (m, mm, cm, km, um, nm, ly)");
    }
    const std::string num = trim(text.substr(0, sp));
    const std::string unit = trim(text.substr(sp + 1));
    const double f = unit_factor(unit);
    if (f == 0.0) {
        fail(line, "field '" + field + "': unknown unit '" + unit + "'");
    }
    return to_number(num, line, field) * f;
}

Position3 position_value(const std::string& text, int line, const std::string& field) {
    const auto parts = split(text, ',');
    if (parts.size() != 3) {
        fail(line, "field '" + field + "': expected three comma-separated lengths");
    }
    return {length_value(parts[0], line, field), length_value(parts[1], line, field),
            length_value(parts[2], line, field)};
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_len(double v) { return fmt(v) + " m"; }

const char* method_name(ConversionSpec::Method m) {
    switch (m) {
        case ConversionSpec::Method::none: return "none";
        case ConversionSpec::Method::single_crystal: return "single-crystal";
        case ConversionSpec::Method::two_crystal: return "two-crystal";
        case ConversionSpec::Method::reference: return "reference";
    }
    return "?";
}

} // namespace

double parse_length(const std::string& text) { return length_value(trim(text), 0, "length"); }

ScenarioConfig ScenarioConfig::parse(const std::string& text) {
    ScenarioConfig cfg;
    bool have_detectors = false;

    enum class Section { none, source, detectors, conversion, quadrature, montecarlo, estimation };
    Section section = Section::none;
    SourceSpec* current_source = nullptr;
    std::vector<bool> source_has_type;

    std::istringstream is(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(is, raw)) {
        ++line_no;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;

        if (line.front() == '[') {
            if (line.back() != ']') fail(line_no, "unterminated section header");
            const std::string name = trim(line.substr(1, line.size() - 2));
            if (name == "source") {
                cfg.sources.emplace_back();
                current_source = &cfg.sources.back();
                source_has_type.push_back(false);
                section = Section::source;
            } else if (name == "detectors") {
                section = Section::detectors;
                have_detectors = true;
            } else if (name == "conversion") {
                section = Section::conversion;
            } else if (name == "quadrature") {
                section = Section::quadrature;
            } else if (name == "montecarlo") {
                section = Section::montecarlo;
            } else if (name == "estimation") {
                section = Section::estimation;
            } else {
                fail(line_no, "unknown section '" + name + "'");
            }
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos) fail(line_no, "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (value.empty()) fail(line_no, "field '" + key + "': empty value");

        switch (section) {
            case Section::none:
                fail(line_no, "key '" + key + "' outside any section");
            case Section::source: {
                SourceSpec& s = *current_source;
                if (key == "type") {
                    if (value == "point") s.kind = SourceSpec::Kind::point;
                    else if (value == "disc") s.kind = SourceSpec::Kind::disc;
                    else if (value == "sampled") s.kind = SourceSpec::Kind::sampled;
                    else fail(line_no, "field 'type': unknown source type '" + value + "'");
                    source_has_type.back() = true;
                } else if (key == "center") {
                    s.center = position_value(value, line_no, key);
                } else if (key == "radius") {
                    s.radius = length_value(value, line_no, key);
                } else if (key == "wavelength") {
                    s.wavelength = length_value(value, line_no, key);
                } else if (key == "weight") {
                    s.weight = to_number(value, line_no, key);
                } else if (key == "sample") {
                    const auto parts = split(value, ',');
                    if (parts.size() != 4) {
                        fail(line_no, "field 'sample': expected 'x, y, z, intensity'");
                    }
                    s.samples.emplace_back(
                        Position3{length_value(parts[0], line_no, key),
                                  length_value(parts[1], line_no, key),
                                  length_value(parts[2], line_no, key)},
                        to_number(parts[3], line_no, key));
                } else {
                    fail(line_no, "unknown key '" + key + "' in [source]");
                }
                break;
            }
            case Section::detectors:
                if (key == "start") cfg.detectors.start = length_value(value, line_no, key);
                else if (key == "stop") cfg.detectors.stop = length_value(value, line_no, key);
                else if (key == "samples") cfg.detectors.samples = static_cast<int>(to_number(value, line_no, key));
                else if (key == "direction") {
                    const auto parts = split(value, ',');
                    if (parts.size() != 2) fail(line_no, "field 'direction': expected 'x, y'");
                    cfg.detectors.dir_x = to_number(parts[0], line_no, key);
                    cfg.detectors.dir_y = to_number(parts[1], line_no, key);
                } else fail(line_no, "unknown key '" + key + "' in [detectors]");
                break;
            case Section::conversion:
                if (key == "method") {
                    if (value == "none") cfg.conversion.method = ConversionSpec::Method::none;
                    else if (value == "single-crystal") cfg.conversion.method = ConversionSpec::Method::single_crystal;
                    else if (value == "two-crystal") cfg.conversion.method = ConversionSpec::Method::two_crystal;
                    else if (value == "reference") cfg.conversion.method = ConversionSpec::Method::reference;
                    else fail(line_no, "field 'method': unknown conversion method '" + value + "'");
                } else if (key == "theta") cfg.conversion.theta = to_number(value, line_no, key);
                else if (key == "phi") cfg.conversion.phi = to_number(value, line_no, key);
                else fail(line_no, "unknown key '" + key + "' in [conversion]");
                break;
            case Section::quadrature:
                if (key == "radial") cfg.quadrature.radial = static_cast<int>(to_number(value, line_no, key));
                else if (key == "angular") cfg.quadrature.angular = static_cast<int>(to_number(value, line_no, key));
                else if (key == "tolerance") cfg.quadrature.tolerance = to_number(value, line_no, key);
                else if (key == "route") {
                    if (value == "analytic") cfg.quadrature.use_quadrature = false;
                    else if (value == "quadrature") cfg.quadrature.use_quadrature = true;
                    else fail(line_no, "field 'route': expected 'analytic' or 'quadrature'");
                } else fail(line_no, "unknown key '" + key + "' in [quadrature]");
                break;
            case Section::montecarlo:
                if (key == "trials") cfg.montecarlo.trials = static_cast<std::uint64_t>(to_number(value, line_no, key));
                else if (key == "seed") cfg.montecarlo.seed = static_cast<std::uint64_t>(to_number(value, line_no, key));
                else if (key == "threads") cfg.montecarlo.threads = static_cast<int>(to_number(value, line_no, key));
                else if (key == "acceptance_floor") cfg.montecarlo.acceptance_floor = to_number(value, line_no, key);
                else if (key == "detector_efficiency") cfg.montecarlo.detector_efficiency = to_number(value, line_no, key);
                else if (key == "filter_extinction") cfg.montecarlo.filter_extinction = to_number(value, line_no, key);
                else fail(line_no, "unknown key '" + key + "' in [montecarlo]");
                break;
            case Section::estimation:
                if (key == "window") cfg.estimation.window = value;
                else if (key == "snr_threshold_db") cfg.estimation.snr_threshold_db = to_number(value, line_no, key);
                else if (key == "max_expected_frequency") cfg.estimation.max_expected_frequency = to_number(value, line_no, key);
                else fail(line_no, "unknown key '" + key + "' in [estimation]");
                break;
        }
    }

    if (cfg.sources.empty()) throw config_error("scenario has no [source] section");
    for (std::size_t i = 0; i < cfg.sources.size(); ++i) {
        if (!source_has_type[i]) {
            throw config_error("source " + std::to_string(i + 1) + " has no 'type'");
        }
        const auto& s = cfg.sources[i];
        if (s.kind != SourceSpec::Kind::sampled && !(s.wavelength > 0.0)) {
            throw config_error("source " + std::to_string(i + 1) + ": wavelength missing");
        }
        if (s.kind == SourceSpec::Kind::sampled &&
            (s.samples.empty() || !(s.wavelength > 0.0))) {
            throw config_error("source " + std::to_string(i + 1) +
                               ": sampled source needs 'sample' rows and a wavelength");
        }
        if (s.kind == SourceSpec::Kind::disc && !(s.radius > 0.0)) {
            throw config_error("source " + std::to_string(i + 1) + ": disc needs a radius");
        }
    }
    if (!have_detectors) throw config_error("scenario has no [detectors] section");
    if (cfg.detectors.samples < 1) throw config_error("[detectors] samples must be >= 1");
    return cfg;
}

ScenarioConfig ScenarioConfig::parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot open scenario file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

std::string ScenarioConfig::serialize() const {
    std::ostringstream os;
    for (const auto& s : sources) {
        os << "[source]\n";
        switch (s.kind) {
            case SourceSpec::Kind::point: os << "type = point\n"; break;
            case SourceSpec::Kind::disc: os << "type = disc\n"; break;
            case SourceSpec::Kind::sampled: os << "type = sampled\n"; break;
        }
        if (s.kind != SourceSpec::Kind::sampled) {
            os << "center = " << fmt_len(s.center.x) << ", " << fmt_len(s.center.y)
               << ", " << fmt_len(s.center.z) << "\n";
        }
        if (s.kind == SourceSpec::Kind::disc) os << "radius = " << fmt_len(s.radius) << "\n";
        os << "wavelength = " << fmt_len(s.wavelength) << "\n";
        os << "weight = " << fmt(s.weight) << "\n";
        for (const auto& [pos, intensity] : s.samples) {
            os << "sample = " << fmt_len(pos.x) << ", " << fmt_len(pos.y) << ", "
               << fmt_len(pos.z) << ", " << fmt(intensity) << "\n";
        }
        os << "\n";
    }
    os << "[detectors]\n"
       << "start = " << fmt_len(detectors.start) << "\n"
       << "stop = " << fmt_len(detectors.stop) << "\n"
       << "samples = " << detectors.samples << "\n"
       << "direction = " << fmt(detectors.dir_x) << ", " << fmt(detectors.dir_y)
       << "\n\n";
    os << "[conversion]\n"
       << "method = " << method_name(conversion.method) << "\n"
       << "theta = " << fmt(conversion.theta) << "\n"
       << "phi = " << fmt(conversion.phi) << "\n\n";
    os << "[quadrature]\n"
       << "radial = " << quadrature.radial << "\n"
       << "angular = " << quadrature.angular << "\n"
       << "tolerance = " << fmt(quadrature.tolerance) << "\n"
       << "route = " << (quadrature.use_quadrature ? "quadrature" : "analytic")
       << "\n\n";
    os << "[montecarlo]\n"
       << "trials = " << montecarlo.trials << "\n"
       << "seed = " << montecarlo.seed << "\n"
       << "threads = " << montecarlo.threads << "\n"
       << "acceptance_floor = " << fmt(montecarlo.acceptance_floor) << "\n"
       << "detector_efficiency = " << fmt(montecarlo.detector_efficiency) << "\n"
       << "filter_extinction = " << fmt(montecarlo.filter_extinction) << "\n\n";
    os << "[estimation]\n"
       << "window = " << estimation.window << "\n"
       << "snr_threshold_db = " << fmt(estimation.snr_threshold_db) << "\n"
       << "max_expected_frequency = " << fmt(estimation.max_expected_frequency)
       << "\n";
    return os.str();
}

std::vector<SourceModel> ScenarioConfig::build_sources() const {
    std::vector<SourceModel> out;
    out.reserve(sources.size());
    for (const auto& s : sources) {
        switch (s.kind) {
            case SourceSpec::Kind::point:
                out.emplace_back(PointSource{s.center, s.wavelength, s.weight});
                break;
            case SourceSpec::Kind::disc:
                out.emplace_back(
                    DiscSource{s.center, s.radius, s.wavelength, s.weight});
                break;
            case SourceSpec::Kind::sampled:
                out.emplace_back(SampledSource{s.samples, s.wavelength});
                break;
        }
    }
    return out;
}

McScenario ScenarioConfig::build_mc_scenario() const {
    McScenario mc;
    mc.sources = build_sources();
    mc.sweep = detectors.sweep();
    switch (conversion.method) {
        case ConversionSpec::Method::none:
            mc.method = McMethod::none;
            break;
        case ConversionSpec::Method::single_crystal:
        case ConversionSpec::Method::two_crystal:
            // The two-crystal method post-selects onto the same common state;
            // at the sampling level it behaves like the single-crystal pipeline.
            mc.method = McMethod::single_crystal;
            break;
        case ConversionSpec::Method::reference:
            throw config_error(
                "the reference-source method has no sampling pipeline; use the "
                "conversion module's fourfold probability instead");
    }
    mc.theta = conversion.theta;
    mc.phi = conversion.phi;
    mc.detector_efficiency = montecarlo.detector_efficiency;
    mc.filter_extinction = montecarlo.filter_extinction;
    mc.acceptance_floor = montecarlo.acceptance_floor;
    mc.threads = montecarlo.threads;
    return mc;
}

} // namespace e2i2
