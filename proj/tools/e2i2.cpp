#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "e2i2/scenario.hpp"

namespace fs = std::filesystem;
using namespace e2i2;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
}

void write_curve_file(const fs::path& path, const CorrelationCurve& curve) {
    std::ostringstream os;
    write_curve_csv(os, curve);
    write_file(path, os.str());
    std::cout << "wrote " << path.string() << "\n";
}

std::vector<Variant> default_variants(const ScenarioConfig& cfg) {
    if (cfg.sources.size() == 1) return {Variant::single};
    return {Variant::no_e2i2, Variant::e2i2, Variant::delta};
}

int cmd_validate(const std::string& config_path) {
    const auto cfg = ScenarioConfig::parse_file(config_path);
    const auto round_trip = ScenarioConfig::parse(cfg.serialize());
    if (!(round_trip == cfg)) {
        throw std::runtime_error("internal error: scenario does not round-trip");
    }
    std::cout << "ok: " << cfg.sources.size() << " source(s), "
              << cfg.detectors.samples << " baseline sample(s)\n";
    return 0;
}

int cmd_analytic(const std::string& config_path, const std::string& out_dir,
                 const std::vector<std::string>& variant_names) {
    const auto cfg = ScenarioConfig::parse_file(config_path);
    const auto sources = cfg.build_sources();
    fs::create_directories(out_dir);

    std::vector<Variant> variants;
    if (variant_names.empty()) {
        variants = default_variants(cfg);
    } else {
        for (const auto& name : variant_names) variants.push_back(variant_from_name(name));
    }

    const QuadratureOptions qopts{cfg.quadrature.radial, cfg.quadrature.angular,
                                  cfg.quadrature.tolerance};
    for (const Variant v : variants) {
        const auto curve = sweep_curve(sources, cfg.detectors.sweep(), v,
                                       cfg.quadrature.use_quadrature, qopts);
        write_curve_file(fs::path(out_dir) / (variant_name(v) + ".csv"), curve);
    }
    return 0;
}

int cmd_montecarlo(const std::string& config_path, const std::string& out_dir,
                   std::uint64_t trials_override, bool have_trials,
                   std::uint64_t seed_override, bool have_seed,
                   const std::vector<std::string>& variant_names) {
    auto cfg = ScenarioConfig::parse_file(config_path);
    if (have_trials) cfg.montecarlo.trials = trials_override;
    if (have_seed) cfg.montecarlo.seed = seed_override;
    if (cfg.montecarlo.trials == 0) {
        throw config_error("montecarlo: trial count must be positive");
    }
    fs::create_directories(out_dir);

    const std::string scenario_hash = fnv1a_hex(cfg.serialize());
    auto run = [&](McMethod method) {
        McScenario mc = cfg.build_mc_scenario();
        mc.method = method;
        auto tally = run_trials(mc, cfg.montecarlo.trials, cfg.montecarlo.seed);
        tally.scenario_hash = scenario_hash;
        return tally;
    };

    const bool want_delta = std::find(variant_names.begin(), variant_names.end(),
                                      "delta") != variant_names.end();

    McScenario mc = cfg.build_mc_scenario();
    auto tally = run(mc.method);
    std::cout << "seed " << tally.seed << ", acceptance rate "
              << tally.acceptance_rate << "\n";
    if (tally.low_acceptance) {
        std::cout << "warning: acceptance rate below the configured floor; "
                     "statistics may be poor\n";
    }
    {
        std::ostringstream os;
        write_tally_csv(os, tally);
        write_file(fs::path(out_dir) / "tally.csv", os.str());
        std::cout << "wrote " << (fs::path(out_dir) / "tally.csv").string() << "\n";
    }
    write_curve_file(fs::path(out_dir) / "mc_curve.csv", histogram_to_curve(tally));

    if (want_delta) {
        if (mc.method != McMethod::single_crystal) {
            throw config_error(
                "variant 'delta' needs a conversion method (e2i2 run minus a "
                "no-conversion run)");
        }
        const auto tally_none = run(McMethod::none);
        const auto on = histogram_to_curve(tally);
        const auto off = histogram_to_curve(tally_none);
        CorrelationCurve delta;
        delta.variant = Variant::delta;
        delta.has_stderr = true;
        delta.normalization = "singles-product";
        for (std::size_t i = 0; i < on.points.size(); ++i) {
            CurvePoint p;
            p.separation = on.points[i].separation;
            p.empty = on.points[i].empty || off.points[i].empty;
            if (!p.empty) {
                p.value = on.points[i].value - off.points[i].value;
                p.stderror = std::hypot(on.points[i].stderror, off.points[i].stderror);
            }
            delta.points.push_back(p);
        }
        write_curve_file(fs::path(out_dir) / "mc_delta.csv", delta);
    }
    return 0;
}

// Rectangular correlation map `bx_m,by_m,value` sampled on a uniform grid
// starting at the origin, any row order.
DeltaGrid read_grid_csv(const std::string& path) {
    std::istringstream is(slurp(path));
    std::string line;
    if (!std::getline(is, line) || line != "bx_m,by_m,value") {
        throw std::runtime_error("grid file '" + path +
                                 "' must start with header bx_m,by_m,value");
    }
    struct Row {
        double x, y, v;
    };
    std::vector<Row> rows;
    std::vector<double> xs, ys;
    auto remember = [](std::vector<double>& axis, double c) {
        for (double v : axis) {
            if (std::fabs(v - c) <= 1e-9 * std::max(1.0, std::fabs(v))) return;
        }
        axis.push_back(c);
    };
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::stringstream row(line);
        std::string sx, sy, sv;
        if (!std::getline(row, sx, ',') || !std::getline(row, sy, ',') ||
            !std::getline(row, sv, ',')) {
            throw std::runtime_error("malformed grid row: " + line);
        }
        rows.push_back({std::stod(sx), std::stod(sy), std::stod(sv)});
        remember(xs, rows.back().x);
        remember(ys, rows.back().y);
    }
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    if (xs.size() < 2 || ys.size() < 2 || rows.size() != xs.size() * ys.size()) {
        throw std::runtime_error("grid file '" + path +
                                 "' is not a complete rectangular grid");
    }
    DeltaGrid grid;
    grid.nx = static_cast<int>(xs.size());
    grid.ny = static_cast<int>(ys.size());
    grid.dx = xs[1] - xs[0];
    grid.dy = ys[1] - ys[0];
    grid.values.assign(rows.size(), 0.0);
    auto index_of = [](const std::vector<double>& axis, double c) {
        for (std::size_t i = 0; i < axis.size(); ++i) {
            if (std::fabs(axis[i] - c) <= 1e-9 * std::max(1.0, std::fabs(c))) {
                return static_cast<int>(i);
            }
        }
        throw std::runtime_error("grid coordinate lookup failed");
    };
    for (const auto& r : rows) {
        grid.values[index_of(ys, r.y) * grid.nx + index_of(xs, r.x)] = r.v;
    }
    return grid;
}

int cmd_estimate(const std::string& config_path, const std::string& out_dir,
                 const std::vector<std::string>& curve_paths,
                 const std::vector<std::string>& grid_paths) {
    const auto cfg = ScenarioConfig::parse_file(config_path);
    if (curve_paths.empty() && grid_paths.empty()) {
        throw std::runtime_error("estimate needs at least one --curve or --grid file");
    }
    fs::create_directories(out_dir);

    std::vector<double> wavelengths;
    for (const auto& s : cfg.sources) {
        const bool known = std::any_of(
            wavelengths.begin(), wavelengths.end(),
            [&](double w) { return same_wavelength_group(w, s.wavelength); });
        if (!known) wavelengths.push_back(s.wavelength);
    }
    std::sort(wavelengths.begin(), wavelengths.end());

    std::ostringstream report, csv;
    csv << "quantity,value,uncertainty,unit\n";
    const auto opts = cfg.estimation.options();

    bool did_any = false;
    for (const auto& path : curve_paths) {
        std::istringstream is(slurp(path));
        const auto curve = read_curve_csv(is);
        if (curve.variant == Variant::single) {
            const auto est = estimate_diameter(curve, wavelengths.front());
            report << "curve: " << path << "\n";
            report << "angular_diameter_rad: " << est.angular_diameter << "\n";
            report << "first_zero_m: " << est.first_zero_m << "\n";
            report << "first_zero_uncertainty_m: " << est.uncertainty_m << "\n";
            csv << "angular_diameter," << est.angular_diameter << ",,rad\n";
            csv << "first_zero," << est.first_zero_m << ',' << est.uncertainty_m
                << ",m\n";
            did_any = true;
        } else if (curve.variant == Variant::delta) {
            if (wavelengths.size() < 2) {
                throw std::runtime_error(
                    "delta curve given but the scenario has a single wavelength");
            }
            const double big_l = cfg.sources.front().kind == SourceSpec::Kind::sampled
                                     ? cfg.sources.front().samples.front().first.z
                                     : cfg.sources.front().center.z;
            const auto est = estimate_separation(curve, wavelengths[0],
                                                 wavelengths[1], big_l, opts);
            report << "curve: " << path << "\n";
            report << "separation_m: " << est.separation_m << "\n";
            report << "dominant_frequency_cpm: " << est.frequency << "\n";
            report << "confidence_width_m: " << est.confidence_width_m << "\n";
            report << "snr_db: " << est.snr_db << "\n";
            csv << "separation," << est.separation_m << ',' << est.confidence_width_m
                << ",m\n";
            csv << "dominant_frequency," << est.frequency << ",,cycles/m\n";
            did_any = true;
        } else {
            report << "curve: " << path << " (variant '"
                   << variant_name(curve.variant)
                   << "' carries no estimator; pass a 'single' or 'delta' curve)\n";
        }
    }
    for (const auto& path : grid_paths) {
        const double big_l = cfg.sources.front().kind == SourceSpec::Kind::sampled
                                 ? cfg.sources.front().samples.front().first.z
                                 : cfg.sources.front().center.z;
        const auto grid = read_grid_csv(path);
        const auto rep = extract_center_vectors(
            grid, static_cast<int>(cfg.sources.size()), big_l, opts);
        report << "grid: " << path << "\n";
        for (const auto& cv : rep.vectors) {
            report << "pair_" << cv.p << '_' << cv.q << ": ";
            if (cv.resolved) {
                report << cv.vx << ' ' << cv.vy << "\n";
                csv << "center_vector_" << cv.p << '_' << cv.q << "_x," << cv.vx
                    << ",,m\n";
                csv << "center_vector_" << cv.p << '_' << cv.q << "_y," << cv.vy
                    << ",,m\n";
            } else {
                report << "unresolved\n";
            }
        }
        for (const auto& [p, q] : rep.ambiguous_pairs) {
            report << "ambiguous_pair: " << p << ' ' << q << "\n";
        }
        did_any = true;
    }
    if (!did_any) {
        throw std::runtime_error(
            "no estimable curve among the inputs: the diameter estimator needs "
            "variant 'single', the separation estimator needs variant 'delta'");
    }

    std::cout << report.str();
    write_file(fs::path(out_dir) / "estimates.txt", report.str());
    write_file(fs::path(out_dir) / "estimates.csv", csv.str());
    std::cout << "wrote " << (fs::path(out_dir) / "estimates.csv").string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-wavelength intensity interferometry toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".";
    std::vector<std::string> variant_names, curve_paths, grid_paths;
    double trials = 0.0; // double so that counts like 1e6 parse
    std::uint64_t seed = 0;

    auto add_common = [&](CLI::App* sub, bool need_out) {
        sub->add_option("--config", config_path, "scenario file")->required();
        if (need_out) sub->add_option("--out", out_dir, "output directory");
    };

    auto* validate = app.add_subcommand("validate", "check a scenario file");
    add_common(validate, false);

    auto* analytic = app.add_subcommand("analytic", "write analytic correlation curves");
    add_common(analytic, true);
    analytic->add_option("--variant", variant_names,
                         "curve variant(s): single, no-e2i2, e2i2, delta");

    auto* montecarlo = app.add_subcommand("montecarlo", "run the photon-level sampler");
    add_common(montecarlo, true);
    auto* trials_opt = montecarlo->add_option("--trials", trials, "trials per baseline");
    auto* seed_opt = montecarlo->add_option("--seed", seed, "RNG seed");
    montecarlo->add_option("--variant", variant_names,
                           "extra outputs; 'delta' adds an e2i2-minus-none curve");

    auto* estimate = app.add_subcommand("estimate", "recover source parameters from curves");
    add_common(estimate, true);
    estimate->add_option("--curve", curve_paths, "curve CSV file(s)");
    estimate->add_option("--grid", grid_paths, "2D correlation map CSV file(s)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) return cmd_validate(config_path);
        if (analytic->parsed()) return cmd_analytic(config_path, out_dir, variant_names);
        if (montecarlo->parsed()) {
            if (trials_opt->count() > 0 && !(trials >= 0.0 && trials < 1.9e19)) {
                throw config_error("montecarlo: trial count out of range");
            }
            return cmd_montecarlo(config_path, out_dir,
                                  static_cast<std::uint64_t>(trials),
                                  trials_opt->count() > 0, seed,
                                  seed_opt->count() > 0, variant_names);
        }
        if (estimate->parsed()) {
            return cmd_estimate(config_path, out_dir, curve_paths, grid_paths);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
