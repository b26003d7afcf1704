#include "e2i2/correlation.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "e2i2/bessel.hpp"

namespace e2i2 {

namespace {

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.resize(n);
    w.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double z1 = z;
            z = z1 - p0 / pp;
            if (std::fabs(z - z1) < 1e-15) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
}

struct DetectorGeometry {
    double quadratic_phase; // (pi/(lambda L)) (|r_A|^2 - |r_B|^2), transverse
    double dx, dy;          // r_A - r_B, transverse
};

DetectorGeometry transverse_geometry(const Baseline& bl, double lambda, double big_l) {
    const double qa = bl.r_a.x * bl.r_a.x + bl.r_a.y * bl.r_a.y;
    const double qb = bl.r_b.x * bl.r_b.x + bl.r_b.y * bl.r_b.y;
    return {M_PI / (lambda * big_l) * (qa - qb), bl.r_a.x - bl.r_b.x,
            bl.r_a.y - bl.r_b.y};
}

double source_distance(const SourceModel& src) {
    const double z = src.is_point() ? src.point().center.z
                   : src.is_disc()  ? src.disc().center.z
                                    : 0.0;
    if (!(z > 0.0)) {
        throw std::invalid_argument("far-field coherence needs a source at positive z");
    }
    return z;
}

/// Normalized disc integral (1/pi) int_0^1 int_0^2pi e^{-i r (kx cos + ky sin)} r dr dphi.
std::complex<double> disc_integral(double kx, double ky, int n_radial, int n_angular) {
    std::vector<double> xr, wr, xa, wa;
    gauss_legendre(n_radial, xr, wr);
    gauss_legendre(n_angular, xa, wa);

    std::vector<double> ca(n_angular), sa(n_angular);
    for (int j = 0; j < n_angular; ++j) {
        const double phi = M_PI * (xa[j] + 1.0);
        ca[j] = std::cos(phi);
        sa[j] = std::sin(phi);
    }

    std::complex<double> acc{0.0, 0.0};
    for (int i = 0; i < n_radial; ++i) {
        const double r = 0.5 * (xr[i] + 1.0);
        const double wri = 0.5 * wr[i] * r;
        std::complex<double> ring{0.0, 0.0};
        for (int j = 0; j < n_angular; ++j) {
            const double arg = -r * (kx * ca[j] + ky * sa[j]);
            ring += (M_PI * wa[j]) * unit_phasor(arg);
        }
        acc += wri * ring;
    }
    return acc / M_PI;
}

Coherence gamma_point(const PointSource& p, const Baseline& bl) {
    const double big_l = p.center.z;
    if (!(big_l > 0.0)) {
        throw std::invalid_argument("far-field coherence needs a source at positive z");
    }
    const auto geo = transverse_geometry(bl, p.wavelength, big_l);
    Coherence c;
    c.envelope = p.weight * unit_phasor(geo.quadratic_phase);
    c.center_phase = -2.0 * M_PI / (p.wavelength * big_l) *
                     (geo.dx * p.center.x + geo.dy * p.center.y);
    return c;
}

Coherence gamma_disc_grid(const DiscSource& d, const Baseline& bl, int n_radial,
                          int n_angular) {
    const double big_l = d.center.z;
    const auto geo = transverse_geometry(bl, d.wavelength, big_l);
    const double k = 2.0 * M_PI * d.radius / (d.wavelength * big_l);
    Coherence c;
    c.envelope = d.weight * unit_phasor(geo.quadratic_phase) *
                 disc_integral(k * geo.dx, k * geo.dy, n_radial, n_angular);
    c.center_phase = -2.0 * M_PI / (d.wavelength * big_l) *
                     (geo.dx * d.center.x + geo.dy * d.center.y);
    return c;
}

Coherence gamma_sampled(const SampledSource& s, const Baseline& bl) {
    Coherence c;
    for (const auto& [pos, intensity] : s.samples) {
        if (!(pos.z > 0.0)) {
            throw std::invalid_argument("far-field coherence needs samples at positive z");
        }
        const double phi =
            phase_delta_farfield(pos.x, pos.y, s.wavelength, pos.z, bl);
        c.envelope += intensity * unit_phasor(phi);
    }
    c.center_phase = 0.0;
    return c;
}

std::vector<std::vector<int>> wavelength_groups(const std::vector<SourceModel>& sources) {
    std::vector<std::vector<int>> groups;
    std::vector<double> reps;
    for (int i = 0; i < static_cast<int>(sources.size()); ++i) {
        const double lam = sources[i].wavelength();
        bool placed = false;
        for (size_t g = 0; g < reps.size(); ++g) {
            if (same_wavelength_group(lam, reps[g])) {
                groups[g].push_back(i);
                placed = true;
                break;
            }
        }
        if (!placed) {
            reps.push_back(lam);
            groups.push_back({i});
        }
    }
    return groups;
}

struct G2Terms {
    double total_weight = 0.0;
    std::vector<std::complex<double>> group_sums; // per wavelength group
};

G2Terms assemble_terms(const std::vector<SourceModel>& sources, const Baseline& bl,
                       bool quadrature, const QuadratureOptions& opts) {
    if (sources.empty()) {
        throw std::invalid_argument("correlation needs at least one source");
    }
    std::vector<Coherence> coh;
    coh.reserve(sources.size());
    for (const auto& s : sources) {
        coh.push_back(quadrature ? gamma_quadrature(s, bl, opts)
                                 : gamma_analytic(s, bl));
    }
    // Center phases enter only as differences against a common reference.
    const double phase_ref = coh.front().center_phase;

    G2Terms t;
    const auto groups = wavelength_groups(sources);
    t.group_sums.resize(groups.size());
    for (size_t g = 0; g < groups.size(); ++g) {
        for (int i : groups[g]) {
            t.group_sums[g] +=
                coh[i].envelope * unit_phasor(coh[i].center_phase - phase_ref);
        }
    }
    for (const auto& s : sources) t.total_weight += s.weight();
    return t;
}

} // namespace

std::complex<double> Coherence::value() const {
    return envelope * unit_phasor(center_phase);
}

std::complex<double> coherence_cross(const Coherence& p, const Coherence& q) {
    return p.envelope * std::conj(q.envelope) *
           unit_phasor(p.center_phase - q.center_phase);
}

std::complex<double> DiscEnvelope::value() const {
    return airy_amplitude * unit_phasor(quadratic_phase);
}

DiscEnvelope f_disc_closed_form(const DiscSource& src, const Baseline& bl) {
    const double big_l = src.center.z;
    const auto geo = transverse_geometry(bl, src.wavelength, big_l);
    const double sep = std::hypot(geo.dx, geo.dy);
    DiscEnvelope f;
    f.quadratic_phase = geo.quadratic_phase;
    f.z = 2.0 * M_PI / src.wavelength * 0.5 * src.angular_diameter_small_angle() * sep;
    f.airy_amplitude = jinc(f.z);
    return f;
}

Coherence gamma_quadrature(const SourceModel& src, const Baseline& bl,
                           const QuadratureOptions& opts) {
    if (src.is_point()) return gamma_point(src.point(), bl);
    if (src.is_sampled()) return gamma_sampled(src.sampled(), bl);

    const auto& d = src.disc();
    const Coherence coarse = gamma_disc_grid(d, bl, opts.radial, opts.angular);
    const Coherence fine = gamma_disc_grid(d, bl, 2 * opts.radial, 2 * opts.angular);
    const double scale = std::max(1.0, std::abs(fine.envelope));
    if (std::abs(fine.envelope - coarse.envelope) > opts.tolerance * scale) {
        std::ostringstream msg;
        msg << "disc quadrature did not converge at " << opts.radial << "x"
            << opts.angular << " nodes (delta "
            << std::abs(fine.envelope - coarse.envelope) << ")";
        throw convergence_error(msg.str());
    }
    return fine;
}

Coherence gamma_analytic(const SourceModel& src, const Baseline& bl) {
    if (src.is_point()) return gamma_point(src.point(), bl);
    if (src.is_sampled()) {
        throw std::invalid_argument("sampled sources have no closed-form coherence");
    }
    const auto& d = src.disc();
    const double big_l = source_distance(src);
    const auto f = f_disc_closed_form(d, bl);
    const auto geo = transverse_geometry(bl, d.wavelength, big_l);
    Coherence c;
    c.envelope = d.weight * f.value();
    c.center_phase = -2.0 * M_PI / (d.wavelength * big_l) *
                     (geo.dx * d.center.x + geo.dy * d.center.y);
    return c;
}

double g2_single(const SourceModel& src, const Baseline& bl, bool quadrature,
                 const QuadratureOptions& opts) {
    const Coherence g =
        quadrature ? gamma_quadrature(src, bl, opts) : gamma_analytic(src, bl);
    const double w = src.weight();
    return w * w + std::norm(g.envelope);
}

double g2_no_e2i2(const std::vector<SourceModel>& sources, const Baseline& bl,
                  bool quadrature, const QuadratureOptions& opts) {
    const auto t = assemble_terms(sources, bl, quadrature, opts);
    double g2 = t.total_weight * t.total_weight;
    for (const auto& s : t.group_sums) g2 += std::norm(s);
    return g2;
}

double g2_e2i2(const std::vector<SourceModel>& sources, const Baseline& bl,
               bool quadrature, const QuadratureOptions& opts) {
    const auto t = assemble_terms(sources, bl, quadrature, opts);
    std::complex<double> all{0.0, 0.0};
    for (const auto& s : t.group_sums) all += s;
    return t.total_weight * t.total_weight + std::norm(all);
}

double g2_delta(const std::vector<SourceModel>& sources, const Baseline& bl,
                bool quadrature, const QuadratureOptions& opts) {
    const auto t = assemble_terms(sources, bl, quadrature, opts);
    double g2 = 0.0;
    for (size_t g = 0; g < t.group_sums.size(); ++g) {
        for (size_t h = g + 1; h < t.group_sums.size(); ++h) {
            g2 += 2.0 * std::real(t.group_sums[g] * std::conj(t.group_sums[h]));
        }
    }
    return g2;
}

std::string variant_name(Variant v) {
    switch (v) {
        case Variant::single: return "single";
        case Variant::no_e2i2: return "no-e2i2";
        case Variant::e2i2: return "e2i2";
        case Variant::delta: return "delta";
        case Variant::multi: return "multi";
    }
    throw std::logic_error("unknown variant");
}

Variant variant_from_name(const std::string& name) {
    if (name == "single") return Variant::single;
    if (name == "no-e2i2") return Variant::no_e2i2;
    if (name == "e2i2") return Variant::e2i2;
    if (name == "delta") return Variant::delta;
    if (name == "multi") return Variant::multi;
    throw std::invalid_argument("unknown curve variant '" + name + "'");
}

std::vector<double> CorrelationCurve::separations() const {
    std::vector<double> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(p.separation);
    return out;
}

std::vector<double> CorrelationCurve::values() const {
    std::vector<double> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(p.value);
    return out;
}

double CorrelationCurve::spacing() const {
    if (points.size() < 2) {
        throw std::invalid_argument("curve has fewer than two samples");
    }
    const double h = points[1].separation - points[0].separation;
    for (size_t i = 1; i + 1 < points.size(); ++i) {
        const double hi = points[i + 1].separation - points[i].separation;
        if (std::fabs(hi - h) > 1e-9 * std::fabs(h)) {
            throw std::invalid_argument("curve is not uniformly sampled");
        }
    }
    return h;
}

Baseline BaselineSweep::at(int i) const {
    const double s = separation_at(i);
    return {{s * dir_x, s * dir_y, 0.0}, {0.0, 0.0, 0.0}};
}

double BaselineSweep::separation_at(int i) const {
    if (samples < 1) throw std::invalid_argument("sweep needs at least one sample");
    if (samples == 1) return start;
    return start + (stop - start) * static_cast<double>(i) / (samples - 1);
}

CorrelationCurve sweep_curve(const std::vector<SourceModel>& sources,
                             const BaselineSweep& sweep, Variant variant,
                             bool quadrature, const QuadratureOptions& opts) {
    if (variant == Variant::single && sources.size() != 1) {
        throw std::invalid_argument("variant 'single' requires exactly one source");
    }
    CorrelationCurve curve;
    curve.variant = variant;
    curve.points.resize(sweep.samples);
    for (int i = 0; i < sweep.samples; ++i) {
        const Baseline bl = sweep.at(i);
        double v = 0.0;
        switch (variant) {
            case Variant::single:
                v = g2_single(sources[0], bl, quadrature, opts);
                break;
            case Variant::no_e2i2:
                v = g2_no_e2i2(sources, bl, quadrature, opts);
                break;
            case Variant::e2i2:
            case Variant::multi:
                v = g2_e2i2(sources, bl, quadrature, opts);
                break;
            case Variant::delta:
                v = g2_delta(sources, bl, quadrature, opts);
                break;
        }
        curve.points[i] = {sweep.separation_at(i), v, 0.0, false};
    }
    return curve;
}

namespace {
std::string fmt_g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
} // namespace

void write_curve_csv(std::ostream& os, const CorrelationCurve& curve) {
    os << "separation_m,value,variant";
    if (curve.has_stderr) os << ",stderr";
    os << "\n";
    const std::string name = variant_name(curve.variant);
    for (const auto& p : curve.points) {
        os << fmt_g17(p.separation) << ',' << fmt_g17(p.value) << ',' << name;
        if (curve.has_stderr) os << ',' << fmt_g17(p.stderror);
        os << "\n";
    }
}

CorrelationCurve read_curve_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) {
        throw std::invalid_argument("empty curve file");
    }
    bool with_stderr = false;
    if (line == "separation_m,value,variant,stderr") {
        with_stderr = true;
    } else if (line != "separation_m,value,variant") {
        throw std::invalid_argument("unexpected curve CSV header: " + line);
    }
    CorrelationCurve curve;
    curve.has_stderr = with_stderr;
    bool variant_set = false;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::stringstream row(line);
        std::string sep, val, var, err;
        if (!std::getline(row, sep, ',') || !std::getline(row, val, ',') ||
            !std::getline(row, var, ',')) {
            throw std::invalid_argument("malformed curve CSV row: " + line);
        }
        CurvePoint p;
        p.separation = std::stod(sep);
        p.value = std::stod(val);
        if (with_stderr) {
            if (!std::getline(row, err, ',')) {
                throw std::invalid_argument("missing stderr column: " + line);
            }
            p.stderror = std::stod(err);
        }
        const Variant v = variant_from_name(var);
        if (!variant_set) {
            curve.variant = v;
            variant_set = true;
        } else if (v != curve.variant) {
            throw std::invalid_argument("mixed variants in one curve file");
        }
        curve.points.push_back(p);
    }
    if (curve.points.empty()) {
        throw std::invalid_argument("curve file has no data rows");
    }
    return curve;
}

} // namespace e2i2
