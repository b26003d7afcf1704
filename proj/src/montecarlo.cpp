#include "e2i2/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <ostream>
#include <thread>

namespace e2i2 {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

} // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
        mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kPhiloxW0;
        key[1] += kPhiloxW1;
    }
    return ctr;
}

TrialRng::TrialRng(std::uint64_t seed, std::uint32_t baseline, std::uint64_t trial)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      counter_{0u, static_cast<std::uint32_t>(trial),
               static_cast<std::uint32_t>(trial >> 32), baseline} {}

void TrialRng::refill() {
    block_ = philox4x32(counter_, key_);
    ++counter_[0];
    cursor_ = 0;
}

double TrialRng::uniform() {
    if (cursor_ > 2) refill();
    const std::uint64_t bits =
        (static_cast<std::uint64_t>(block_[cursor_]) << 32) | block_[cursor_ + 1];
    cursor_ += 2;
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

namespace {

// Precomputed far-field phase coefficients per source for one baseline:
// delta_phi(x, y) = a0 - kx*x - ky*y.
struct PhaseCoeffs {
    double a0 = 0.0, kx = 0.0, ky = 0.0;
};

struct SourceSampler {
    const SourceModel* src = nullptr;
    double weight = 0.0;
    int group = 0; // wavelength group index
    std::vector<double> sample_cdf; // SampledSource only
};

PhaseCoeffs phase_coeffs(const SourceModel& src, const Baseline& bl) {
    double big_l = 1.0;
    if (src.is_point()) big_l = src.point().center.z;
    if (src.is_disc()) big_l = src.disc().center.z;
    if (src.is_sampled()) big_l = src.sampled().samples.front().first.z;
    if (!(big_l > 0.0)) {
        throw std::invalid_argument("montecarlo: sources must lie at positive z");
    }
    const double lam = src.wavelength();
    const double c = 2.0 * M_PI / (lam * big_l);
    const double qa = 0.5 * (bl.r_a.x * bl.r_a.x + bl.r_a.y * bl.r_a.y);
    const double qb = 0.5 * (bl.r_b.x * bl.r_b.x + bl.r_b.y * bl.r_b.y);
    return {c * (qa - qb), c * (bl.r_a.x - bl.r_b.x), c * (bl.r_a.y - bl.r_b.y)};
}

EmissionEvent draw_emission(const std::vector<SourceSampler>& samplers,
                            const std::vector<double>& source_cdf, TrialRng& rng) {
    const double u = rng.uniform();
    const int si = static_cast<int>(
        std::lower_bound(source_cdf.begin(), source_cdf.end(), u) -
        source_cdf.begin());
    const auto& sampler = samplers[std::min<std::size_t>(si, samplers.size() - 1)];
    const SourceModel& src = *sampler.src;

    EmissionEvent ev;
    ev.source_index = static_cast<int>(&sampler - samplers.data());
    ev.wavelength = src.wavelength();
    if (src.is_point()) {
        ev.point = src.point().center;
    } else if (src.is_disc()) {
        const auto& d = src.disc();
        const double r = d.radius * std::sqrt(rng.uniform());
        const double phi = rng.uniform(0.0, 2.0 * M_PI);
        ev.point = {d.center.x + r * std::cos(phi), d.center.y + r * std::sin(phi),
                    d.center.z};
    } else {
        const double v = rng.uniform();
        const auto& cdf = sampler.sample_cdf;
        const std::size_t k = std::min<std::size_t>(
            std::lower_bound(cdf.begin(), cdf.end(), v) - cdf.begin(),
            cdf.size() - 1);
        ev.point = src.sampled().samples[k].first;
    }
    ev.source_phase = rng.uniform(0.0, 2.0 * M_PI);
    return ev;
}

} // namespace

CoincidenceTally run_trials(const McScenario& scenario, std::uint64_t n_trials,
                            std::uint64_t seed) {
    if (scenario.sources.empty()) {
        throw std::invalid_argument("montecarlo: scenario needs at least one source");
    }
    if (n_trials == 0) {
        throw std::invalid_argument("montecarlo: trial count must be positive");
    }
    if (scenario.sweep.samples < 1) {
        throw std::invalid_argument("montecarlo: sweep needs at least one baseline");
    }

    // Wavelength groups; the single-crystal unitary acts on two of them.
    std::vector<double> group_reps;
    std::vector<SourceSampler> samplers(scenario.sources.size());
    std::vector<double> source_cdf;
    double total_weight = 0.0;
    for (std::size_t i = 0; i < scenario.sources.size(); ++i) {
        const auto& src = scenario.sources[i];
        auto& sampler = samplers[i];
        sampler.src = &src;
        sampler.weight = src.weight();
        if (!(sampler.weight > 0.0)) {
            throw std::invalid_argument("montecarlo: zero-intensity source rejected");
        }
        const double lam = src.wavelength();
        sampler.group = -1;
        for (std::size_t g = 0; g < group_reps.size(); ++g) {
            if (same_wavelength_group(lam, group_reps[g])) {
                sampler.group = static_cast<int>(g);
                break;
            }
        }
        if (sampler.group < 0) {
            sampler.group = static_cast<int>(group_reps.size());
            group_reps.push_back(lam);
        }
        if (src.is_sampled()) {
            double acc = 0.0, norm = 0.0;
            for (const auto& [pos, w] : src.sampled().samples) norm += w;
            for (const auto& [pos, w] : src.sampled().samples) {
                acc += w / norm;
                sampler.sample_cdf.push_back(acc);
            }
        }
        total_weight += sampler.weight;
    }
    if (scenario.method == McMethod::single_crystal && group_reps.size() > 2) {
        throw std::invalid_argument(
            "montecarlo: the single-crystal unitary supports at most two "
            "wavelength groups");
    }
    {
        double acc = 0.0;
        for (const auto& s : samplers) {
            acc += s.weight / total_weight;
            source_cdf.push_back(acc);
        }
    }

    // Conversion-then-filter pass probability per wavelength group, ordered
    // by ascending wavelength (group 0 = lambda1, group 1 = lambda2).
    std::vector<int> group_rank(group_reps.size());
    {
        std::vector<std::size_t> order(group_reps.size());
        for (std::size_t g = 0; g < order.size(); ++g) order[g] = g;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return group_reps[a] < group_reps[b];
        });
        for (std::size_t r = 0; r < order.size(); ++r)
            group_rank[order[r]] = static_cast<int>(r);
    }
    const double s2 = std::sin(scenario.theta) * std::sin(scenario.theta);
    std::vector<double> pass_prob(group_reps.size(), 1.0);
    if (scenario.method == McMethod::single_crystal) {
        for (std::size_t g = 0; g < group_reps.size(); ++g) {
            const double p = group_rank[g] == 0 ? s2 : 1.0 - s2;
            pass_prob[g] = p + scenario.filter_extinction * (1.0 - p);
        }
    }
    for (auto& p : pass_prob) p *= scenario.detector_efficiency;

    CoincidenceTally tally;
    tally.bins.resize(scenario.sweep.samples);
    tally.trials = n_trials;
    tally.seed = seed;
    tally.method = scenario.method;
    tally.n_sources = scenario.sources.size();

    std::atomic<std::uint64_t> emitted{0}, detected{0};

    auto run_baseline = [&](int b) {
        const Baseline bl = scenario.sweep.at(b);
        std::vector<PhaseCoeffs> coeffs(scenario.sources.size());
        const bool sampled_any = std::any_of(
            scenario.sources.begin(), scenario.sources.end(),
            [](const SourceModel& s) { return s.is_sampled(); });
        for (std::size_t i = 0; i < scenario.sources.size(); ++i) {
            if (!scenario.sources[i].is_sampled()) {
                coeffs[i] = phase_coeffs(scenario.sources[i], bl);
            }
        }
        auto path_phase_delta = [&](const EmissionEvent& ev) {
            if (sampled_any && scenario.sources[ev.source_index].is_sampled()) {
                return phase_delta_farfield(ev.point.x, ev.point.y, ev.wavelength,
                                            ev.point.z, bl);
            }
            const auto& c = coeffs[ev.source_index];
            return c.a0 - c.kx * ev.point.x - c.ky * ev.point.y;
        };

        BaselineTally& bin = tally.bins[b];
        bin.separation = scenario.sweep.separation_at(b);
        std::uint64_t local_detected = 0;
        for (std::uint64_t t = 0; t < n_trials; ++t) {
            TrialRng rng(seed, static_cast<std::uint32_t>(b), t);
            const EmissionEvent e1 = draw_emission(samplers, source_cdf, rng);
            const EmissionEvent e2 = draw_emission(samplers, source_cdf, rng);

            const bool at_a1 = rng.uniform() < 0.5;
            const bool at_a2 = rng.uniform() < 0.5;
            const bool pass1 = rng.uniform() < pass_prob[samplers[e1.source_index].group];
            const bool pass2 = rng.uniform() < pass_prob[samplers[e2.source_index].group];

            if (pass1) (at_a1 ? bin.singles_a : bin.singles_b) += 1, ++local_detected;
            if (pass2) (at_a2 ? bin.singles_a : bin.singles_b) += 1, ++local_detected;

            if (pass1 && pass2 && at_a1 != at_a2) {
                const bool same_group =
                    samplers[e1.source_index].group == samplers[e2.source_index].group;
                double q = 0.5;
                if (scenario.method == McMethod::single_crystal || same_group) {
                    // Both assignment paths share every per-photon factor
                    // except the propagation phase; the source phases and
                    // conversion phases cancel in the difference.
                    double dphi = path_phase_delta(e1) - path_phase_delta(e2);
                    if (!at_a1) dphi = -dphi;
                    q = 0.5 * (1.0 + std::cos(reduce_two_pi(dphi)));
                }
                if (rng.uniform() < q) bin.coincidences += 1;
            }
        }
        emitted += 2 * n_trials;
        detected += local_detected;
    };

    int n_threads = scenario.threads > 0
                        ? scenario.threads
                        : static_cast<int>(std::thread::hardware_concurrency());
    n_threads = std::clamp(n_threads, 1, scenario.sweep.samples);
    if (n_threads == 1) {
        for (int b = 0; b < scenario.sweep.samples; ++b) run_baseline(b);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (int i = 0; i < n_threads; ++i) {
            pool.emplace_back([&] {
                for (int b = next.fetch_add(1); b < scenario.sweep.samples;
                     b = next.fetch_add(1)) {
                    run_baseline(b);
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    tally.acceptance_rate =
        static_cast<double>(detected.load()) / static_cast<double>(emitted.load());
    tally.low_acceptance = tally.acceptance_rate < scenario.acceptance_floor;
    return tally;
}

CorrelationCurve histogram_to_curve(const CoincidenceTally& tally) {
    CorrelationCurve curve;
    curve.has_stderr = true;
    curve.normalization = "singles-product";
    if (tally.n_sources == 1) {
        curve.variant = Variant::single;
    } else {
        curve.variant = tally.method == McMethod::single_crystal ? Variant::e2i2
                                                                 : Variant::no_e2i2;
    }

    const double n = static_cast<double>(tally.trials);
    for (const auto& bin : tally.bins) {
        CurvePoint p;
        p.separation = bin.separation;
        if (bin.coincidences == 0 || bin.singles_a == 0 || bin.singles_b == 0) {
            p.empty = true;
            curve.points.push_back(p);
            continue;
        }
        const double c = static_cast<double>(bin.coincidences);
        const double sa = static_cast<double>(bin.singles_a);
        const double sb = static_cast<double>(bin.singles_b);
        p.value = 4.0 * c * n / (sa * sb);
        const double rel2 = (1.0 - c / n) / c + (1.0 - sa / (2.0 * n)) / sa +
                            (1.0 - sb / (2.0 * n)) / sb;
        p.stderror = p.value * std::sqrt(rel2);
        curve.points.push_back(p);
    }
    return curve;
}

void write_tally_csv(std::ostream& os, const CoincidenceTally& tally) {
    os << "# seed=" << tally.seed << " scenario=" << tally.scenario_hash
       << " method="
       << (tally.method == McMethod::single_crystal ? "single-crystal" : "none")
       << " acceptance=" << tally.acceptance_rate << "\n";
    os << "separation_m,coincidences,singles_a,singles_b,trials\n";
    for (const auto& bin : tally.bins) {
        char sep[32];
        std::snprintf(sep, sizeof sep, "%.17g", bin.separation);
        os << sep << ',' << bin.coincidences << ',' << bin.singles_a << ','
           << bin.singles_b << ',' << tally.trials << "\n";
    }
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace e2i2
