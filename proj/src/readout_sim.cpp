#include "spinshot/montecarlo.hpp"

#include "spinshot/errors.hpp"
#include "spinshot/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace spinshot {

namespace {

constexpr std::uint64_t kShotsPerChunk = 1 << 14;

struct ChunkTally {
    std::vector<std::uint64_t> histogram;
    std::vector<std::uint64_t> pulse_counts;
    std::vector<PhotonRecord> records;
    std::uint64_t flipped = 0;
    std::uint64_t excitations_before_flip = 0;
};

void add_count(std::vector<std::uint64_t>& hist, std::size_t k, std::uint64_t n = 1) {
    if (hist.size() <= k) hist.resize(k + 1, 0);
    hist[k] += n;
}

}  // namespace

CountDistribution ReadoutSimResult::distribution(SpinState initial, int n_pulses) const {
    CountDistribution d;
    d.initial = initial;
    d.n_pulses = n_pulses;
    d.probabilities.resize(histogram.size());
    for (std::size_t k = 0; k < histogram.size(); ++k)
        d.probabilities[k] = static_cast<double>(histogram[k]) / static_cast<double>(shots);
    return d;
}

ReadoutSimResult simulate_readout_shots(const ReadoutParams& params, SpinState initial,
                                        std::uint64_t shots, std::uint64_t seed,
                                        const ReadoutSimOptions& options) {
    params.validate();
    if (shots < 1) throw InvalidInput("shots must be >= 1");
    if (params.n_pulses > kMaxPulses) throw CapacityError("n_pulses exceeds capacity");
    if (!(options.emission_lifetime_us > 0.0)) throw InvalidInput("emission lifetime must be > 0");

    const int n = params.n_pulses;
    const double a = params.flip_bright;
    const double b = params.flip_dark;
    const double p = params.p_excite;
    const double eta = params.eta_detect;
    const double window = params.gate_window_us;
    const double gate_mean = params.dark_rate_hz * 1e-6 * window;
    const std::size_t n_chunks = (shots + kShotsPerChunk - 1) / kShotsPerChunk;
    std::vector<ChunkTally> tallies(n_chunks);

    parallel_chunks(n_chunks, [&](std::size_t chunk) {
        ChunkTally& tally = tallies[chunk];
        tally.pulse_counts.assign(n, 0);
        const std::uint64_t first = chunk * kShotsPerChunk;
        const std::uint64_t last = std::min(shots, first + kShotsPerChunk);
        std::vector<PhotonEvent> events;
        for (std::uint64_t shot = first; shot < last; ++shot) {
            RandomStream rng(seed, shot);
            const bool keep = shot < options.max_records;
            events.clear();
            bool bright = initial == SpinState::bright;
            bool left_initial = false;
            std::uint64_t excitations = 0;
            int count = 0;
            for (int k = 0; k < n; ++k) {
                const double gate_start = k * params.pulse_period_us + params.pulse_length_us;
                int detected = 0;
                if (bright) {
                    if (rng.uniform() < a) {
                        bright = false;
                        left_initial = true;
                    } else if (rng.uniform() < p) {
                        if (!left_initial) ++excitations;
                        if (rng.uniform() < eta) {
                            ++detected;
                            const double dt = rng.truncated_exponential(options.emission_lifetime_us, window);
                            if (keep) events.push_back({gate_start + dt, k, PhotonOrigin::emitter});
                        }
                    }
                } else if (rng.uniform() < b) {
                    bright = true;
                    left_initial = true;
                }
                const int dark = rng.poisson(gate_mean);
                for (int j = 0; j < dark; ++j) {
                    const double dt = rng.uniform() * window;
                    if (keep) events.push_back({gate_start + dt, k, PhotonOrigin::dark});
                }
                detected += dark;
                tally.pulse_counts[k] += static_cast<std::uint64_t>(detected);
                count += detected;
            }
            add_count(tally.histogram, static_cast<std::size_t>(count));
            if (left_initial) {
                ++tally.flipped;
                tally.excitations_before_flip += excitations;
            }
            if (keep) {
                std::stable_sort(events.begin(), events.end(),
                                 [](const PhotonEvent& x, const PhotonEvent& y) {
                                     return x.timestamp_us < y.timestamp_us;
                                 });
                tally.records.push_back({shot, n, events});
            }
        }
    });

    ReadoutSimResult out;
    out.shots = shots;
    std::vector<std::uint64_t> pulse_counts(n, 0);
    std::uint64_t excitations = 0;
    for (auto& t : tallies) {
        for (std::size_t k = 0; k < t.histogram.size(); ++k) add_count(out.histogram, k, t.histogram[k]);
        for (int k = 0; k < n; ++k) pulse_counts[k] += t.pulse_counts[k];
        out.flipped_shots += t.flipped;
        excitations += t.excitations_before_flip;
        for (auto& r : t.records) out.records.push_back(std::move(r));
    }
    out.trace.resize(n);
    for (int k = 0; k < n; ++k)
        out.trace[k] = static_cast<double>(pulse_counts[k]) / static_cast<double>(shots);
    out.mean_excitations_before_flip =
        out.flipped_shots ? static_cast<double>(excitations) / static_cast<double>(out.flipped_shots) : 0.0;
    return out;
}

double total_variation(const CountDistribution& p, const CountDistribution& q) {
    const std::size_t n = std::max(p.probabilities.size(), q.probabilities.size());
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += std::abs(p.at(k) - q.at(k));
    return 0.5 * s;
}

double excitation_probability(double area_pi) {
    const double s = std::sin(area_pi * std::numbers::pi / 2.0);
    return s * s;
}

FlipModel FlipModel::linear(double bright0, double bright_slope, double dark0, double dark_slope) {
    auto clamp = [](double v) { return std::clamp(v, 0.0, 1.0); };
    return {[=](double area) { return clamp(bright0 + bright_slope * area); },
            [=](double area) { return clamp(dark0 + dark_slope * area); }};
}

FlipModel FlipModel::per_excitation(double bright0, double bright_slope, double dark0, double dark_slope) {
    auto clamp = [](double v) { return std::clamp(v, 0.0, 1.0); };
    return {[=](double area) { return clamp(excitation_probability(area) * (bright0 + bright_slope * area)); },
            [=](double area) { return clamp(excitation_probability(area) * (dark0 + dark_slope * area)); }};
}

std::vector<AreaScanPoint> pulse_area_scan(const std::vector<double>& areas, const FlipModel& flips,
                                           const ReadoutParams& base, std::uint64_t seed,
                                           const AreaScanOptions& options) {
    std::vector<AreaScanPoint> out;
    for (std::size_t i = 0; i < areas.size(); ++i) {
        AreaScanPoint pt;
        pt.area_pi = areas[i];
        pt.p_excite = excitation_probability(areas[i]);
        pt.flip_bright = flips.flip_bright(areas[i]);
        pt.flip_dark = flips.flip_dark(areas[i]);

        ReadoutParams params = base;
        params.p_excite = pt.p_excite;
        params.flip_bright = pt.flip_bright;
        params.flip_dark = pt.flip_dark;
        params.n_pulses = options.trace_pulses;
        ReadoutSimOptions sim = options.sim;
        sim.max_records = 0;
        const ReadoutSimResult run = simulate_readout_shots(params, SpinState::bright, options.shots,
                                                            derive_seed(seed, i), sim);
        pt.cyclicity_direct = run.mean_excitations_before_flip;
        try {
            const DecayFit fit = fit_decay_constant(run.trace);
            pt.n0 = fit.n0;
            pt.n0_sigma = fit.n0_sigma;
            pt.cyclicity = pt.p_excite > 0.0 ? cyclicity(pt.p_excite, fit.n0) : 0.0;
            pt.fit_ok = true;
        } catch (const Error&) {
            pt.fit_ok = false;
        }
        const ReadoutOptimum opt = optimize_readout(params, 1, options.n_max);
        pt.f_star = opt.f_star;
        pt.n_star = opt.n_star;
        pt.threshold_star = opt.threshold_star;
        out.push_back(pt);
    }
    return out;
}

}  // namespace spinshot
