#include "spinshot/montecarlo.hpp"

#include "spinshot/errors.hpp"
#include "spinshot/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace spinshot {

namespace {

constexpr std::uint64_t kShotsPerChunk = 1 << 12;

struct Level {
    DecayBranching branching;
    double lifetime_us = 0.0;
};

struct Tally {
    std::vector<std::uint64_t> histogram;
    std::vector<std::uint64_t> gate_counts;
    std::vector<PhotonRecord> records;
    std::uint64_t final_bright = 0;
};

// Collapses the Bloch vector onto z = +-1.
bool measure_up(BlochVector& v, RandomStream& rng) {
    const bool up = rng.uniform() < 0.5 * (1.0 + v.z);
    v = {0.0, 0.0, up ? 1.0 : -1.0};
    return up;
}

}  // namespace

TimelineSimResult simulate_timeline(const Timeline& timeline, const TimelineModel& model,
                                    SpinState initial, std::uint64_t shots, std::uint64_t seed,
                                    std::size_t max_records) {
    model.bath.validate();
    if (shots < 1) throw InvalidInput("shots must be >= 1");
    if (!(model.eta_detect >= 0.0 && model.eta_detect <= 1.0)) throw InvalidInput("eta_detect must be in [0, 1]");

    const TransitionSet& tr = model.transitions;
    const double tau_bulk = model.emitter.bulk_lifetime_us;
    // Upper levels: up_e decays via A (to up_g) or D (to down_g); down_e via
    // B (to down_g) or C (to up_g).
    const DecayBranching up_e = decay_branching(model.emitter, model.cavity, tr.freq_a_ghz, tr.freq_d_ghz);
    const DecayBranching down_e = decay_branching(model.emitter, model.cavity, tr.freq_b_ghz, tr.freq_c_ghz);
    const Level level_up{up_e, tau_bulk / up_e.total()};
    const Level level_down{down_e, tau_bulk / down_e.total()};
    const double sd_fwhm_ghz = model.emitter.spectral_diffusion_fwhm_mhz * 1e-3;
    auto line_weight = [&](double detuning_ghz) {
        if (sd_fwhm_ghz <= 0.0) return detuning_ghz == 0.0 ? 1.0 : 0.0;
        return lorentzian_suppression(detuning_ghz, sd_fwhm_ghz);
    };

    const std::size_t n_gates = static_cast<std::size_t>(timeline.gate_count);
    const std::size_t n_chunks = (shots + kShotsPerChunk - 1) / kShotsPerChunk;
    std::vector<Tally> tallies(n_chunks);

    parallel_chunks(n_chunks, [&](std::size_t chunk) {
        Tally& tally = tallies[chunk];
        tally.gate_counts.assign(n_gates, 0);
        const std::uint64_t first = chunk * kShotsPerChunk;
        const std::uint64_t last = std::min(shots, first + kShotsPerChunk);
        std::vector<PhotonEvent> events;
        for (std::uint64_t shot = first; shot < last; ++shot) {
            RandomStream rng(seed, shot);
            const bool keep = shot < max_records;
            events.clear();
            ShotState state;
            state.spin.z = initial == SpinState::bright ? 1.0 : -1.0;
            state.frequency_offset_mhz = model.bath.sample_offset_mhz(rng);
            double emission_time = -1.0;  // pending emitter photon, < 0 if none
            std::uint64_t total = 0;

            for (const TimelineEvent& ev : timeline.events) {
                switch (ev.kind) {
                    case EventKind::wait: {
                        if (ev.duration_us > 0.0 &&
                            rng.uniform() < -std::expm1(-ev.duration_us * 1e-6 / model.bath.t1_spin_s))
                            state.spin = {0.0, 0.0, rng.uniform() < 0.5 ? 1.0 : -1.0};
                        break;
                    }
                    case EventKind::mw_pulse: {
                        const double detuning_khz =
                            (ev.mw_frequency_mhz - tr.ground_splitting_ghz * 1e3 - state.frequency_offset_mhz) * 1e3;
                        state = apply_mw_pulse(state, model.rabi_khz, detuning_khz, ev.duration_us,
                                               ev.phase_deg * std::numbers::pi / 180.0);
                        break;
                    }
                    case EventKind::optical_pulse: {
                        if (emission_time >= ev.start_us) break;  // still excited
                        const bool up = measure_up(state.spin, rng);
                        if (rng.uniform() < (up ? model.flip_bright : model.flip_dark)) {
                            state.spin.z = -state.spin.z;
                            break;
                        }
                        const double p = excitation_probability(ev.area_pi);
                        const double f = ev.optical_frequency_ghz;
                        // Same-spin (A or B) and cross (C or D) excitation weights.
                        const double w_same = p * line_weight(f - (up ? tr.freq_a_ghz : tr.freq_b_ghz));
                        const double w_cross = p * line_weight(f - (up ? tr.freq_c_ghz : tr.freq_d_ghz));
                        const double u = rng.uniform();
                        if (u >= w_same + w_cross) break;
                        const bool upper_up = (u < w_same) == up;
                        const Level& level = upper_up ? level_up : level_down;
                        const bool flip_decay = rng.uniform() < level.branching.flip_probability();
                        // up_e lands in up_g unless it decays via D; down_e lands in down_g unless via C.
                        const bool ends_up = upper_up != flip_decay;
                        state.spin.z = ends_up ? 1.0 : -1.0;
                        emission_time = ev.end_us() + rng.exponential(level.lifetime_us);
                        break;
                    }
                    case EventKind::detect: {
                        const double t0 = ev.start_us, t1 = ev.end_us();
                        int detected = 0;
                        if (emission_time >= t0 && emission_time < t1) {
                            if (rng.uniform() < model.eta_detect) {
                                ++detected;
                                if (keep) events.push_back({emission_time, ev.gate_index, PhotonOrigin::emitter});
                            }
                            emission_time = -1.0;
                        }
                        const int dark = rng.poisson(model.dark_rate_hz * 1e-6 * ev.duration_us);
                        for (int j = 0; j < dark; ++j) {
                            const double t = t0 + rng.uniform() * ev.duration_us;
                            if (keep) events.push_back({t, ev.gate_index, PhotonOrigin::dark});
                        }
                        detected += dark;
                        tally.gate_counts[static_cast<std::size_t>(ev.gate_index)] += static_cast<std::uint64_t>(detected);
                        total += static_cast<std::uint64_t>(detected);
                        break;
                    }
                }
                if (emission_time >= 0.0 && emission_time < ev.end_us()) emission_time = -1.0;
            }
            if (tally.histogram.size() <= total) tally.histogram.resize(total + 1, 0);
            ++tally.histogram[total];
            tally.final_bright += measure_up(state.spin, rng);
            if (keep) {
                std::stable_sort(events.begin(), events.end(),
                                 [](const PhotonEvent& x, const PhotonEvent& y) {
                                     return x.timestamp_us < y.timestamp_us;
                                 });
                tally.records.push_back({shot, timeline.gate_count, events});
            }
        }
    });

    TimelineSimResult out;
    out.shots = shots;
    out.gates = timeline.gate_count;
    out.gate_counts.assign(n_gates, 0);
    for (auto& t : tallies) {
        if (out.histogram.size() < t.histogram.size()) out.histogram.resize(t.histogram.size(), 0);
        for (std::size_t k = 0; k < t.histogram.size(); ++k) out.histogram[k] += t.histogram[k];
        for (std::size_t g = 0; g < n_gates; ++g) out.gate_counts[g] += t.gate_counts[g];
        out.final_bright += t.final_bright;
        for (auto& r : t.records) out.records.push_back(std::move(r));
    }
    return out;
}

}  // namespace spinshot
