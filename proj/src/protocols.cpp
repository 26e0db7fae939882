#include "spinshot/montecarlo.hpp"

#include "spinshot/errors.hpp"
#include "spinshot/parallel.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace spinshot {

Protocol protocol_from_string(std::string_view name) {
    if (name == "t1") return Protocol::t1;
    if (name == "odmr") return Protocol::odmr;
    if (name == "rabi") return Protocol::rabi;
    if (name == "echo") return Protocol::echo;
    throw InvalidInput("unknown protocol '" + std::string(name) + "' (expected t1, odmr, rabi, echo)");
}

std::string_view to_string(Protocol p) {
    switch (p) {
        case Protocol::t1: return "t1";
        case Protocol::odmr: return "odmr";
        case Protocol::rabi: return "rabi";
        case Protocol::echo: return "echo";
    }
    return "?";
}

namespace {

double flip_probability(const ShotState& s) { return 0.5 * (1.0 - s.spin.z); }
double up_probability(const ShotState& s) { return 0.5 * (1.0 + s.spin.z); }

// P(up) at the end of a Hahn echo with free evolution x, first pulse phase phi.
double echo_up(double x, double phi, double rabi, double detuning, const BathParams& bath) {
    const double half_pi = 250.0 / rabi;
    const double pi_len = 500.0 / rabi;
    ShotState s;
    s = apply_mw_pulse(s, rabi, detuning, half_pi, phi);
    s.spin = precess(s.spin, detuning, x / 2.0);
    s = apply_mw_pulse(s, rabi, detuning, pi_len, 0.0);
    s.spin = precess(s.spin, detuning, x / 2.0);
    const double coherence = std::exp(-std::pow(x / bath.t2_echo_us, bath.echo_exponent));
    s.spin.x *= coherence;
    s.spin.y *= coherence;
    s = apply_mw_pulse(s, rabi, detuning, half_pi, 0.0);
    return up_probability(s);
}

struct PointTally {
    std::uint64_t hits = 0;
    std::uint64_t hits_ref = 0;
};

}  // namespace

std::vector<CurvePoint> run_protocol(Protocol protocol, const std::vector<double>& sweep,
                                     const BathParams& bath, const ProtocolSettings& settings,
                                     std::uint64_t shots_per_point, std::uint64_t seed) {
    bath.validate();
    if (shots_per_point < 1) throw InvalidInput("shots per point must be >= 1");
    if (!(settings.rabi_khz > 0.0)) throw InvalidInput("rabi frequency must be > 0");
    for (double x : sweep) {
        if (!std::isfinite(x)) throw InvalidInput("sweep values must be finite");
        if (protocol != Protocol::odmr && x < 0.0)
            throw InvalidInput("sweep values must be >= 0 for " + std::string(to_string(protocol)));
    }
    const double odmr_len = settings.odmr_pulse_us > 0.0 ? settings.odmr_pulse_us : 500.0 / settings.rabi_khz;

    std::vector<PointTally> tallies(sweep.size());
    parallel_chunks(sweep.size(), [&](std::size_t j) {
        const double x = sweep[j];
        const std::uint64_t point_seed = derive_seed(seed, j);
        PointTally& t = tallies[j];
        for (std::uint64_t shot = 0; shot < shots_per_point; ++shot) {
            RandomStream rng(point_seed, shot);
            switch (protocol) {
                case Protocol::t1: {
                    const double relax = -std::expm1(-x / bath.t1_spin_s);
                    bool up = true;
                    if (rng.uniform() < relax) up = rng.uniform() < 0.5 * (1.0 + settings.t1_equilibrium_z);
                    t.hits += up;
                    break;
                }
                case Protocol::odmr: {
                    const double offset_mhz = bath.sample_offset_mhz(rng);
                    const ShotState s = apply_mw_pulse(ShotState{}, settings.rabi_khz,
                                                       (x - offset_mhz) * 1e3, odmr_len, 0.0);
                    t.hits += rng.uniform() < flip_probability(s);
                    break;
                }
                case Protocol::rabi: {
                    const double detuning = settings.drive_detuning_sigma_khz * rng.normal();
                    const double rabi = settings.rabi_khz * (1.0 + settings.drive_amplitude_noise * rng.normal());
                    const ShotState s = apply_mw_pulse(ShotState{}, rabi, detuning, x, 0.0);
                    t.hits += rng.uniform() < flip_probability(s);
                    break;
                }
                case Protocol::echo: {
                    const double detuning = settings.drive_detuning_sigma_khz * rng.normal();
                    const double rabi = settings.rabi_khz * (1.0 + settings.drive_amplitude_noise * rng.normal());
                    t.hits += rng.uniform() < echo_up(x, 0.0, rabi, detuning, bath);
                    t.hits_ref += rng.uniform() < echo_up(x, std::numbers::pi, rabi, detuning, bath);
                    break;
                }
            }
        }
    });

    std::vector<CurvePoint> out;
    out.reserve(sweep.size());
    const double n = static_cast<double>(shots_per_point);
    for (std::size_t j = 0; j < sweep.size(); ++j) {
        CurvePoint pt;
        pt.x = sweep[j];
        pt.shots = shots_per_point;
        const double m = static_cast<double>(tallies[j].hits) / n;
        if (protocol == Protocol::echo) {
            const double m_ref = static_cast<double>(tallies[j].hits_ref) / n;
            pt.mean = m - m_ref;
            pt.stderr_ = std::sqrt((m * (1.0 - m) + m_ref * (1.0 - m_ref)) / n);
        } else {
            pt.mean = m;
            pt.stderr_ = std::sqrt(m * (1.0 - m) / n);
        }
        out.push_back(pt);
    }
    return out;
}

}  // namespace spinshot
