#include "spinshot/montecarlo.hpp"

#include "spinshot/constants.hpp"
#include "spinshot/errors.hpp"

#include <cmath>
#include <numbers>

namespace spinshot {

double BlochVector::norm() const { return std::sqrt(x * x + y * y + z * z); }

void BathParams::validate() const {
    double sum = 0.0;
    for (double w : odmr_weights) {
        if (!(w >= 0.0)) throw InvalidConfig("bath.odmr_weights must be >= 0");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw InvalidConfig("bath.odmr_weights must sum to 1");
    if (!(odmr_sigma_mhz >= 0.0)) throw InvalidConfig("bath.odmr_sigma must be >= 0");
    if (!(t1_spin_s > 0.0)) throw InvalidConfig("bath.t1_spin must be > 0");
    if (!(t2_echo_us > 0.0)) throw InvalidConfig("bath.t2_echo must be > 0");
    if (!(echo_exponent > 0.0)) throw InvalidConfig("bath.echo_exponent must be > 0");
}

BathParams BathParams::at_2p75_kelvin() { return BathParams{}; }

BathParams BathParams::at_4p45_kelvin() {
    BathParams b;
    b.t2_echo_us = 23.0;
    return b;
}

double BathParams::sample_offset_mhz(RandomStream& rng) const {
    const double u = rng.uniform();
    std::size_t k = 0;
    double acc = odmr_weights[0];
    while (k + 1 < odmr_weights.size() && u >= acc) acc += odmr_weights[++k];
    return odmr_centers_mhz[k] + odmr_sigma_mhz * rng.normal();
}

ShotState apply_mw_pulse(const ShotState& state, double rabi_khz, double detuning_khz,
                         double duration_us, double phase_rad) {
    if (!(duration_us >= 0.0)) throw InvalidInput("MW pulse duration must be >= 0");
    ShotState out = state;
    const double omega_eff = std::hypot(rabi_khz, detuning_khz);
    if (omega_eff == 0.0 || duration_us == 0.0) return out;
    const double nx = rabi_khz * std::cos(phase_rad) / omega_eff;
    const double ny = rabi_khz * std::sin(phase_rad) / omega_eff;
    const double nz = detuning_khz / omega_eff;
    // kHz * us = 1e-3 cycles.
    const double angle = 2.0 * std::numbers::pi * omega_eff * duration_us * 1e-3;
    const double c = std::cos(angle), s = std::sin(angle);
    const BlochVector& v = state.spin;
    const double dot = nx * v.x + ny * v.y + nz * v.z;
    // Rodrigues: v cos + (n x v) sin + n (n.v)(1 - cos).
    out.spin.x = v.x * c + (ny * v.z - nz * v.y) * s + nx * dot * (1.0 - c);
    out.spin.y = v.y * c + (nz * v.x - nx * v.z) * s + ny * dot * (1.0 - c);
    out.spin.z = v.z * c + (nx * v.y - ny * v.x) * s + nz * dot * (1.0 - c);
    return out;
}

BlochVector precess(const BlochVector& v, double detuning_khz, double duration_us) {
    const double angle = 2.0 * std::numbers::pi * detuning_khz * duration_us * 1e-3;
    const double c = std::cos(angle), s = std::sin(angle);
    return {v.x * c - v.y * s, v.x * s + v.y * c, v.z};
}

}  // namespace spinshot
