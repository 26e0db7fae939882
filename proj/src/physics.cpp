#include "spinshot/physics.hpp"

#include "spinshot/constants.hpp"
#include "spinshot/errors.hpp"

#include <cctype>
#include <cmath>

namespace spinshot {

namespace {

bool is_probability(double x) { return std::isfinite(x) && x >= 0.0 && x <= 1.0; }

}  // namespace

void EmitterConfig::validate() const {
    if (!(bulk_lifetime_us > 0.0) || !std::isfinite(bulk_lifetime_us))
        throw InvalidConfig("emitter.bulk_lifetime must be > 0");
    if (!(g_ground > 0.0) || !(g_excited > 0.0))
        throw InvalidConfig("emitter g-factors must be > 0");
    if (!(spectral_diffusion_fwhm_mhz >= 0.0))
        throw InvalidConfig("emitter.spectral_diffusion_fwhm must be >= 0");
    if (!(flip_dipole_projection >= 0.0))
        throw InvalidConfig("emitter.flip_dipole_projection must be >= 0");
    if (!is_probability(bulk_flip_branching))
        throw InvalidConfig("emitter.bulk_flip_branching must lie in [0, 1]");
}

void CavityConfig::validate() const {
    if (!(quality_factor > 0.0) || !std::isfinite(quality_factor))
        throw InvalidConfig("cavity.quality_factor must be > 0");
    if (!(resonance_frequency_ghz > 0.0))
        throw InvalidConfig("cavity linewidth nu/Q must be > 0");
    if (!(purcell_on_resonance >= 1.0))
        throw InvalidConfig("cavity.purcell_factor must be >= 1");
    for (double eta : {eta_waveguide, eta_offchip, eta_switch, eta_detector})
        if (!is_probability(eta)) throw InvalidConfig("cavity efficiencies must lie in [0, 1]");
}

void ZeemanConfig::validate() const {
    if (!(magnetic_field_tesla >= 0.0) || !std::isfinite(magnetic_field_tesla))
        throw InvalidConfig("field.magnetic_field must be >= 0");
}

double TransitionSet::frequency(char label) const {
    switch (std::toupper(static_cast<unsigned char>(label))) {
        case 'A': return freq_a_ghz;
        case 'B': return freq_b_ghz;
        case 'C': return freq_c_ghz;
        case 'D': return freq_d_ghz;
        default: throw InvalidInput(std::string("unknown transition label '") + label + "'");
    }
}

double cavity_linewidth(const CavityConfig& cfg) {
    if (!(cfg.quality_factor > 0.0))
        throw InvalidConfig("cavity.quality_factor must be > 0");
    return cfg.resonance_frequency_ghz / cfg.quality_factor;
}

TransitionSet zeeman_transitions(const EmitterConfig& emitter, const ZeemanConfig& field) {
    emitter.validate();
    field.validate();
    const double f0 = emitter.zero_field_optical_frequency_ghz;
    const double dg = emitter.g_ground * constants::bohr_ghz_per_tesla * field.magnetic_field_tesla;
    const double de = emitter.g_excited * constants::bohr_ghz_per_tesla * field.magnetic_field_tesla;

    // Level energies relative to the ground-state centroid:
    // up_g = +dg/2, down_g = -dg/2, up_e = f0 + de/2, down_e = f0 - de/2.
    TransitionSet t;
    t.ground_splitting_ghz = dg;
    t.excited_splitting_ghz = de;
    t.freq_a_ghz = f0 + 0.5 * (de - dg);
    t.freq_b_ghz = f0 - 0.5 * (de - dg);
    t.freq_c_ghz = f0 - 0.5 * (de + dg);
    t.freq_d_ghz = f0 + 0.5 * (de + dg);
    return t;
}

double purcell_factor(double tau_bulk_us, double tau_cavity_us) {
    if (!(tau_bulk_us > 0.0) || !(tau_cavity_us > 0.0))
        throw InvalidInput("lifetimes must be > 0");
    return tau_bulk_us / tau_cavity_us;
}

double lorentzian_suppression(double detuning, double linewidth_fwhm) {
    if (!(linewidth_fwhm > 0.0)) throw InvalidInput("linewidth must be > 0");
    const double x = 2.0 * detuning / linewidth_fwhm;
    return 1.0 / (1.0 + x * x);
}

double effective_lifetime(const EmitterConfig& emitter, const CavityConfig& cavity,
                          double detuning_ghz) {
    emitter.validate();
    cavity.validate();
    const double kappa = cavity_linewidth(cavity);
    const double gamma_bulk = 1.0 / emitter.bulk_lifetime_us;
    const double enhancement =
        1.0 + (cavity.purcell_on_resonance - 1.0) * lorentzian_suppression(detuning_ghz, kappa);
    return 1.0 / (gamma_bulk * enhancement);
}

double detection_efficiency_budget(const CavityConfig& cavity) {
    cavity.validate();
    return cavity.eta_waveguide * cavity.eta_offchip * cavity.eta_switch * cavity.eta_detector;
}

double predicted_cyclicity(double branching_enhanced, double branching_flip) {
    if (!(branching_enhanced >= 0.0) || !(branching_flip >= 0.0))
        throw InvalidInput("branching rates must be >= 0");
    if (branching_flip == 0.0)
        throw DivergenceError("infinite cyclicity: spin-flip branching rate is zero");
    return branching_enhanced / branching_flip;
}

DecayBranching decay_branching(const EmitterConfig& emitter, const CavityConfig& cavity,
                               double preserving_freq_ghz, double flip_freq_ghz) {
    const double kappa = cavity_linewidth(cavity);
    const double fp1 = cavity.purcell_on_resonance - 1.0;
    const double f_cav = cavity.resonance_frequency_ghz;
    const double w_flip = emitter.bulk_flip_branching;
    DecayBranching b;
    b.preserving_rate =
        (1.0 - w_flip) * (1.0 + fp1 * lorentzian_suppression(preserving_freq_ghz - f_cav, kappa));
    b.flip_rate = w_flip * (1.0 + fp1 * emitter.flip_dipole_projection *
                                      lorentzian_suppression(flip_freq_ghz - f_cav, kappa));
    return b;
}

}  // namespace spinshot
