#pragma once

#include <string>

namespace spinshot {

// Effective spin-1/2 emitter. Frequencies in GHz unless the field name says
// otherwise, times in microseconds.
struct EmitterConfig {
    double zero_field_optical_frequency_ghz = 194954.05;
    double g_ground = 0.857;  // assumed: reproduces a 3.6 GHz ground splitting at 0.3 T
    double g_excited = 0.45;  // assumed
    double bulk_lifetime_us = 142.0;
    double spectral_diffusion_fwhm_mhz = 13.5;

    // Relative dipole projection of the spin-flip transitions onto the cavity
    // mode (1 = identical to the spin-preserving one).
    double flip_dipole_projection = 1.0;
    // Fraction of the bulk decay rate that goes through the spin-flip
    // transition. Only used by the timeline simulator.
    double bulk_flip_branching = 0.01;

    void validate() const;
};

struct CavityConfig {
    double resonance_frequency_ghz = 194954.05;
    double quality_factor = 82e3;
    double purcell_on_resonance = 177.0;
    double mode_volume = 0.83;  // (lambda/n)^3, informational
    double eta_waveguide = 0.40;
    double eta_offchip = 0.50;
    double eta_switch = 0.78;
    double eta_detector = 0.80;

    void validate() const;
};

struct ZeemanConfig {
    double magnetic_field_tesla = 0.3;
    std::string field_axis = "(100)";

    void validate() const;
};

// Optical transitions between the Zeeman-split ground and excited doublets.
// A: up_g -> up_e and B: down_g -> down_e preserve the spin; C: up_g -> down_e
// and D: down_g -> up_e flip it. D shares its upper level with A, so
// |f_A - f_D| equals the ground splitting.
struct TransitionSet {
    double freq_a_ghz = 0.0;
    double freq_b_ghz = 0.0;
    double freq_c_ghz = 0.0;
    double freq_d_ghz = 0.0;
    double ground_splitting_ghz = 0.0;
    double excited_splitting_ghz = 0.0;

    // Lookup by label 'A'..'D' (case-insensitive); throws InvalidInput otherwise.
    double frequency(char label) const;
};

// Cavity FWHM nu / Q in GHz.
double cavity_linewidth(const CavityConfig& cfg);

TransitionSet zeeman_transitions(const EmitterConfig& emitter, const ZeemanConfig& field);

// Ratio of total decay rates tau_bulk / tau_cavity.
double purcell_factor(double tau_bulk_us, double tau_cavity_us);

// 1 / (1 + (2 delta / fwhm)^2); delta and fwhm in the same unit.
double lorentzian_suppression(double detuning, double linewidth_fwhm);

// Lifetime (us) of a transition detuned from the cavity by detuning_ghz:
// Gamma = Gamma_bulk (1 + (F_P - 1) L(delta, kappa)).
double effective_lifetime(const EmitterConfig& emitter, const CavityConfig& cavity,
                          double detuning_ghz);

// eta_waveguide * eta_offchip * eta_switch * eta_detector.
double detection_efficiency_budget(const CavityConfig& cavity);

// Mean number of readout-transition photons per spin flip when the only flip
// channel is optical branching. Throws DivergenceError for a zero flip rate.
double predicted_cyclicity(double branching_enhanced, double branching_flip);

// Relative decay rates out of the excited state addressed by a transition,
// used to branch emissions in the timeline simulator. Rates are in units of
// the bulk decay rate.
struct DecayBranching {
    double preserving_rate = 0.0;
    double flip_rate = 0.0;

    double total() const { return preserving_rate + flip_rate; }
    double flip_probability() const { return flip_rate / total(); }
};

// Branching for the upper level of the spin-preserving transition with the
// given frequency, whose spin-flip partner emits at flip_freq_ghz.
DecayBranching decay_branching(const EmitterConfig& emitter, const CavityConfig& cavity,
                               double preserving_freq_ghz, double flip_freq_ghz);

}  // namespace spinshot
