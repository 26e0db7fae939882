#pragma once

#include "spinshot/physics.hpp"
#include "spinshot/readout.hpp"
#include "spinshot/records.hpp"
#include "spinshot/rng.hpp"
#include "spinshot/sequence.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

namespace spinshot {

struct BlochVector {
    double x = 0.0;
    double y = 0.0;
    double z = 1.0;  // +1: bright (up) ground state

    double norm() const;
};

// Per-shot qubit state.
struct ShotState {
    BlochVector spin;
    bool excited = false;
    double frequency_offset_mhz = 0.0;  // static spin-transition offset for this shot
};

// Phenomenological spin environment. The ODMR line is a three-Gaussian
// mixture; the superhyperfine splitting and weights are assumptions, only
// the per-line FWHM (2.37 MHz) is measured.
struct BathParams {
    std::array<double, 3> odmr_centers_mhz = {-4.0, 0.0, 4.0};
    std::array<double, 3> odmr_weights = {0.25, 0.5, 0.25};
    double odmr_sigma_mhz = 2.37 / 2.3548200450309493;
    double t1_spin_s = 0.44;
    double t2_echo_us = 48.0;
    double echo_exponent = 2.0;

    void validate() const;

    // T2 presets at the two measured temperatures.
    static BathParams at_2p75_kelvin();
    static BathParams at_4p45_kelvin();

    // Static offset of the spin transition for one shot.
    double sample_offset_mhz(RandomStream& rng) const;
};

// Rotation about (Omega cos(phase), Omega sin(phase), Delta) / Omega_eff by
// 2 pi Omega_eff * duration. Frequencies in kHz, duration in us.
ShotState apply_mw_pulse(const ShotState& state, double rabi_khz, double detuning_khz,
                         double duration_us, double phase_rad);

// Free precession about z at the given detuning.
BlochVector precess(const BlochVector& v, double detuning_khz, double duration_us);

struct ReadoutSimOptions {
    // Emission delays are exponential with this lifetime, conditioned on
    // falling inside the gate that opens at the end of the pulse.
    double emission_lifetime_us = 0.803;
    // Photon records are kept for the first max_records shots.
    std::size_t max_records = 1000;
};

struct ReadoutSimResult {
    std::uint64_t shots = 0;
    std::vector<std::uint64_t> histogram;  // shots with k detected photons
    std::vector<double> trace;             // mean detections per pulse (emitter + dark)
    std::vector<PhotonRecord> records;
    // Shots whose spin left its initial state, and the mean number of
    // excitations before that first flip among them.
    std::uint64_t flipped_shots = 0;
    double mean_excitations_before_flip = 0.0;

    CountDistribution distribution(SpinState initial, int n_pulses) const;
};

// Shot-by-shot simulation of the same per-pulse model as count_distribution,
// with timestamps and Poisson dark counts inside the gates. Shot i draws from
// RandomStream(seed, i).
ReadoutSimResult simulate_readout_shots(const ReadoutParams& params, SpinState initial,
                                        std::uint64_t shots, std::uint64_t seed,
                                        const ReadoutSimOptions& options = {});

double total_variation(const CountDistribution& p, const CountDistribution& q);

enum class Protocol { t1, odmr, rabi, echo };

Protocol protocol_from_string(std::string_view name);
std::string_view to_string(Protocol p);

struct ProtocolSettings {
    double rabi_khz = 217.4;  // pi pulse of 2.3 us
    // ODMR probe length; 0 selects a pi pulse at rabi_khz.
    double odmr_pulse_us = 0.0;
    // Rabi and echo drive the central line; each shot gets a static Gaussian
    // detuning with this spread, and a relative Rabi-amplitude error with
    // the second spread.
    double drive_detuning_sigma_khz = 0.0;
    double drive_amplitude_noise = 0.0;
    // Equilibrium polarization <z> reached through T1 relaxation.
    double t1_equilibrium_z = 0.0;
};

struct CurvePoint {
    double x = 0.0;
    double mean = 0.0;
    double stderr_ = 0.0;
    std::uint64_t shots = 0;
};

// Sweep units: t1 in s (wait), odmr in MHz (MW detuning from the bare spin
// transition), rabi in us (pulse length), echo in us (total free evolution 2 tau).
//   t1    probability of still finding the initial bright state
//   odmr  spin-flip probability of a fixed MW pulse
//   rabi  spin-flip probability versus pulse length
//   echo  P_up(+x) - P_up(-x) for a pi/2 - tau - pi - tau - pi/2 sequence, with
//         the coherence multiplied by exp(-(t / T2)^n) before the last pulse
std::vector<CurvePoint> run_protocol(Protocol protocol, const std::vector<double>& sweep,
                                     const BathParams& bath, const ProtocolSettings& settings,
                                     std::uint64_t shots_per_point, std::uint64_t seed);

// Excitation probability of an optical pulse with area in units of pi.
double excitation_probability(double area_pi);

struct FlipModel {
    std::function<double(double)> flip_bright;  // per-pulse a(area)
    std::function<double(double)> flip_dark;    // per-pulse b(area)

    static FlipModel linear(double bright0, double bright_slope, double dark0, double dark_slope);
    // Flips caused by the excitation itself: a = p(area) (bright0 + bright_slope area).
    static FlipModel per_excitation(double bright0, double bright_slope, double dark0, double dark_slope);
};

struct AreaScanPoint {
    double area_pi = 0.0;
    double p_excite = 0.0;
    double flip_bright = 0.0;
    double flip_dark = 0.0;
    double n0 = 0.0;
    double n0_sigma = 0.0;
    double cyclicity = 0.0;         // p * N0 from the fitted trace
    double cyclicity_direct = 0.0;  // mean excitations before the first flip
    double f_star = 0.0;
    int n_star = 0;
    int threshold_star = 0;
    bool fit_ok = false;
};

struct AreaScanOptions {
    int trace_pulses = 500;
    int n_max = 500;  // optimize_readout range upper bound
    std::uint64_t shots = 25000;
    ReadoutSimOptions sim;
};

// For each area: p = sin^2(area pi / 2), simulate the bright-start trace, fit
// N0, report zeta = p N0 and the optimized readout fidelity.
std::vector<AreaScanPoint> pulse_area_scan(const std::vector<double>& areas, const FlipModel& flips,
                                           const ReadoutParams& base, std::uint64_t seed,
                                           const AreaScanOptions& options = {});

// Level structure and optical/MW parameters for running compiled sequences.
struct TimelineModel {
    EmitterConfig emitter;
    CavityConfig cavity;
    TransitionSet transitions;
    BathParams bath;
    double eta_detect = 0.10;
    double dark_rate_hz = 10.0;
    // Pulse-induced ground-state flip probability per optical pulse.
    double flip_bright = 0.0;
    double flip_dark = 0.0;
    double rabi_khz = 217.4;
};

struct TimelineSimResult {
    std::uint64_t shots = 0;
    int gates = 0;
    std::vector<std::uint64_t> histogram;    // total detections per shot
    std::vector<std::uint64_t> gate_counts;  // detections per gate summed over shots
    std::vector<PhotonRecord> records;       // pulse_index = gate index
    std::uint64_t final_bright = 0;          // shots ending in the bright state
};

TimelineSimResult simulate_timeline(const Timeline& timeline, const TimelineModel& model,
                                    SpinState initial, std::uint64_t shots, std::uint64_t seed,
                                    std::size_t max_records = 1000);

}  // namespace spinshot
