#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

namespace spinshot {

enum class SpinState { bright, dark };

std::string_view to_string(SpinState s);
SpinState spin_state_from_string(std::string_view s);

// Pulsed readout on the spin-preserving transition. Per pulse, a bright spin
// flips to dark with probability flip_bright (no detection in that pulse) or
// otherwise yields a detected photon with probability p_excite * eta_detect.
// A dark spin flips to bright with probability flip_dark; detection can
// only start in the following pulse.
struct ReadoutParams {
    int n_pulses = 71;
    double p_excite = 0.78;
    double eta_detect = 0.10;
    double flip_bright = 0.5 / 131.0;
    double flip_dark = 0.5 / 131.0;
    double dark_rate_hz = 10.0;
    double gate_window_us = 3.0;
    double pulse_period_us = 10.0;
    double pulse_length_us = 0.02;

    // Per-pulse detection probability d.
    double detection_probability() const { return p_excite * eta_detect; }
    // Poisson mean of dark counts summed over all gates.
    double dark_count_mean() const { return dark_rate_hz * 1e-6 * gate_window_us * n_pulses; }
    double readout_duration_ms() const { return n_pulses * pulse_period_us * 1e-3; }

    void validate() const;
};

inline constexpr int kMaxPulses = 10000;

// Distribution of the number of detected photons for one readout sequence.
struct CountDistribution {
    std::vector<double> probabilities;
    SpinState initial = SpinState::bright;
    int n_pulses = 0;

    // P(count == k); zero outside the stored support.
    double at(std::size_t k) const { return k < probabilities.size() ? probabilities[k] : 0.0; }
    // P(count >= threshold).
    double tail(int threshold) const;
    double total() const;
};

struct FidelityReport {
    double f_bright = 0.0;
    double f_dark = 0.0;
    double f_min = 0.0;
    int threshold = 1;
    int n_pulses = 0;
    std::optional<double> readout_duration_ms;
    std::optional<double> cyclicity_bright;
    std::optional<double> cyclicity_dark;
    std::optional<double> cyclicity_mean;
};

CountDistribution count_distribution(const ReadoutParams& params, SpinState initial);

// Same distribution before the dark-count convolution (length n_pulses + 1).
CountDistribution emitter_count_distribution(const ReadoutParams& params, SpinState initial);

// Convolves with Poisson(mean) and truncates the tail once the cumulative
// probability reaches 1 - 1e-12.
CountDistribution add_dark_counts(const CountDistribution& dist, double mean);

// Per-pulse detection probabilities d (1 - a) P_k(bright), k = 0..n-1, with
// P_k = pi + (P_0 - pi)(1 - a - b)^k and pi = b / (a + b).
std::vector<double> expected_trace(const ReadoutParams& params, SpinState initial);

struct DecayFit {
    double n0 = 0.0;
    double amplitude = 0.0;
    double offset = 0.0;
    double n0_sigma = 0.0;
    double amplitude_sigma = 0.0;
    double offset_sigma = 0.0;
};

// Least-squares A exp(-k / N0) + c with k the 0-based pulse index.
DecayFit fit_decay_constant(const std::vector<double>& trace);

// Two-state relaxation constant -1 / ln(1 - a - b) in pulses.
double chain_relaxation_pulses(double flip_bright, double flip_dark);

double cyclicity(double p_excite, double n0);

FidelityReport readout_fidelity(const CountDistribution& bright, const CountDistribution& dark,
                                int threshold);

// readout_fidelity on the model distributions, with duration and model
// cyclicities filled in.
FidelityReport summarize_readout(const ReadoutParams& params, int threshold);

struct ReadoutGridRow {
    int n_pulses = 0;
    int threshold = 0;
    double f_bright = 0.0;
    double f_dark = 0.0;
    double f_min = 0.0;
};

struct ReadoutOptimum {
    int n_star = 0;
    int threshold_star = 0;
    double f_star = 0.0;
    // Best-threshold row for every N in the scanned range.
    std::vector<ReadoutGridRow> curve;
};

// Exhaustive scan of N in [n_min, n_max] and thresholds 1..N. Ties resolve to
// the smallest N, then the smallest threshold.
ReadoutOptimum optimize_readout(const ReadoutParams& params, int n_min, int n_max);

struct FlipCalibration {
    double asymmetry = 0.5;  // s, with a = s / N_relax and b = (1 - s) / N_relax
    double flip_bright = 0.0;
    double flip_dark = 0.0;
    double achieved_f = 0.0;
};

// Finds the asymmetry s on the rising branch of F(s) so that the readout
// fidelity at (n_pulses, threshold) matches target_f within 1e-4.
// relaxation_constant fixes a + b = 1 / relaxation_constant. Throws
// CalibrationError with the attainable range when the target is out of reach.
FlipCalibration calibrate_flip_asymmetry(const ReadoutParams& params, double relaxation_constant,
                                         double target_f, int n_pulses, int threshold);

// Loss in dark-state fidelity caused by detector dark counts.
double dark_count_penalty(const ReadoutParams& params, int threshold);

}  // namespace spinshot
