#pragma once

#include "spinshot/montecarlo.hpp"
#include "spinshot/physics.hpp"
#include "spinshot/readout.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace spinshot {

struct DetectionConfig {
    double eta_detect = 0.10;  // effective per-photon detection probability used by the readout model
    double dark_rate_hz = 10.0;
    double gate_window_us = 3.0;
    double emission_lifetime_us = 0.803;
};

struct ReadoutConfig {
    int n_pulses = 71;
    double p_excite = 0.78;
    double flip_bright = 0.5 / 131.0;
    double flip_dark = 0.5 / 131.0;
    double pulse_period_us = 10.0;
    double pulse_length_us = 0.02;
    int threshold = 1;
    int n_min = 1;
    int n_max = 500;
    double relaxation_constant = 131.0;
    double target_fidelity = 0.869;
};

// flip_model "linear": a = a0 + a1 area; "per_excitation": a = p(area) (a0 + a1 area).
struct AreaSweepConfig {
    std::vector<double> areas = {0.2, 0.4, 0.6, 0.8, 1.0};
    std::string flip_model = "per_excitation";
    double flip_bright0 = 0.00214;
    double flip_bright_slope = 0.004;
    double flip_dark0 = 0.00214;
    double flip_dark_slope = 0.004;
    int trace_pulses = 500;
    std::uint64_t shots = 25000;
};

struct SimulationConfig {
    std::uint64_t seed = 1;
    std::uint64_t shots = 25000;
    std::string initial = "bright";
    std::size_t max_records = 1000;
};

// Whole-run configuration. Sections: [emitter] [cavity] [field] [detection]
// [readout] [bath] [mw] [area_sweep] [simulation].
struct Config {
    EmitterConfig emitter;
    CavityConfig cavity;
    // Optional transition label 'A'..'D'; when set the cavity resonance is
    // moved onto that transition at the configured field.
    std::string cavity_tune_to;
    ZeemanConfig field;
    DetectionConfig detection;
    ReadoutConfig readout;
    BathParams bath;
    ProtocolSettings mw;
    AreaSweepConfig area_sweep;
    SimulationConfig simulation;

    void validate() const;
    // Applies cavity_tune_to, if any.
    void apply_tuning();

    ReadoutParams readout_params() const;
    TransitionSet transitions() const;
    TimelineModel timeline_model() const;

    // Effective values as (section.key, text) pairs in a fixed order.
    std::vector<std::pair<std::string, std::string>> snapshot() const;
};

// Parses key = value lines under [section] headers; '#' and ';' start
// comments. Unknown sections or keys and malformed values raise ParseError
// with the line number.
Config parse_config(std::string_view text, const std::string& source = "<config>");
Config load_config(const std::string& path);

}  // namespace spinshot
