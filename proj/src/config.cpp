#include "spinshot/config.hpp"

#include "spinshot/constants.hpp"
#include "spinshot/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace spinshot {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

struct Context {
    const std::string& source;
    int line;
    int column;

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(source, line, column, msg); }
};

double parse_double(std::string_view text, const Context& ctx) {
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size() || !std::isfinite(v))
        ctx.fail("expected a number, got '" + std::string(text) + "'");
    return v;
}

template <class Int>
Int parse_integer(std::string_view text, const Context& ctx) {
    Int v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        ctx.fail("expected an integer, got '" + std::string(text) + "'");
    return v;
}

std::vector<double> parse_list(std::string_view text, const Context& ctx) {
    std::vector<double> out;
    while (true) {
        const auto comma = text.find(',');
        out.push_back(parse_double(trim(text.substr(0, comma)), ctx));
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    return out;
}

std::string format_list(const auto& values) {
    std::string s;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) s += ", ";
        s += format_double(values[i]);
    }
    return s;
}

struct Binding {
    std::string_view section;
    std::string_view key;
    std::function<void(Config&, std::string_view, const Context&)> set;
    std::function<std::string(const Config&)> get;
};

template <class T>
Binding real(std::string_view section, std::string_view key, T Config::*group, double T::*field) {
    return {section, key,
            [=](Config& c, std::string_view v, const Context& ctx) { (c.*group).*field = parse_double(v, ctx); },
            [=](const Config& c) { return format_double((c.*group).*field); }};
}

template <class T, class Int>
Binding integer(std::string_view section, std::string_view key, T Config::*group, Int T::*field) {
    return {section, key,
            [=](Config& c, std::string_view v, const Context& ctx) {
                (c.*group).*field = parse_integer<Int>(v, ctx);
            },
            [=](const Config& c) { return std::to_string((c.*group).*field); }};
}

template <class T>
Binding text(std::string_view section, std::string_view key, T Config::*group, std::string T::*field) {
    return {section, key,
            [=](Config& c, std::string_view v, const Context&) { (c.*group).*field = std::string(v); },
            [=](const Config& c) { return (c.*group).*field; }};
}

Binding triple(std::string_view key, std::array<double, 3> BathParams::*field) {
    return {"bath", key,
            [=](Config& c, std::string_view v, const Context& ctx) {
                const auto list = parse_list(v, ctx);
                if (list.size() != 3) ctx.fail(std::string(key) + " needs exactly three values");
                std::copy(list.begin(), list.end(), (c.bath.*field).begin());
            },
            [=](const Config& c) { return format_list(c.bath.*field); }};
}

const std::vector<Binding>& bindings() {
    static const std::vector<Binding> table = [] {
        using C = Config;
        std::vector<Binding> t;
        t.push_back(real("emitter", "zero_field_optical_frequency_ghz", &C::emitter, &EmitterConfig::zero_field_optical_frequency_ghz));
        t.push_back(real("emitter", "g_ground", &C::emitter, &EmitterConfig::g_ground));
        t.push_back(real("emitter", "g_excited", &C::emitter, &EmitterConfig::g_excited));
        t.push_back(real("emitter", "bulk_lifetime_us", &C::emitter, &EmitterConfig::bulk_lifetime_us));
        t.push_back(real("emitter", "spectral_diffusion_fwhm_mhz", &C::emitter, &EmitterConfig::spectral_diffusion_fwhm_mhz));
        t.push_back(real("emitter", "flip_dipole_projection", &C::emitter, &EmitterConfig::flip_dipole_projection));
        t.push_back(real("emitter", "bulk_flip_branching", &C::emitter, &EmitterConfig::bulk_flip_branching));

        t.push_back(real("cavity", "resonance_frequency_ghz", &C::cavity, &CavityConfig::resonance_frequency_ghz));
        t.push_back(real("cavity", "quality_factor", &C::cavity, &CavityConfig::quality_factor));
        t.push_back(real("cavity", "purcell_on_resonance", &C::cavity, &CavityConfig::purcell_on_resonance));
        t.push_back(real("cavity", "mode_volume", &C::cavity, &CavityConfig::mode_volume));
        t.push_back({"cavity", "tune_to_transition",
                     [](Config& c, std::string_view v, const Context&) { c.cavity_tune_to = std::string(v); },
                     [](const Config& c) { return c.cavity_tune_to; }});

        t.push_back(real("field", "magnetic_field_tesla", &C::field, &ZeemanConfig::magnetic_field_tesla));
        t.push_back(text("field", "field_axis", &C::field, &ZeemanConfig::field_axis));

        t.push_back(real("detection", "eta_waveguide", &C::cavity, &CavityConfig::eta_waveguide));
        t.push_back(real("detection", "eta_offchip", &C::cavity, &CavityConfig::eta_offchip));
        t.push_back(real("detection", "eta_switch", &C::cavity, &CavityConfig::eta_switch));
        t.push_back(real("detection", "eta_detector", &C::cavity, &CavityConfig::eta_detector));
        t.push_back(real("detection", "eta_detect", &C::detection, &DetectionConfig::eta_detect));
        t.push_back(real("detection", "dark_rate_hz", &C::detection, &DetectionConfig::dark_rate_hz));
        t.push_back(real("detection", "gate_window_us", &C::detection, &DetectionConfig::gate_window_us));
        t.push_back(real("detection", "emission_lifetime_us", &C::detection, &DetectionConfig::emission_lifetime_us));

        t.push_back(integer("readout", "n_pulses", &C::readout, &ReadoutConfig::n_pulses));
        t.push_back(real("readout", "p_excite", &C::readout, &ReadoutConfig::p_excite));
        t.push_back(real("readout", "flip_bright", &C::readout, &ReadoutConfig::flip_bright));
        t.push_back(real("readout", "flip_dark", &C::readout, &ReadoutConfig::flip_dark));
        t.push_back(real("readout", "pulse_period_us", &C::readout, &ReadoutConfig::pulse_period_us));
        t.push_back(real("readout", "pulse_length_us", &C::readout, &ReadoutConfig::pulse_length_us));
        t.push_back(integer("readout", "threshold", &C::readout, &ReadoutConfig::threshold));
        t.push_back(integer("readout", "n_min", &C::readout, &ReadoutConfig::n_min));
        t.push_back(integer("readout", "n_max", &C::readout, &ReadoutConfig::n_max));
        t.push_back(real("readout", "relaxation_constant", &C::readout, &ReadoutConfig::relaxation_constant));
        t.push_back(real("readout", "target_fidelity", &C::readout, &ReadoutConfig::target_fidelity));

        t.push_back(triple("odmr_centers_mhz", &BathParams::odmr_centers_mhz));
        t.push_back(triple("odmr_weights", &BathParams::odmr_weights));
        t.push_back({"bath", "odmr_fwhm_mhz",
                     [](Config& c, std::string_view v, const Context& ctx) {
                         c.bath.odmr_sigma_mhz = constants::gaussian_sigma_from_fwhm(parse_double(v, ctx));
                     },
                     [](const Config& c) { return format_double(constants::gaussian_fwhm_from_sigma(c.bath.odmr_sigma_mhz)); }});
        t.push_back(real("bath", "t1_spin_s", &C::bath, &BathParams::t1_spin_s));
        t.push_back(real("bath", "t2_echo_us", &C::bath, &BathParams::t2_echo_us));
        t.push_back(real("bath", "echo_exponent", &C::bath, &BathParams::echo_exponent));

        t.push_back(real("mw", "rabi_khz", &C::mw, &ProtocolSettings::rabi_khz));
        t.push_back(real("mw", "odmr_pulse_us", &C::mw, &ProtocolSettings::odmr_pulse_us));
        t.push_back(real("mw", "drive_detuning_sigma_khz", &C::mw, &ProtocolSettings::drive_detuning_sigma_khz));
        t.push_back(real("mw", "drive_amplitude_noise", &C::mw, &ProtocolSettings::drive_amplitude_noise));
        t.push_back(real("mw", "t1_equilibrium_z", &C::mw, &ProtocolSettings::t1_equilibrium_z));

        t.push_back({"area_sweep", "areas",
                     [](Config& c, std::string_view v, const Context& ctx) { c.area_sweep.areas = parse_list(v, ctx); },
                     [](const Config& c) { return format_list(c.area_sweep.areas); }});
        t.push_back(text("area_sweep", "flip_model", &C::area_sweep, &AreaSweepConfig::flip_model));
        t.push_back(real("area_sweep", "flip_bright0", &C::area_sweep, &AreaSweepConfig::flip_bright0));
        t.push_back(real("area_sweep", "flip_bright_slope", &C::area_sweep, &AreaSweepConfig::flip_bright_slope));
        t.push_back(real("area_sweep", "flip_dark0", &C::area_sweep, &AreaSweepConfig::flip_dark0));
        t.push_back(real("area_sweep", "flip_dark_slope", &C::area_sweep, &AreaSweepConfig::flip_dark_slope));
        t.push_back(integer("area_sweep", "trace_pulses", &C::area_sweep, &AreaSweepConfig::trace_pulses));
        t.push_back(integer("area_sweep", "shots", &C::area_sweep, &AreaSweepConfig::shots));

        t.push_back(integer("simulation", "seed", &C::simulation, &SimulationConfig::seed));
        t.push_back(integer("simulation", "shots", &C::simulation, &SimulationConfig::shots));
        t.push_back(text("simulation", "initial", &C::simulation, &SimulationConfig::initial));
        t.push_back(integer("simulation", "max_records", &C::simulation, &SimulationConfig::max_records));
        return t;
    }();
    return table;
}

}  // namespace

void Config::validate() const {
    emitter.validate();
    cavity.validate();
    field.validate();
    bath.validate();
    readout_params().validate();
    if (!(detection.emission_lifetime_us > 0.0)) throw InvalidConfig("detection.emission_lifetime_us must be > 0");
    if (readout.threshold < 1) throw InvalidConfig("readout.threshold must be >= 1");
    if (readout.n_min < 1 || readout.n_max < readout.n_min || readout.n_max > kMaxPulses)
        throw InvalidConfig("readout.n_min..n_max must satisfy 1 <= n_min <= n_max <= 10000");
    if (!(readout.relaxation_constant > 1.0)) throw InvalidConfig("readout.relaxation_constant must be > 1");
    if (!(mw.rabi_khz > 0.0)) throw InvalidConfig("mw.rabi_khz must be > 0");
    if (!(mw.t1_equilibrium_z >= -1.0 && mw.t1_equilibrium_z <= 1.0))
        throw InvalidConfig("mw.t1_equilibrium_z must be in [-1, 1]");
    if (area_sweep.flip_model != "linear" && area_sweep.flip_model != "per_excitation")
        throw InvalidConfig("area_sweep.flip_model must be linear or per_excitation");
    if (area_sweep.trace_pulses < 4) throw InvalidConfig("area_sweep.trace_pulses must be >= 4");
    if (area_sweep.shots < 1) throw InvalidConfig("area_sweep.shots must be >= 1");
    if (simulation.shots < 1) throw InvalidConfig("simulation.shots must be >= 1");
    (void)spin_state_from_string(simulation.initial);
}

void Config::apply_tuning() {
    if (cavity_tune_to.empty()) return;
    if (cavity_tune_to.size() != 1) throw InvalidConfig("cavity.tune_to_transition must be one of A, B, C, D");
    try {
        cavity.resonance_frequency_ghz = transitions().frequency(cavity_tune_to[0]);
    } catch (const InvalidInput&) {
        throw InvalidConfig("cavity.tune_to_transition must be one of A, B, C, D");
    }
}

ReadoutParams Config::readout_params() const {
    ReadoutParams p;
    p.n_pulses = readout.n_pulses;
    p.p_excite = readout.p_excite;
    p.eta_detect = detection.eta_detect;
    p.flip_bright = readout.flip_bright;
    p.flip_dark = readout.flip_dark;
    p.dark_rate_hz = detection.dark_rate_hz;
    p.gate_window_us = detection.gate_window_us;
    p.pulse_period_us = readout.pulse_period_us;
    p.pulse_length_us = readout.pulse_length_us;
    return p;
}

TransitionSet Config::transitions() const { return zeeman_transitions(emitter, field); }

TimelineModel Config::timeline_model() const {
    TimelineModel m;
    m.emitter = emitter;
    m.cavity = cavity;
    m.transitions = transitions();
    m.bath = bath;
    m.eta_detect = detection.eta_detect;
    m.dark_rate_hz = detection.dark_rate_hz;
    m.flip_bright = readout.flip_bright;
    m.flip_dark = readout.flip_dark;
    m.rabi_khz = mw.rabi_khz;
    return m;
}

std::vector<std::pair<std::string, std::string>> Config::snapshot() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (const Binding& b : bindings())
        out.emplace_back(std::string(b.section) + "." + std::string(b.key), b.get(*this));
    return out;
}

Config parse_config(std::string_view text, const std::string& source) {
    Config cfg;
    std::string section;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        const auto comment = raw.find_first_of("#;");
        std::string_view line = trim(raw.substr(0, comment));
        if (line.empty()) continue;
        const int column = static_cast<int>(raw.find(line.front())) + 1;
        const Context ctx{source, line_no, column};
        if (line.front() == '[') {
            if (line.back() != ']') ctx.fail("unterminated section header");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            bool known = false;
            for (const Binding& b : bindings()) known |= b.section == section;
            if (!known) ctx.fail("unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) ctx.fail("expected 'key = value'");
        if (section.empty()) ctx.fail("key outside of a section");
        const std::string_view key = trim(line.substr(0, eq));
        const std::string_view value = trim(line.substr(eq + 1));
        if (value.empty()) ctx.fail("missing value for '" + std::string(key) + "'");
        const Binding* found = nullptr;
        for (const Binding& b : bindings())
            if (b.section == section && b.key == key) found = &b;
        if (!found) ctx.fail("unknown key '" + std::string(key) + "' in [" + section + "]");
        const Context value_ctx{source, line_no, column + static_cast<int>(line.find(value))};
        found->set(cfg, value, value_ctx);
    }
    try {
        cfg.apply_tuning();
        cfg.validate();
    } catch (const InvalidConfig& e) {
        throw InvalidConfig(source + ": " + e.what());
    } catch (const InvalidInput& e) {
        throw InvalidConfig(source + ": " + e.what());
    }
    return cfg;
}

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

}  // namespace spinshot
