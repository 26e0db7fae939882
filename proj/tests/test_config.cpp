#include <doctest.h>

#include "spinshot/config.hpp"
#include "spinshot/errors.hpp"

#include <cmath>

using namespace spinshot;

namespace {

std::string paper_cfg() { return std::string(SPINSHOT_SOURCE_DIR) + "/paper.cfg"; }

int error_line(std::string_view text) {
    try {
        parse_config(text, "t.cfg");
    } catch (const ParseError& e) {
        return e.line();
    }
    return -1;
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("empty text gives defaults") {
    const Config c = parse_config("");
    const Config d;
    CHECK(c.snapshot() == d.snapshot());
}

TEST_CASE("nominal preset file") {
    const Config c = load_config(paper_cfg());
    CHECK(c.cavity.quality_factor == 82000.0);
    CHECK(c.readout.n_pulses == 71);
    CHECK(c.readout.flip_bright + c.readout.flip_dark == doctest::Approx(1.0 / 131.0));
    CHECK(c.simulation.seed == 20240101u);
    CHECK(c.area_sweep.areas.size() == 7u);
    CHECK(c.bath.odmr_weights[1] == 0.5);
    CHECK(c.bath.odmr_sigma_mhz == doctest::Approx(2.37 / (2 * std::sqrt(2 * std::log(2.0)))));
    CHECK(c.cavity_tune_to == "A");
    CHECK(c.cavity.resonance_frequency_ghz == doctest::Approx(c.transitions().freq_a_ghz));
    const ReadoutParams p = c.readout_params();
    CHECK(p.detection_probability() == doctest::Approx(0.078));
    CHECK(p.dark_rate_hz == 10.0);
}

TEST_CASE("values, comments and whitespace") {
    const Config c = parse_config(
        "; leading comment\n"
        "[readout]\n"
        "  n_pulses =  40   # trailing\n"
        "p_excite=0.5;inline\n"
        "[ simulation ]\n"
        "seed = 7\n"
        "initial = dark\n");
    CHECK(c.readout.n_pulses == 40);
    CHECK(c.readout.p_excite == 0.5);
    CHECK(c.simulation.seed == 7u);
    CHECK(c.simulation.initial == "dark");
}

TEST_CASE("errors carry the line number") {
    CHECK(error_line("[readout]\nn_pulses = 10\nbogus = 1\n") == 3);
    CHECK(error_line("\n[nowhere]\n") == 2);
    CHECK(error_line("[readout]\nn_pulses = ten\n") == 2);
    CHECK(error_line("[readout]\nn_pulses = 1.5\n") == 2);
    CHECK(error_line("n_pulses = 3\n") == 1);
    CHECK(error_line("[readout]\nn_pulses\n") == 2);
    CHECK(error_line("[readout]\nn_pulses =\n") == 2);
    CHECK(error_line("[readout\n") == 1);
    CHECK(error_line("[area_sweep]\nareas = 0.5, x\n") == 2);
    try {
        parse_config("[readout]\n p_excite = abc\n", "t.cfg");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).rfind("t.cfg:2:", 0) == 0);
    }
}

TEST_CASE("range validation") {
    CHECK_THROWS_AS(parse_config("[readout]\np_excite = 1.5\n"), InvalidConfig);
    CHECK_THROWS_AS(parse_config("[readout]\nthreshold = 0\n"), InvalidConfig);
    CHECK_THROWS_AS(parse_config("[readout]\nn_min = 10\nn_max = 5\n"), InvalidConfig);
    CHECK_THROWS_AS(parse_config("[cavity]\nquality_factor = -1\n"), InvalidConfig);
    CHECK_THROWS_AS(parse_config("[cavity]\ntune_to_transition = E\n"), InvalidConfig);
    CHECK_THROWS_AS(parse_config("[area_sweep]\nflip_model = cubic\n"), InvalidConfig);
    CHECK_THROWS_AS(parse_config("[simulation]\ninitial = sideways\n"), InvalidConfig);
    CHECK_THROWS_AS(load_config("/nonexistent/dir/x.cfg"), IoError);
}

TEST_CASE("snapshot round trip") {
    const Config c = load_config(paper_cfg());
    std::string text;
    std::string section;
    for (const auto& [key, value] : c.snapshot()) {
        const auto dot = key.find('.');
        if (key.substr(0, dot) != section) {
            section = key.substr(0, dot);
            text += "[" + section + "]\n";
        }
        if (!value.empty()) text += key.substr(dot + 1) + " = " + value + "\n";
    }
    const Config again = parse_config(text);
    CHECK(again.snapshot() == c.snapshot());
}

TEST_CASE("tuning moves the cavity onto the chosen line") {
    const Config a = parse_config("[cavity]\ntune_to_transition = D\n");
    CHECK(a.cavity.resonance_frequency_ghz == doctest::Approx(a.transitions().freq_d_ghz));
    const Config none = parse_config("");
    CHECK(none.cavity.resonance_frequency_ghz == doctest::Approx(194954.05));
}

TEST_CASE("timeline model carries the configured physics") {
    const Config c = load_config(paper_cfg());
    const TimelineModel m = c.timeline_model();
    CHECK(m.eta_detect == c.detection.eta_detect);
    CHECK(m.dark_rate_hz == c.detection.dark_rate_hz);
}

}  // TEST_SUITE
