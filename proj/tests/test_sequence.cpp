#include <doctest.h>

#include "spinshot/errors.hpp"
#include "spinshot/physics.hpp"
#include "spinshot/sequence.hpp"

#include <algorithm>
#include <cmath>

using namespace spinshot;

namespace {

const char* kReadout = "repeat 500 { pulse optical A 0.02us 0.5pi\n wait 6.88us\n detect 3us }";

TransitionSet nominal_transitions() { return zeeman_transitions(EmitterConfig{}, ZeemanConfig{}); }

std::string readout_block(int n, double wait_us) {
    return "repeat " + std::to_string(n) + " {\n pulse optical A 0.02us 0.6877pi\n detect 3us\n wait " +
           std::to_string(wait_us) + "us\n}\n";
}

}  // namespace

TEST_SUITE("sequence") {

TEST_CASE("readout block parses into one repeat of three statements") {
    const SequenceProgram p = parse_sequence(kReadout);
    REQUIRE(p.statements.size() == 1u);
    const Statement& r = p.statements[0];
    CHECK(r.kind == StatementKind::repeat);
    CHECK(r.count == 500);
    REQUIRE(r.body.size() == 3u);
    CHECK(r.body[0].kind == StatementKind::optical_pulse);
    CHECK(r.body[0].transition == 'A');
    CHECK(r.body[0].duration_us == doctest::Approx(0.02));
    CHECK(r.body[0].area_pi == doctest::Approx(0.5));
    CHECK(r.body[1].kind == StatementKind::wait);
    CHECK(r.body[2].kind == StatementKind::detect);
    CHECK(r.body[2].duration_us == doctest::Approx(3.0));
}

TEST_CASE("empty input gives an empty program") {
    CHECK(parse_sequence("").statements.empty());
    CHECK(parse_sequence("# only a comment\n\n").statements.empty());
    CHECK(compile(parse_sequence("")).events.empty());
    CHECK(duration_report(parse_sequence("")).total_ms == 0.0);
}

TEST_CASE("units and conversions") {
    const SequenceProgram p = parse_sequence(
        "wait 1ms\nwait 500ns\nwait 2s\npulse mw 3.6GHz 2.3us 1.5707963267948966rad\n"
        "pulse optical -1.8GHz 0.1us 1pi\n");
    CHECK(p.statements[0].duration_us == doctest::Approx(1000.0));
    CHECK(p.statements[1].duration_us == doctest::Approx(0.5));
    CHECK(p.statements[2].duration_us == doctest::Approx(2e6));
    CHECK(p.statements[3].frequency_mhz == doctest::Approx(3600.0));
    CHECK(p.statements[3].phase_deg == doctest::Approx(90.0));
    CHECK(p.statements[4].transition == 0);
    CHECK(p.statements[4].optical_offset_ghz == doctest::Approx(-1.8));
}

TEST_CASE("parse errors carry line and column") {
    auto error_of = [](std::string_view text) -> ParseError {
        try {
            parse_sequence(text, "prog.seq");
        } catch (const ParseError& e) {
            return e;
        }
        FAIL("expected ParseError");
        return ParseError("", 0, 0, "");
    };
    SUBCASE("missing unit on the duration") {
        const ParseError e = error_of("pulse optical A 0.02 0.5pi");
        CHECK(e.line() == 1);
        CHECK(e.column() == 17);
        CHECK(std::string(e.what()).find("prog.seq:1:17") == 0);
        CHECK(std::string(e.what()).find("0.02") != std::string::npos);
    }
    SUBCASE("unknown keyword") {
        const ParseError e = error_of("wait 1us\njump 3us\n");
        CHECK(e.line() == 2);
        CHECK(e.column() == 1);
    }
    SUBCASE("unbalanced braces") {
        CHECK(error_of("repeat 2 {\nwait 1us\n").line() == 1);
        CHECK(error_of("wait 1us\n}\n").line() == 2);
    }
    SUBCASE("bad values") {
        CHECK(error_of("repeat 0 { wait 1us }").line() == 1);
        CHECK(error_of("wait -1us").line() == 1);
        CHECK(error_of("wait 1MHz").line() == 1);
        CHECK(error_of("pulse optical Q 1us 1pi").line() == 1);
        CHECK(error_of("pulse laser A 1us 1pi").line() == 1);
        CHECK(error_of("wait 1us 2us").line() == 1);
    }
    SUBCASE("nesting limit") {
        std::string deep;
        for (int i = 0; i <= kMaxNesting; ++i) deep += "repeat 1 {\n";
        deep += "wait 1us\n";
        for (int i = 0; i <= kMaxNesting; ++i) deep += "}\n";
        CHECK(error_of(deep).line() == kMaxNesting + 1);
        std::string ok;
        for (int i = 0; i < kMaxNesting; ++i) ok += "repeat 1 {\n";
        ok += "wait 1us\n";
        for (int i = 0; i < kMaxNesting; ++i) ok += "}\n";
        CHECK_NOTHROW(parse_sequence(ok));
    }
}

TEST_CASE("print then parse is structurally identical") {
    const std::vector<std::string> programs = {
        kReadout,
        "pulse mw 3598.43MHz 2.3us 90deg\nwait 12.5us\npulse mw 3598.43MHz 4.6us 0deg\n",
        "repeat 3 { repeat 2 { pulse optical -0.25GHz 1ns 0.125pi\n detect 1.5us }\n wait 1ms }\n",
        "pulse optical D 0.1us 1pi # pump\n",
    };
    for (const auto& text : programs) {
        CAPTURE(text);
        const SequenceProgram p = parse_sequence(text);
        const std::string printed = print_sequence(p);
        const SequenceProgram q = parse_sequence(printed);
        CHECK(q == p);
        CHECK(print_sequence(q) == printed);
    }
}

TEST_CASE("readout timeline") {
    const TransitionSet tr = nominal_transitions();
    const Timeline t = compile(parse_sequence(kReadout), &tr);
    CHECK(t.events.size() == 1500u);
    CHECK(t.gate_count == 500);
    CHECK(t.optical_pulse_count == 500);
    CHECK(t.total_duration_us == doctest::Approx(500 * 9.9));
    CHECK(t.events[0].optical_frequency_ghz == doctest::Approx(tr.freq_a_ghz));
    double sum = 0.0;
    for (std::size_t i = 0; i < t.events.size(); ++i) {
        sum += t.events[i].duration_us;
        if (i > 0) CHECK(t.events[i].start_us >= t.events[i - 1].start_us);
    }
    CHECK(sum == doctest::Approx(t.total_duration_us));
    int gate = 0;
    for (const auto& e : t.events)
        if (e.kind == EventKind::detect) CHECK(e.gate_index == gate++);
    CHECK_NOTHROW(validate_timeline(t));

    const Timeline padded = compile(parse_sequence(readout_block(500, 6.98)), &tr);
    CHECK(padded.total_duration_us == doctest::Approx(5000.0));
}

TEST_CASE("pump-probe timeline") {
    const TransitionSet tr = nominal_transitions();
    const Timeline t = compile(parse_sequence(
                                   "repeat 500 {\n pulse optical D 0.1us 1pi\n wait 9.9us\n}\n"
                                   "pulse optical A 0.2us 1pi\ndetect 20us\n"),
                               &tr);
    CHECK(t.events.size() == 1001u + static_cast<std::size_t>(t.gate_count));
    CHECK(t.gate_count == 1);
    CHECK(t.optical_pulse_count == 501);
    CHECK(t.events[0].optical_frequency_ghz == doctest::Approx(tr.freq_d_ghz));
    CHECK(t.events[1000].optical_frequency_ghz == doctest::Approx(tr.freq_a_ghz));
    CHECK(t.events[1000].duration_us == doctest::Approx(0.2));
}

TEST_CASE("single wait") {
    const Timeline t = compile(parse_sequence("repeat 1 { wait 5us }"));
    REQUIRE(t.events.size() == 1u);
    CHECK(t.events[0].kind == EventKind::wait);
    CHECK(t.total_duration_us == doctest::Approx(5.0));
}

TEST_CASE("labels need a transition set; offsets do not") {
    CHECK_THROWS_AS(compile(parse_sequence("pulse optical A 1us 1pi")), ParseError);
    const Timeline t = compile(parse_sequence("pulse optical 1.5GHz 1us 1pi"));
    CHECK(t.events[0].optical_frequency_ghz == doctest::Approx(1.5));
    const EmitterConfig em;
    const TransitionSet tr = nominal_transitions();
    const Timeline u = compile(parse_sequence("pulse optical 1.5GHz 1us 1pi"), &tr);
    CHECK(u.events[0].optical_frequency_ghz == doctest::Approx(em.zero_field_optical_frequency_ghz + 1.5));
}

TEST_CASE("unroll capacity") {
    CompileOptions o;
    o.max_events = 1000;
    CHECK_NOTHROW(compile(parse_sequence("repeat 1000 { wait 1us }"), nullptr, o));
    CHECK_THROWS_AS(compile(parse_sequence("repeat 1001 { wait 1us }"), nullptr, o), CapacityError);
    CHECK_THROWS_AS(compile(parse_sequence("repeat 100000 { repeat 100000 { wait 1us } }")), CapacityError);
}

TEST_CASE("timeline validation rejects overlaps") {
    Timeline t;
    TimelineEvent pulse;
    pulse.kind = EventKind::optical_pulse;
    pulse.duration_us = 1.0;
    TimelineEvent gate;
    gate.kind = EventKind::detect;
    gate.start_us = 0.5;
    gate.duration_us = 1.0;
    t.events = {pulse, gate};
    CHECK_THROWS_AS(validate_timeline(t), InvalidInput);
    TimelineEvent late = pulse;
    late.start_us = 3.0;
    TimelineEvent early = pulse;
    early.start_us = 2.0;
    t.events = {late, early};
    CHECK_THROWS_AS(validate_timeline(t), InvalidInput);
}

TEST_CASE("readout durations") {
    const DurationReport at_period = duration_report(parse_sequence(readout_block(71, 6.98)));
    CHECK(at_period.total_ms == doctest::Approx(0.71).epsilon(1e-12));
    CHECK(at_period.max_rate_total_ms == doctest::Approx(0.2201).epsilon(1e-12));
    CHECK(std::round(at_period.max_rate_total_ms * 100) / 100 == doctest::Approx(0.22));
    REQUIRE(at_period.blocks.size() == 1u);
    CHECK(at_period.blocks[0].repetitions == 71);
    CHECK(at_period.blocks[0].duration_us == doctest::Approx(710.0));

    const DurationReport mixed = duration_report(parse_sequence("wait 1ms\n" + readout_block(71, 6.98)));
    CHECK(mixed.total_ms == doctest::Approx(1.71));
    CHECK(mixed.max_rate_total_ms == doctest::Approx(1.2201));
    CHECK(mixed.blocks.size() == 2u);
}

TEST_CASE("sequence files") {
    for (const char* name : {"readout.seq", "readout_500.seq", "pump_probe.seq", "odmr.seq", "echo.seq"}) {
        CAPTURE(name);
        const SequenceProgram p = read_sequence_file(std::string(SPINSHOT_SOURCE_DIR) + "/sequences/" + name);
        const TransitionSet tr = nominal_transitions();
        CHECK_NOTHROW(validate_timeline(compile(p, &tr)));
    }
    CHECK_THROWS_AS(read_sequence_file("/nonexistent.seq"), IoError);
}

}  // TEST_SUITE
