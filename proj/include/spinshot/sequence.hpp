#pragma once

#include "spinshot/physics.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace spinshot {

// Pulse-sequence programs, one statement per line:
//
//   pulse optical <A|B|C|D|offset> <duration> <area>   e.g. pulse optical A 0.02us 0.5pi
//   pulse mw <frequency> <duration> <phase>            e.g. pulse mw 3600MHz 2.3us 90deg
//   wait <duration>
//   detect <duration>
//   repeat <count> { ... }
//
// Units are mandatory: s, ms, us, ns (time); Hz, kHz, MHz, GHz (frequency);
// deg, rad (phase); pi (pulse area). Optical offsets are signed frequencies
// relative to the zero-field line. '#' starts a comment.
enum class StatementKind { optical_pulse, mw_pulse, wait, detect, repeat };

struct Statement {
    StatementKind kind = StatementKind::wait;
    int line = 0;
    int column = 0;

    char transition = 0;              // optical: 'A'..'D', or 0 for a literal offset
    double optical_offset_ghz = 0.0;  // optical literal offset
    double area_pi = 0.0;             // optical
    double frequency_mhz = 0.0;       // mw
    double phase_deg = 0.0;           // mw
    double duration_us = 0.0;         // all but repeat
    long long count = 0;              // repeat
    std::vector<Statement> body;      // repeat

    // Structural equality; source positions are ignored.
    bool operator==(const Statement& other) const;
};

struct SequenceProgram {
    std::vector<Statement> statements;
    bool operator==(const SequenceProgram& other) const { return statements == other.statements; }
};

inline constexpr int kMaxNesting = 16;
inline constexpr std::size_t kMaxTimelineEvents = 10'000'000;

// Throws ParseError ("source:line:col: message") on the first error.
SequenceProgram parse_sequence(std::string_view text, const std::string& source = "<sequence>");
SequenceProgram read_sequence_file(const std::string& path);

// Canonical text form; parse_sequence(print_sequence(p)) == p.
std::string print_sequence(const SequenceProgram& program);

enum class EventKind { optical_pulse, mw_pulse, wait, detect };
enum class Channel { optical, microwave, detection, idle };

Channel channel_of(EventKind kind);
std::string_view to_string(EventKind kind);

struct TimelineEvent {
    double start_us = 0.0;
    double duration_us = 0.0;
    EventKind kind = EventKind::wait;
    char transition = 0;
    double optical_frequency_ghz = 0.0;  // absolute line the laser sits on
    double area_pi = 0.0;
    double mw_frequency_mhz = 0.0;
    double phase_deg = 0.0;
    int gate_index = -1;     // detect events: 0, 1, 2, ...
    int optical_index = -1;  // optical pulses: 0, 1, 2, ...

    double end_us() const { return start_us + duration_us; }
};

struct Timeline {
    std::vector<TimelineEvent> events;
    double total_duration_us = 0.0;
    int gate_count = 0;
    int optical_pulse_count = 0;
};

struct CompileOptions {
    std::size_t max_events = kMaxTimelineEvents;
    std::string source = "<sequence>";
};

// Unrolls repeats and schedules statements back to back. Transition labels
// resolve against `transitions`; without one, labels are a compile error and
// literal offsets are taken relative to 0 GHz.
Timeline compile(const SequenceProgram& program, const TransitionSet* transitions = nullptr,
                 const CompileOptions& options = {});

// Throws InvalidInput if two events on one channel overlap or start times
// decrease. Detection may overlap waits only.
void validate_timeline(const Timeline& timeline);

struct BlockDuration {
    int line = 0;
    std::string description;
    long long repetitions = 1;
    double duration_us = 0.0;
    double max_rate_duration_us = 0.0;
};

struct DurationReport {
    double total_ms = 0.0;
    // Total if every repeat block holding an optical pulse and a detection
    // gate ran at period (optical + mw + detection + overhead), i.e. waits
    // dropped.
    double max_rate_total_ms = 0.0;
    double overhead_us = 0.0;
    std::vector<BlockDuration> blocks;  // one per top-level statement
};

// Default overhead per period at max rate, back-solved from 71 pulses taking
// 0.22 ms with a 0.02 us pulse and a 3 us gate.
inline constexpr double kMaxRateOverheadUs = 0.08;

DurationReport duration_report(const SequenceProgram& program,
                               double overhead_us = kMaxRateOverheadUs);

}  // namespace spinshot
