#include "spinshot/sequence.hpp"

#include "spinshot/errors.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>

namespace spinshot {

namespace {

enum class TokenKind { word, lbrace, rbrace, newline, end };

struct Token {
    TokenKind kind = TokenKind::end;
    std::string text;
    int line = 1;
    int column = 1;
};

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n = 1) {
        for (std::size_t k = 0; k < n && i < text.size(); ++k, ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    while (i < text.size()) {
        const char c = text[i];
        if (c == '#') {
            while (i < text.size() && text[i] != '\n') advance();
        } else if (c == '\n' || c == ';') {
            out.push_back({TokenKind::newline, std::string(1, c), line, col});
            advance();
        } else if (c == '{' || c == '}') {
            out.push_back({c == '{' ? TokenKind::lbrace : TokenKind::rbrace, std::string(1, c), line, col});
            advance();
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            advance();
        } else {
            Token t{TokenKind::word, {}, line, col};
            while (i < text.size()) {
                const char d = text[i];
                if (std::isspace(static_cast<unsigned char>(d)) || d == '{' || d == '}' || d == ';' ||
                    d == '#')
                    break;
                t.text.push_back(d);
                advance();
            }
            out.push_back(std::move(t));
        }
    }
    out.push_back({TokenKind::end, "", line, col});
    return out;
}

enum class Dimension { time, frequency, phase, area };

std::string_view dimension_name(Dimension d) {
    switch (d) {
        case Dimension::time: return "duration";
        case Dimension::frequency: return "frequency";
        case Dimension::phase: return "phase";
        case Dimension::area: return "pulse area";
    }
    return "quantity";
}

// Scale factor from a unit to the canonical unit of its dimension
// (us, MHz, deg, pi).
std::optional<double> unit_scale(std::string_view unit, Dimension dim) {
    switch (dim) {
        case Dimension::time:
            if (unit == "s") return 1e6;
            if (unit == "ms") return 1e3;
            if (unit == "us") return 1.0;
            if (unit == "ns") return 1e-3;
            break;
        case Dimension::frequency:
            if (unit == "Hz") return 1e-6;
            if (unit == "kHz") return 1e-3;
            if (unit == "MHz") return 1.0;
            if (unit == "GHz") return 1e3;
            break;
        case Dimension::phase:
            if (unit == "deg") return 1.0;
            if (unit == "rad") return 180.0 / 3.14159265358979323846;
            break;
        case Dimension::area:
            if (unit == "pi") return 1.0;
            break;
    }
    return std::nullopt;
}

class Parser {
public:
    Parser(std::string_view text, std::string source) : tokens_(tokenize(text)), source_(std::move(source)) {}

    SequenceProgram run() {
        SequenceProgram p;
        p.statements = block(0, nullptr);
        return p;
    }

private:
    [[noreturn]] void fail(const Token& at, const std::string& message) const {
        throw ParseError(source_, at.line, at.column, message);
    }

    const Token& peek() const { return tokens_[pos_]; }
    const Token& take() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }

    const Token& expect_word(std::string_view what) {
        const Token& t = peek();
        if (t.kind != TokenKind::word) fail(t, "missing " + std::string(what));
        return take();
    }

    double quantity(std::string_view what, Dimension dim) {
        const Token& t = expect_word(what);
        const std::string& s = t.text;
        const char* first = s.data();
        const char* last = s.data() + s.size();
        if (first != last && *first == '+') ++first;
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc() || ptr == first)
            fail(t, "expected a number with unit for " + std::string(what) + ", got '" + s + "'");
        const std::string_view unit(ptr, static_cast<std::size_t>(last - ptr));
        if (unit.empty())
            fail(t, "missing unit on " + std::string(what) + " '" + s + "' (expected a " +
                        std::string(dimension_name(dim)) + " unit)");
        const auto scale = unit_scale(unit, dim);
        if (!scale)
            fail(t, "unit '" + std::string(unit) + "' is not a " + std::string(dimension_name(dim)) +
                        " unit");
        if (!std::isfinite(value)) fail(t, "non-finite " + std::string(what));
        if (dim == Dimension::time && value < 0.0) fail(t, "durations must be >= 0");
        return value * *scale;
    }

    void end_of_statement() {
        const Token& t = peek();
        if (t.kind == TokenKind::newline) {
            take();
            return;
        }
        if (t.kind == TokenKind::rbrace || t.kind == TokenKind::end) return;
        fail(t, "unexpected '" + t.text + "' after statement");
    }

    std::vector<Statement> block(int depth, const Token* opening) {
        std::vector<Statement> out;
        for (;;) {
            const Token& t = peek();
            switch (t.kind) {
                case TokenKind::newline: take(); continue;
                case TokenKind::end:
                    if (opening) fail(*opening, "unbalanced braces: '{' is never closed");
                    return out;
                case TokenKind::rbrace:
                    if (!opening) fail(t, "unbalanced braces: unexpected '}'");
                    take();
                    return out;
                case TokenKind::lbrace: fail(t, "unexpected '{'");
                case TokenKind::word: break;
            }
            out.push_back(statement(depth));
        }
    }

    Statement statement(int depth) {
        const Token kw = take();
        Statement s;
        s.line = kw.line;
        s.column = kw.column;
        if (kw.text == "pulse") {
            const Token& which = expect_word("pulse channel (optical or mw)");
            if (which.text == "optical") {
                s.kind = StatementKind::optical_pulse;
                const Token& target = peek();
                if (target.kind == TokenKind::word && target.text.size() == 1 &&
                    std::string_view("ABCDabcd").find(target.text[0]) != std::string_view::npos) {
                    s.transition = static_cast<char>(std::toupper(static_cast<unsigned char>(take().text[0])));
                } else {
                    s.optical_offset_ghz = quantity("optical target", Dimension::frequency) * 1e-3;
                }
                s.duration_us = quantity("duration", Dimension::time);
                s.area_pi = quantity("pulse area", Dimension::area);
            } else if (which.text == "mw") {
                s.kind = StatementKind::mw_pulse;
                s.frequency_mhz = quantity("mw frequency", Dimension::frequency);
                s.duration_us = quantity("duration", Dimension::time);
                s.phase_deg = quantity("phase", Dimension::phase);
            } else {
                fail(which, "unknown pulse channel '" + which.text + "' (expected optical or mw)");
            }
        } else if (kw.text == "wait") {
            s.kind = StatementKind::wait;
            s.duration_us = quantity("duration", Dimension::time);
        } else if (kw.text == "detect") {
            s.kind = StatementKind::detect;
            s.duration_us = quantity("gate window", Dimension::time);
        } else if (kw.text == "repeat") {
            s.kind = StatementKind::repeat;
            const Token& n = expect_word("repeat count");
            long long count = 0;
            auto [ptr, ec] = std::from_chars(n.text.data(), n.text.data() + n.text.size(), count);
            if (ec != std::errc() || ptr != n.text.data() + n.text.size())
                fail(n, "repeat count must be an integer, got '" + n.text + "'");
            if (count < 1) fail(n, "repeat count must be >= 1");
            s.count = count;
            if (depth + 1 > kMaxNesting)
                fail(kw, "repeat nesting deeper than " + std::to_string(kMaxNesting));
            const Token& brace = peek();
            if (brace.kind != TokenKind::lbrace) fail(brace, "expected '{' after repeat count");
            const Token opening = take();
            s.body = block(depth + 1, &opening);
        } else {
            fail(kw, "unknown keyword '" + kw.text + "'");
        }
        end_of_statement();
        return s;
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    std::string source_;
};

std::string num(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

void print_block(std::ostringstream& out, const std::vector<Statement>& stmts, int indent) {
    const std::string pad(2 * indent, ' ');
    for (const auto& s : stmts) {
        out << pad;
        switch (s.kind) {
            case StatementKind::optical_pulse:
                out << "pulse optical ";
                if (s.transition) out << s.transition;
                else out << num(s.optical_offset_ghz) << "GHz";
                out << ' ' << num(s.duration_us) << "us " << num(s.area_pi) << "pi\n";
                break;
            case StatementKind::mw_pulse:
                out << "pulse mw " << num(s.frequency_mhz) << "MHz " << num(s.duration_us) << "us "
                    << num(s.phase_deg) << "deg\n";
                break;
            case StatementKind::wait: out << "wait " << num(s.duration_us) << "us\n"; break;
            case StatementKind::detect: out << "detect " << num(s.duration_us) << "us\n"; break;
            case StatementKind::repeat:
                out << "repeat " << s.count << " {\n";
                print_block(out, s.body, indent + 1);
                out << pad << "}\n";
                break;
        }
    }
}

// Saturating count of unrolled events.
std::size_t count_events(const std::vector<Statement>& stmts, std::size_t cap) {
    std::size_t total = 0;
    for (const auto& s : stmts) {
        std::size_t n = 1;
        if (s.kind == StatementKind::repeat) {
            const std::size_t body = count_events(s.body, cap);
            n = (body != 0 && static_cast<std::size_t>(s.count) > cap / body)
                    ? cap + 1
                    : body * static_cast<std::size_t>(s.count);
        }
        total = (total > cap - std::min(cap, n)) ? cap + 1 : total + n;
        if (total > cap) return cap + 1;
    }
    return total;
}

struct Compiler {
    const TransitionSet* transitions;
    const CompileOptions& options;
    Timeline timeline;
    double t = 0.0;

    double optical_frequency(const Statement& s) const {
        if (s.transition) {
            if (!transitions)
                throw ParseError(options.source, s.line, s.column,
                                 std::string("transition label '") + s.transition +
                                     "' needs a level configuration");
            return transitions->frequency(s.transition);
        }
        const double center =
            transitions ? 0.5 * (transitions->freq_a_ghz + transitions->freq_b_ghz) : 0.0;
        return center + s.optical_offset_ghz;
    }

    void emit(const std::vector<Statement>& stmts) {
        for (const auto& s : stmts) {
            if (s.kind == StatementKind::repeat) {
                for (long long r = 0; r < s.count; ++r) emit(s.body);
                continue;
            }
            TimelineEvent e;
            e.start_us = t;
            e.duration_us = s.duration_us;
            switch (s.kind) {
                case StatementKind::optical_pulse:
                    e.kind = EventKind::optical_pulse;
                    e.transition = s.transition;
                    e.optical_frequency_ghz = optical_frequency(s);
                    e.area_pi = s.area_pi;
                    e.optical_index = timeline.optical_pulse_count++;
                    break;
                case StatementKind::mw_pulse:
                    e.kind = EventKind::mw_pulse;
                    e.mw_frequency_mhz = s.frequency_mhz;
                    e.phase_deg = s.phase_deg;
                    break;
                case StatementKind::wait: e.kind = EventKind::wait; break;
                case StatementKind::detect:
                    e.kind = EventKind::detect;
                    e.gate_index = timeline.gate_count++;
                    break;
                case StatementKind::repeat: break;
            }
            t += s.duration_us;
            timeline.events.push_back(e);
        }
    }
};

double max_rate_duration(const std::vector<Statement>& stmts, double overhead);

double plain_duration(const std::vector<Statement>& stmts) {
    double total = 0.0;
    for (const auto& s : stmts)
        total += s.kind == StatementKind::repeat ? s.count * plain_duration(s.body) : s.duration_us;
    return total;
}

double max_rate_statement(const Statement& s, double overhead) {
    if (s.kind != StatementKind::repeat) return s.duration_us;
    bool has_optical = false, has_detect = false;
    for (const auto& b : s.body) {
        has_optical |= b.kind == StatementKind::optical_pulse;
        has_detect |= b.kind == StatementKind::detect;
    }
    if (!(has_optical && has_detect)) return s.count * max_rate_duration(s.body, overhead);
    double period = overhead;
    for (const auto& b : s.body) {
        if (b.kind == StatementKind::wait) continue;
        period += max_rate_statement(b, overhead);
    }
    return s.count * period;
}

double max_rate_duration(const std::vector<Statement>& stmts, double overhead) {
    double total = 0.0;
    for (const auto& s : stmts) total += max_rate_statement(s, overhead);
    return total;
}

std::string describe(const Statement& s) {
    if (s.kind == StatementKind::repeat)
        return "repeat " + std::to_string(s.count) + " {" + std::to_string(s.body.size()) +
               " statements}";
    std::ostringstream out;
    print_block(out, {s}, 0);
    std::string d = out.str();
    if (!d.empty() && d.back() == '\n') d.pop_back();
    return d;
}

}  // namespace

bool Statement::operator==(const Statement& o) const {
    return kind == o.kind && transition == o.transition &&
           optical_offset_ghz == o.optical_offset_ghz && area_pi == o.area_pi &&
           frequency_mhz == o.frequency_mhz && phase_deg == o.phase_deg &&
           duration_us == o.duration_us && count == o.count && body == o.body;
}

SequenceProgram parse_sequence(std::string_view text, const std::string& source) {
    return Parser(text, source).run();
}

SequenceProgram read_sequence_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open sequence file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_sequence(buf.str(), path);
}

std::string print_sequence(const SequenceProgram& program) {
    std::ostringstream out;
    print_block(out, program.statements, 0);
    return out.str();
}

Channel channel_of(EventKind kind) {
    switch (kind) {
        case EventKind::optical_pulse: return Channel::optical;
        case EventKind::mw_pulse: return Channel::microwave;
        case EventKind::detect: return Channel::detection;
        case EventKind::wait: return Channel::idle;
    }
    return Channel::idle;
}

std::string_view to_string(EventKind kind) {
    switch (kind) {
        case EventKind::optical_pulse: return "optical";
        case EventKind::mw_pulse: return "mw";
        case EventKind::wait: return "wait";
        case EventKind::detect: return "detect";
    }
    return "?";
}

Timeline compile(const SequenceProgram& program, const TransitionSet* transitions,
                 const CompileOptions& options) {
    const std::size_t n = count_events(program.statements, options.max_events);
    if (n > options.max_events)
        throw CapacityError("unrolled sequence exceeds " + std::to_string(options.max_events) +
                            " events");
    Compiler c{transitions, options, {}, 0.0};
    c.timeline.events.reserve(n);
    c.emit(program.statements);
    c.timeline.total_duration_us = c.t;
    validate_timeline(c.timeline);
    return std::move(c.timeline);
}

void validate_timeline(const Timeline& timeline) {
    constexpr double eps = 1e-9;
    double last_start = -std::numeric_limits<double>::infinity();
    double busy_until[3] = {-1e300, -1e300, -1e300};  // optical, mw, detection
    double pulse_busy_until = -1e300;                  // optical or mw
    for (std::size_t i = 0; i < timeline.events.size(); ++i) {
        const auto& e = timeline.events[i];
        if (e.start_us < last_start - eps)
            throw InvalidInput("timeline event " + std::to_string(i) + " starts before its predecessor");
        last_start = e.start_us;
        const Channel ch = channel_of(e.kind);
        if (ch == Channel::idle) continue;
        const int slot = static_cast<int>(ch);
        if (e.start_us < busy_until[slot] - eps)
            throw InvalidInput("timeline event " + std::to_string(i) + " (" +
                               std::string(to_string(e.kind)) + ") overlaps its channel");
        if (ch == Channel::detection && e.start_us < pulse_busy_until - eps)
            throw InvalidInput("detection gate " + std::to_string(i) + " overlaps a pulse");
        if (ch != Channel::detection && e.start_us < busy_until[2] - eps)
            throw InvalidInput("pulse " + std::to_string(i) + " overlaps a detection gate");
        busy_until[slot] = std::max(busy_until[slot], e.end_us());
        if (ch != Channel::detection) pulse_busy_until = std::max(pulse_busy_until, e.end_us());
    }
}

DurationReport duration_report(const SequenceProgram& program, double overhead_us) {
    DurationReport r;
    r.overhead_us = overhead_us;
    double total = 0.0, fast = 0.0;
    for (const auto& s : program.statements) {
        BlockDuration b;
        b.line = s.line;
        b.description = describe(s);
        b.repetitions = s.kind == StatementKind::repeat ? s.count : 1;
        b.duration_us = s.kind == StatementKind::repeat ? s.count * plain_duration(s.body) : s.duration_us;
        b.max_rate_duration_us = max_rate_statement(s, overhead_us);
        total += b.duration_us;
        fast += b.max_rate_duration_us;
        r.blocks.push_back(std::move(b));
    }
    r.total_ms = total * 1e-3;
    r.max_rate_total_ms = fast * 1e-3;
    return r;
}

}  // namespace spinshot
