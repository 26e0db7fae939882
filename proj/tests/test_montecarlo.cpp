#include <doctest.h>

#include "oracles.hpp"
#include "spinshot/errors.hpp"
#include "spinshot/estimators.hpp"
#include "spinshot/montecarlo.hpp"
#include "spinshot/sequence.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>

using namespace spinshot;

namespace {

ReadoutParams clean_params(int n, double a, double b, double d) {
    ReadoutParams p;
    p.n_pulses = n;
    p.p_excite = 1.0;
    p.eta_detect = d;
    p.flip_bright = a;
    p.flip_dark = b;
    p.dark_rate_hz = 0.0;
    return p;
}

double gate_start(const ReadoutParams& p, int k) { return k * p.pulse_period_us + p.pulse_length_us; }

}  // namespace

TEST_SUITE("montecarlo") {

TEST_CASE("pi and 2 pi pulses") {
    const double rabi = 217.4;
    const ShotState flipped = apply_mw_pulse(ShotState{}, rabi, 0.0, 500.0 / rabi, 0.0);
    CHECK(flipped.spin.z == doctest::Approx(-1.0).epsilon(1e-12));
    const ShotState full = apply_mw_pulse(ShotState{}, rabi, 0.0, 1000.0 / rabi, 0.3);
    CHECK(std::abs(full.spin.x) < 1e-9);
    CHECK(std::abs(full.spin.y) < 1e-9);
    CHECK(std::abs(full.spin.z - 1.0) < 1e-9);
    CHECK_THROWS_AS(apply_mw_pulse(ShotState{}, rabi, 0.0, -1.0, 0.0), InvalidInput);
}

TEST_CASE("detuned rotation follows the Rabi formula") {
    const double rabi = 100.0;
    const ShotState s = apply_mw_pulse(ShotState{}, rabi, rabi, 500.0 / rabi, 0.0);
    const double p = 0.5 * (1.0 - s.spin.z);
    CHECK(p == doctest::Approx(oracle::rabi_flip(rabi, rabi, 5e-3)).epsilon(1e-12));
    CHECK(p == doctest::Approx(0.316).epsilon(2e-3));
    for (double det : {-300.0, -40.0, 0.0, 25.0, 500.0})
        for (double t : {0.1, 1.3, 2.3, 7.7}) {
            const ShotState r = apply_mw_pulse(ShotState{}, 217.4, det, t, 1.1);
            CHECK(0.5 * (1.0 - r.spin.z) == doctest::Approx(oracle::rabi_flip(217.4, det, t * 1e-3)).epsilon(1e-10));
        }
}

TEST_CASE("rotations preserve the Bloch norm") {
    RandomStream rng(3, 0);
    ShotState s;
    for (int i = 0; i < 2000; ++i) {
        s = apply_mw_pulse(s, 300.0 * rng.uniform(), 400.0 * (rng.uniform() - 0.5), 5.0 * rng.uniform(),
                           2.0 * std::numbers::pi * rng.uniform());
        s.spin = precess(s.spin, 100.0 * rng.normal(), rng.uniform());
        REQUIRE(std::abs(s.spin.norm() - 1.0) < 1e-9);
    }
}

TEST_CASE("phase sets the rotation axis") {
    const double rabi = 200.0;
    const ShotState x = apply_mw_pulse(ShotState{}, rabi, 0.0, 250.0 / rabi, 0.0);
    CHECK(x.spin.y == doctest::Approx(-1.0));
    const ShotState y = apply_mw_pulse(ShotState{}, rabi, 0.0, 250.0 / rabi, std::numbers::pi / 2);
    CHECK(y.spin.x == doctest::Approx(1.0));
    const BlochVector p = precess({1.0, 0.0, 0.0}, 250.0, 1.0);
    CHECK(p.y == doctest::Approx(1.0));
}

TEST_CASE("bath parameters") {
    BathParams b;
    CHECK_NOTHROW(b.validate());
    CHECK(BathParams::at_2p75_kelvin().t2_echo_us == 48.0);
    CHECK(BathParams::at_4p45_kelvin().t2_echo_us == 23.0);
    b.odmr_weights = {0.5, 0.5, 0.5};
    CHECK_THROWS_AS(b.validate(), InvalidConfig);
    b = BathParams{};
    b.t1_spin_s = 0.0;
    CHECK_THROWS_AS(b.validate(), InvalidConfig);
}

TEST_CASE("certain detection gives one event per gate") {
    const ReadoutParams p = clean_params(3, 0.0, 0.0, 1.0);
    const ReadoutSimResult r = simulate_readout_shots(p, SpinState::bright, 1, 5);
    REQUIRE(r.records.size() == 1u);
    const auto& ev = r.records[0].events;
    REQUIRE(ev.size() == 3u);
    for (int k = 0; k < 3; ++k) {
        CHECK(ev[k].pulse_index == k);
        CHECK(ev[k].origin == PhotonOrigin::emitter);
        CHECK(ev[k].timestamp_us >= gate_start(p, k));
        CHECK(ev[k].timestamp_us < gate_start(p, k) + p.gate_window_us);
    }
    CHECK(r.histogram.size() == 4u);
    CHECK(r.histogram[3] == 1u);
}

TEST_CASE("records agree with the histogram and stay inside gates") {
    ReadoutParams p;
    p.n_pulses = 71;
    p.dark_rate_hz = 2e4;
    ReadoutSimOptions o;
    o.max_records = 5000;
    const ReadoutSimResult r = simulate_readout_shots(p, SpinState::bright, 5000, 11, o);
    REQUIRE(r.records.size() == 5000u);
    std::vector<std::uint64_t> hist(r.histogram.size(), 0);
    bool any_dark = false;
    for (const auto& rec : r.records) {
        REQUIRE(rec.events.size() < hist.size());
        ++hist[rec.events.size()];
        for (std::size_t i = 0; i < rec.events.size(); ++i) {
            const auto& e = rec.events[i];
            any_dark |= e.origin == PhotonOrigin::dark;
            CHECK(e.timestamp_us >= gate_start(p, e.pulse_index));
            CHECK(e.timestamp_us < gate_start(p, e.pulse_index) + p.gate_window_us);
            if (i) CHECK(e.timestamp_us >= rec.events[i - 1].timestamp_us);
        }
    }
    CHECK(any_dark);
    CHECK(hist == r.histogram);
}

TEST_CASE("no dark rate, no dark events") {
    ReadoutParams p;
    p.dark_rate_hz = 0.0;
    const ReadoutSimResult r = simulate_readout_shots(p, SpinState::dark, 3000, 2);
    for (const auto& rec : r.records)
        for (const auto& e : rec.events) CHECK(e.origin == PhotonOrigin::emitter);
}

TEST_CASE("histogram converges to the exact distribution") {
    ReadoutParams p;
    for (std::uint64_t shots : {10000ull, 100000ull}) {
        for (SpinState s : {SpinState::bright, SpinState::dark}) {
            ReadoutSimOptions o;
            o.max_records = 0;
            const ReadoutSimResult r = simulate_readout_shots(p, s, shots, 77, o);
            const double tv = total_variation(r.distribution(s, p.n_pulses), count_distribution(p, s));
            CHECK(tv < 3.0 / std::sqrt(static_cast<double>(shots)));
        }
    }
}

TEST_CASE("mean trace matches the model trace") {
    ReadoutParams p;
    p.n_pulses = 200;
    const std::uint64_t shots = 50000;
    const ReadoutSimResult r = simulate_readout_shots(p, SpinState::bright, shots, 8);
    const auto t = expected_trace(p, SpinState::bright);
    const double dark = p.dark_rate_hz * 1e-6 * p.gate_window_us;
    for (int k = 0; k < p.n_pulses; k += 10) {
        const double m = t[k] + dark;
        CHECK(std::abs(r.trace[k] - m) < 5.0 * std::sqrt(m / shots));
    }
}

TEST_CASE("results do not depend on the worker count") {
    ReadoutParams p;
    std::vector<ReadoutSimResult> runs;
    for (const char* threads : {"1", "2", "7"}) {
        setenv("SPINSHOT_THREADS", threads, 1);
        runs.push_back(simulate_readout_shots(p, SpinState::bright, 40000, 99));
    }
    unsetenv("SPINSHOT_THREADS");
    for (std::size_t i = 1; i < runs.size(); ++i) {
        CHECK(runs[i].histogram == runs[0].histogram);
        CHECK(runs[i].trace == runs[0].trace);
        CHECK(runs[i].records.size() == runs[0].records.size());
        CHECK(runs[i].mean_excitations_before_flip == runs[0].mean_excitations_before_flip);
    }
    const ReadoutSimResult again = simulate_readout_shots(p, SpinState::bright, 40000, 99);
    CHECK(again.histogram == runs[0].histogram);
    const ReadoutSimResult other = simulate_readout_shots(p, SpinState::bright, 40000, 100);
    CHECK(other.histogram != runs[0].histogram);
}

TEST_CASE("protocols") {
    BathParams bath;
    ProtocolSettings set;
    SUBCASE("t1 starts at the initialization value") {
        const auto c = run_protocol(Protocol::t1, {0.0, 0.1, 1.0}, bath, set, 4000, 1);
        CHECK(c[0].mean == 1.0);
        CHECK(c[0].stderr_ == 0.0);
        const double expect = 0.5 + 0.5 * std::exp(-1.0 / 0.44);
        CHECK(std::abs(c[2].mean - expect) < 4 * c[2].stderr_ + 1e-3);
    }
    SUBCASE("rabi without noise follows the Rabi formula") {
        const auto c = run_protocol(Protocol::rabi, {0.0, 1.15, 2.3, 3.45}, bath, set, 4000, 2);
        CHECK(c[0].mean == 0.0);
        CHECK(c[2].mean == 1.0);
        CHECK(std::abs(c[1].mean - 0.5) < 4 * c[1].stderr_);
    }
    SUBCASE("odmr resolves the three lines when they are narrow") {
        bath.odmr_sigma_mhz = 1e-6;
        const auto c = run_protocol(Protocol::odmr, {-4.0, -2.0, 0.0, 2.0, 4.0}, bath, set, 4000, 3);
        CHECK(c[0].mean == doctest::Approx(0.25).epsilon(0.1));
        CHECK(c[2].mean == doctest::Approx(0.5).epsilon(0.1));
        CHECK(c[4].mean == doctest::Approx(0.25).epsilon(0.1));
        CHECK(c[1].mean < 0.02);
        CHECK(c[3].mean < 0.02);
    }
    SUBCASE("ideal echo contrast and its decay") {
        const auto c = run_protocol(Protocol::echo, {0.0, 48.0}, bath, set, 4000, 4);
        CHECK(c[0].mean == 1.0);
        CHECK(std::abs(c[1].mean - std::exp(-1.0)) < 4 * c[1].stderr_ + 1e-3);
    }
    SUBCASE("bad input") {
        CHECK_THROWS_AS(protocol_from_string("ramsey"), InvalidInput);
        CHECK_THROWS_AS(run_protocol(Protocol::t1, {-1.0}, bath, set, 10, 1), InvalidInput);
        CHECK(protocol_from_string(to_string(Protocol::echo)) == Protocol::echo);
    }
    SUBCASE("deterministic") {
        set.drive_amplitude_noise = 0.1;
        const auto a = run_protocol(Protocol::rabi, {1.0, 2.0}, bath, set, 1000, 5);
        const auto b = run_protocol(Protocol::rabi, {1.0, 2.0}, bath, set, 1000, 5);
        CHECK(a[0].mean == b[0].mean);
        CHECK(a[1].mean == b[1].mean);
    }
}

TEST_CASE("pulse area scan") {
    CHECK(excitation_probability(1.0) == doctest::Approx(1.0));
    CHECK(excitation_probability(0.5) == doctest::Approx(0.5));
    ReadoutParams base;
    SUBCASE("cyclicity from the fit matches trajectory counting when dark flips vanish") {
        const FlipModel flips = FlipModel::linear(0.02, 0.0, 0.0, 0.0);
        AreaScanOptions o;
        o.shots = 20000;
        o.n_max = 50;
        base.dark_rate_hz = 0.0;
        const auto pts = pulse_area_scan({0.5, 1.0}, flips, base, 3, o);
        for (const auto& pt : pts) {
            REQUIRE(pt.fit_ok);
            CHECK(pt.cyclicity == doctest::Approx(pt.p_excite * pt.n0));
            CHECK(pt.cyclicity == doctest::Approx(pt.cyclicity_direct).epsilon(0.04));
        }
        CHECK(pts[1].p_excite == doctest::Approx(1.0));
    }
    SUBCASE("flips growing with area lower the cyclicity") {
        const FlipModel flips = FlipModel::per_excitation(0.002, 0.004, 0.002, 0.004);
        AreaScanOptions o;
        o.shots = 10000;
        o.n_max = 100;
        const auto pts = pulse_area_scan({0.6, 0.8, 1.0}, flips, base, 4, o);
        for (const auto& pt : pts) REQUIRE(pt.fit_ok);
        CHECK(pts[0].cyclicity > pts[1].cyclicity);
        CHECK(pts[1].cyclicity > pts[2].cyclicity);
    }
}

TEST_CASE("timeline simulation") {
    EmitterConfig em;
    em.bulk_flip_branching = 0.0;
    ZeemanConfig field;
    TimelineModel m;
    m.emitter = em;
    m.transitions = zeeman_transitions(em, field);
    m.cavity.resonance_frequency_ghz = m.transitions.freq_a_ghz;
    m.flip_bright = m.flip_dark = 0.5 / 131;
    m.eta_detect = 0.10;
    const double area = 2.0 / std::numbers::pi * std::asin(std::sqrt(0.78));
    const std::string text = "repeat 71 {\n pulse optical A 0.02us " + std::to_string(area) +
                             "pi\n detect 3us\n wait 6.98us\n}\n";
    const Timeline tl = compile(parse_sequence(text), &m.transitions);
    REQUIRE(tl.gate_count == 71);

    SUBCASE("gates map one to one onto detect events and hold their photons") {
        const TimelineSimResult r = simulate_timeline(tl, m, SpinState::bright, 2000, 5, 2000);
        CHECK(r.gates == 71);
        CHECK(r.gate_counts.size() == 71u);
        std::vector<const TimelineEvent*> gates(71, nullptr);
        for (const auto& ev : tl.events)
            if (ev.kind == EventKind::detect) gates.at(ev.gate_index) = &ev;
        for (const auto* g : gates) REQUIRE(g != nullptr);
        std::uint64_t total = 0;
        for (const auto& rec : r.records)
            for (const auto& e : rec.events) {
                const auto* g = gates.at(e.pulse_index);
                CHECK(e.timestamp_us >= g->start_us);
                CHECK(e.timestamp_us < g->end_us());
                ++total;
            }
        std::uint64_t from_gates = 0;
        for (auto c : r.gate_counts) from_gates += c;
        CHECK(total == from_gates);
    }
    SUBCASE("readout sequence reproduces the exact count distribution") {
        ReadoutParams p;
        p.eta_detect = 0.10 * -std::expm1(-3.0 / effective_lifetime(em, m.cavity, 0.0));
        for (SpinState s : {SpinState::bright, SpinState::dark}) {
            const TimelineSimResult r = simulate_timeline(tl, m, s, 40000, 6, 0);
            CountDistribution sim;
            for (auto h : r.histogram) sim.probabilities.push_back(static_cast<double>(h) / 40000.0);
            CHECK(total_variation(sim, count_distribution(p, s)) < 0.02);
        }
    }
    SUBCASE("pumping on the flip transition empties the bright state") {
        const Timeline pump = compile(parse_sequence("repeat 300 {\n pulse optical C 0.1us 1pi\n wait 9.9us\n}\n"),
                                      &m.transitions);
        TimelineModel mm = m;
        mm.flip_bright = mm.flip_dark = 0.0;
        mm.emitter.bulk_flip_branching = 0.01;
        const TimelineSimResult r = simulate_timeline(pump, mm, SpinState::bright, 2000, 7, 0);
        CHECK(r.final_bright < 100u);
    }
    SUBCASE("worker count independence") {
        setenv("SPINSHOT_THREADS", "1", 1);
        const TimelineSimResult a = simulate_timeline(tl, m, SpinState::bright, 9000, 8, 10);
        setenv("SPINSHOT_THREADS", "5", 1);
        const TimelineSimResult b = simulate_timeline(tl, m, SpinState::bright, 9000, 8, 10);
        unsetenv("SPINSHOT_THREADS");
        CHECK(a.histogram == b.histogram);
        CHECK(a.gate_counts == b.gate_counts);
        CHECK(a.final_bright == b.final_bright);
    }
}

}  // TEST_SUITE
