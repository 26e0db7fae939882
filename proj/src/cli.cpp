#include "spinshot/cli.hpp"

#include "spinshot/config.hpp"
#include "spinshot/errors.hpp"
#include "spinshot/estimators.hpp"
#include "spinshot/io.hpp"
#include "spinshot/montecarlo.hpp"
#include "spinshot/physics.hpp"
#include "spinshot/readout.hpp"
#include "spinshot/sequence.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#ifndef SPINSHOT_VERSION
#define SPINSHOT_VERSION "dev"
#endif

namespace spinshot {

namespace {

struct GlobalOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> shots;
    std::string out_dir = "spinshot_out";
    std::string format = "report";
};

void add_globals(CLI::App* app, GlobalOptions& g) {
    app->add_option("--config", g.config_path, "Configuration file (defaults: built-in nominal values)");
    app->add_option("--seed", g.seed, "Random seed (overrides [simulation] seed)");
    app->add_option("--shots", g.shots, "Shots, or shots per point (overrides the config)");
    app->add_option("--out-dir", g.out_dir, "Output directory")->capture_default_str();
    app->add_option("--format", g.format, "csv: data files only; report: data files plus report.txt")
        ->check(CLI::IsMember({"csv", "report"}))
        ->capture_default_str();
}

struct Run {
    Config config;
    std::uint64_t seed = 0;
    std::uint64_t shots = 0;
    OutputWriter writer;
    std::ostringstream report;
};

Run start_run(const std::string& command, const GlobalOptions& g) {
    Config cfg = g.config_path.empty() ? Config{} : load_config(g.config_path);
    if (g.seed) cfg.simulation.seed = *g.seed;
    if (g.shots) {
        if (*g.shots < 1) throw InvalidInput("--shots must be >= 1");
        cfg.simulation.shots = *g.shots;
        cfg.area_sweep.shots = *g.shots;
    }
    cfg.validate();
    RunManifest m;
    m.command = command;
    m.config = cfg.snapshot();
    m.seed = cfg.simulation.seed;
    m.version = SPINSHOT_VERSION;
    m.started_utc = utc_timestamp();
    Run run{cfg, cfg.simulation.seed, cfg.simulation.shots,
            OutputWriter(g.out_dir, output_format_from_string(g.format), std::move(m)), {}};
    run.report << "spinshot " << command << "\n";
    if (!g.config_path.empty()) run.report << "config: " << g.config_path << "\n";
    return run;
}

void finish_run(Run& run, std::ostream& out) {
    const std::string text = run.report.str();
    run.writer.write_report(text);
    const RunManifest m = run.writer.finish();
    out << text;
    out << "outputs in " << run.writer.out_dir() << ":";
    for (const auto& f : m.outputs) out << " " << f;
    out << "\n";
}

std::string pct(double v) { return format_number(100.0 * v) + "%"; }

CsvTable distribution_table(const CountDistribution& d) {
    CsvTable t{{"count", "probability"}, {}};
    for (std::size_t k = 0; k < d.probabilities.size(); ++k)
        t.add_row({std::to_string(k), format_number(d.probabilities[k])});
    return t;
}

CsvTable curve_table(const ReadoutOptimum& opt) {
    CsvTable t{{"n", "threshold", "f_bright", "f_dark", "f_min"}, {}};
    for (const auto& r : opt.curve)
        t.add_row({std::to_string(r.n_pulses), std::to_string(r.threshold), format_number(r.f_bright),
                   format_number(r.f_dark), format_number(r.f_min)});
    return t;
}

CsvTable histogram_table(const std::vector<std::uint64_t>& hist, std::uint64_t shots) {
    CsvTable t{{"count", "probability"}, {}};
    for (std::size_t k = 0; k < hist.size(); ++k)
        t.add_row({std::to_string(k), format_number(static_cast<double>(hist[k]) / static_cast<double>(shots))});
    return t;
}

void report_fidelity(std::ostream& r, const FidelityReport& f) {
    r << "  N = " << f.n_pulses << ", threshold = " << f.threshold << "\n";
    r << "  F_bright = " << format_number(f.f_bright) << ", F_dark = " << format_number(f.f_dark)
      << ", F = " << format_number(f.f_min) << "\n";
    if (f.readout_duration_ms) r << "  readout duration = " << format_number(*f.readout_duration_ms) << " ms\n";
    if (f.cyclicity_bright)
        r << "  cyclicity bright/dark/mean = " << format_number(*f.cyclicity_bright) << " / "
          << format_number(*f.cyclicity_dark) << " / " << format_number(*f.cyclicity_mean) << "\n";
}

int cmd_levels(const GlobalOptions& g, std::ostream& out) {
    Run run = start_run("levels", g);
    const Config& c = run.config;
    const TransitionSet t = c.transitions();
    const double kappa = cavity_linewidth(c.cavity);
    CsvTable table{{"label", "frequency_ghz", "cavity_detuning_ghz", "lifetime_us"}, {}};
    for (char label : {'A', 'B', 'C', 'D'}) {
        const double f = t.frequency(label);
        const double det = f - c.cavity.resonance_frequency_ghz;
        table.add_row({std::string(1, label), format_number(f), format_number(det),
                       format_number(effective_lifetime(c.emitter, c.cavity, det))});
    }
    run.writer.write_csv("levels.csv", table);
    auto& r = run.report;
    r << "field " << format_number(c.field.magnetic_field_tesla) << " T along " << c.field.field_axis << "\n";
    for (const auto& row : table.rows) r << "  " << row[0] << ": " << row[1] << " GHz\n";
    r << "ground splitting = " << format_number(t.ground_splitting_ghz) << " GHz\n";
    r << "excited splitting = " << format_number(t.excited_splitting_ghz) << " GHz\n";
    r << "|f_A - f_D| = " << format_number(std::abs(t.freq_a_ghz - t.freq_d_ghz)) << " GHz\n";
    r << "cavity linewidth = " << format_number(kappa) << " GHz\n";
    r << "lifetime on resonance = " << format_number(effective_lifetime(c.emitter, c.cavity, 0.0)) << " us\n";
    r << "Purcell factor = "
      << format_number(purcell_factor(c.emitter.bulk_lifetime_us, effective_lifetime(c.emitter, c.cavity, 0.0)))
      << "\n";
    r << "suppression at |f_A - f_D| = "
      << format_number(lorentzian_suppression(t.freq_a_ghz - t.freq_d_ghz, kappa)) << "\n";
    r << "detection efficiency budget = " << format_number(detection_efficiency_budget(c.cavity)) << "\n";
    finish_run(run, out);
    return exit_ok;
}

int cmd_readout_optimize(const GlobalOptions& g, std::ostream& out) {
    Run run = start_run("readout-optimize", g);
    const Config& c = run.config;
    const ReadoutParams params = c.readout_params();
    const ReadoutOptimum opt = optimize_readout(params, c.readout.n_min, c.readout.n_max);
    run.writer.write_csv("fidelity_vs_n.csv", curve_table(opt));
    run.writer.write_csv("counts_bright.csv", distribution_table(count_distribution(params, SpinState::bright)));
    run.writer.write_csv("counts_dark.csv", distribution_table(count_distribution(params, SpinState::dark)));

    auto& r = run.report;
    r << "per-pulse detection probability d = " << format_number(params.detection_probability()) << "\n";
    r << "configured readout:\n";
    report_fidelity(r, summarize_readout(params, c.readout.threshold));
    r << "dark-count penalty = " << pct(dark_count_penalty(params, c.readout.threshold)) << "\n";
    r << "optimum over N in [" << c.readout.n_min << ", " << c.readout.n_max << "]:\n";
    r << "  N* = " << opt.n_star << ", threshold* = " << opt.threshold_star
      << ", F* = " << format_number(opt.f_star) << "\n";
    r << "  interior optimum: " << (opt.n_star > c.readout.n_min && opt.n_star < c.readout.n_max ? "yes" : "no")
      << "\n";
    finish_run(run, out);
    return exit_ok;
}

std::vector<double> parse_sweep(const std::string& text) {
    // start:stop:count or a comma list
    std::vector<double> out;
    if (text.find(':') != std::string::npos) {
        double a = 0, b = 0;
        long n = 0;
        char c1 = 0, c2 = 0;
        std::istringstream ss(text);
        if (!(ss >> a >> c1 >> b >> c2 >> n) || c1 != ':' || c2 != ':' || n < 1 || !ss.eof())
            throw InvalidInput("--sweep expects start:stop:count, got '" + text + "'");
        for (long i = 0; i < n; ++i) out.push_back(n == 1 ? a : a + (b - a) * static_cast<double>(i) / (n - 1));
        return out;
    }
    std::istringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw InvalidInput("--sweep: bad value '" + item + "'");
        }
    }
    if (out.empty()) throw InvalidInput("--sweep is empty");
    return out;
}

struct SimulateOptions {
    std::string sequence;
    std::string initial;
    std::string protocol;
    std::string sweep;
    bool readout = false;
};

int cmd_simulate(const GlobalOptions& g, const SimulateOptions& o, std::ostream& out) {
    const int modes = !o.sequence.empty() + !o.protocol.empty() + o.readout;
    if (modes != 1) throw InvalidInput("simulate needs exactly one of <sequence-file>, --protocol, --readout");
    Run run = start_run("simulate", g);
    const Config& c = run.config;
    const SpinState initial = spin_state_from_string(o.initial.empty() ? c.simulation.initial : o.initial);
    auto& r = run.report;
    r << "seed = " << run.seed << ", shots = " << run.shots << "\n";

    if (!o.protocol.empty()) {
        const Protocol p = protocol_from_string(o.protocol);
        if (o.sweep.empty()) throw InvalidInput("--protocol needs --sweep");
        const auto points = run_protocol(p, parse_sweep(o.sweep), c.bath, c.mw, run.shots, run.seed);
        CsvTable t{{"x", "mean", "stderr", "shots"}, {}};
        for (const auto& pt : points)
            t.add_row({format_number(pt.x), format_number(pt.mean), format_number(pt.stderr_), std::to_string(pt.shots)});
        run.writer.write_csv("curve.csv", t);
        r << "protocol " << to_string(p) << ", " << points.size() << " points\n";
    } else if (o.readout) {
        const ReadoutParams params = c.readout_params();
        ReadoutSimOptions so;
        so.emission_lifetime_us = c.detection.emission_lifetime_us;
        so.max_records = c.simulation.max_records;
        const ReadoutSimResult res = simulate_readout_shots(params, initial, run.shots, run.seed, so);
        run.writer.write_csv("counts.csv", histogram_table(res.histogram, res.shots));
        CsvTable trace{{"pulse", "mean_counts"}, {}};
        for (std::size_t k = 0; k < res.trace.size(); ++k) trace.add_row({std::to_string(k), format_number(res.trace[k])});
        run.writer.write_csv("trace.csv", trace);
        run.writer.write_records("records.txt", res.records);
        const double tv = total_variation(res.distribution(initial, params.n_pulses), count_distribution(params, initial));
        r << "readout model, initial " << to_string(initial) << ", N = " << params.n_pulses << "\n";
        r << "total variation to the exact distribution = " << format_number(tv) << "\n";
        r << "mean excitations before first flip = " << format_number(res.mean_excitations_before_flip) << "\n";
    } else {
        const SequenceProgram program = read_sequence_file(o.sequence);
        const TransitionSet transitions = c.transitions();
        CompileOptions co;
        co.source = o.sequence;
        const Timeline timeline = compile(program, &transitions, co);
        validate_timeline(timeline);
        const DurationReport d = duration_report(program);
        const TimelineSimResult res =
            simulate_timeline(timeline, c.timeline_model(), initial, run.shots, run.seed, c.simulation.max_records);
        run.writer.write_csv("counts.csv", histogram_table(res.histogram, res.shots));
        CsvTable gates{{"gate", "start_us", "mean_counts"}, {}};
        for (const auto& ev : timeline.events)
            if (ev.kind == EventKind::detect)
                gates.add_row({std::to_string(ev.gate_index), format_number(ev.start_us),
                               format_number(static_cast<double>(res.gate_counts[ev.gate_index]) /
                                             static_cast<double>(res.shots))});
        run.writer.write_csv("gate_trace.csv", gates);
        run.writer.write_records("records.txt", res.records);
        r << "sequence " << o.sequence << ": " << timeline.events.size() << " events, " << timeline.gate_count
          << " gates, " << timeline.optical_pulse_count << " optical pulses\n";
        r << "duration = " << format_number(d.total_ms) << " ms (max rate " << format_number(d.max_rate_total_ms)
          << " ms)\n";
        r << "initial " << to_string(initial) << ", final bright fraction = "
          << format_number(static_cast<double>(res.final_bright) / static_cast<double>(res.shots)) << "\n";
        double mean = 0.0;
        for (std::size_t k = 0; k < res.histogram.size(); ++k) mean += static_cast<double>(k * res.histogram[k]);
        r << "mean detected photons per shot = " << format_number(mean / static_cast<double>(res.shots)) << "\n";
    }
    finish_run(run, out);
    return exit_ok;
}

struct FitCliOptions {
    std::string csv;
    std::string model;
    std::vector<double> initial;
    bool unweighted = false;
};

int cmd_fit(const GlobalOptions& g, const FitCliOptions& o, std::ostream& out) {
    const FitModel model = FitModel::parse(o.model);
    Run run = start_run("fit", g);
    Series data = read_series_csv(o.csv);
    if (o.unweighted) data.sigma.clear();
    FitOptions fo;
    if (!o.initial.empty()) fo.initial = o.initial;
    const FitResult fit = fit_model(model, data, fo);
    CsvTable params{{"name", "value", "sigma"}, {}};
    for (std::size_t i = 0; i < fit.values.size(); ++i)
        params.add_row({fit.names[i], format_number(fit.values[i]), format_number(fit.sigmas[i])});
    run.writer.write_csv("fit_parameters.csv", params);
    CsvTable curve{{"x", "y", "fit", "residual"}, {}};
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double f = model.evaluate(data.x[i], fit.values);
        curve.add_row({format_number(data.x[i]), format_number(data.y[i]), format_number(f),
                       format_number(data.y[i] - f)});
    }
    run.writer.write_csv("fit_curve.csv", curve);
    auto& r = run.report;
    r << "model " << model.name() << " on " << o.csv << " (" << data.size() << " points)\n";
    for (std::size_t i = 0; i < fit.values.size(); ++i)
        r << "  " << fit.names[i] << " = " << format_number(fit.values[i]) << " +- " << format_number(fit.sigmas[i])
          << "\n";
    r << "residual norm = " << format_number(fit.residual_norm) << ", iterations = " << fit.iterations
      << ", start = " << fit.start_index << "\n";
    if (fit.degenerate) r << "warning: degenerate fit (rank-deficient Jacobian)\n";
    finish_run(run, out);
    return exit_ok;
}

struct G2Options {
    std::string records;
    double period_us = 0.0;
    int max_lag = 10;
};

int cmd_g2(const GlobalOptions& g, const G2Options& o, std::ostream& out) {
    Run run = start_run("g2", g);
    std::ifstream in(o.records);
    if (!in) throw IoError("cannot open records file " + o.records);
    const auto records = read_records(in, 0, o.records);
    const double period = o.period_us > 0.0 ? o.period_us : run.config.readout.pulse_period_us;
    const G2Result res = g2_pulsed(records, period, o.max_lag);
    CsvTable t{{"lag", "time_us", "pairs", "g2"}, {}};
    for (std::size_t l = 0; l < res.lag_g2.size(); ++l)
        t.add_row({std::to_string(l), format_number(res.lag_time_us[l]), format_number(res.lag_pairs[l]),
                   format_number(res.lag_g2[l])});
    run.writer.write_csv("g2.csv", t);
    run.report << records.size() << " records, period " << format_number(period) << " us, lags 1.." << res.max_lag
               << "\n";
    run.report << "g2(0) = " << format_number(res.g2_zero) << " +- " << format_number(res.g2_zero_sigma) << "\n";
    finish_run(run, out);
    return exit_ok;
}

int cmd_area_sweep(const GlobalOptions& g, std::ostream& out) {
    Run run = start_run("area-sweep", g);
    const Config& c = run.config;
    const AreaSweepConfig& a = c.area_sweep;
    AreaScanOptions opts;
    opts.trace_pulses = a.trace_pulses;
    opts.n_max = c.readout.n_max;
    opts.shots = a.shots;
    opts.sim.emission_lifetime_us = c.detection.emission_lifetime_us;
    const FlipModel flips =
        a.flip_model == "linear"
            ? FlipModel::linear(a.flip_bright0, a.flip_bright_slope, a.flip_dark0, a.flip_dark_slope)
            : FlipModel::per_excitation(a.flip_bright0, a.flip_bright_slope, a.flip_dark0, a.flip_dark_slope);
    const auto points = pulse_area_scan(a.areas, flips, c.readout_params(), run.seed, opts);
    CsvTable t{{"area_pi", "p_excite", "flip_bright", "flip_dark", "n0", "n0_sigma", "cyclicity", "cyclicity_direct",
                "n_star", "threshold_star", "f_star", "fit_ok"},
               {}};
    for (const auto& p : points)
        t.add_row({format_number(p.area_pi), format_number(p.p_excite), format_number(p.flip_bright),
                   format_number(p.flip_dark), format_number(p.n0), format_number(p.n0_sigma),
                   format_number(p.cyclicity), format_number(p.cyclicity_direct), std::to_string(p.n_star),
                   std::to_string(p.threshold_star), format_number(p.f_star), p.fit_ok ? "1" : "0"});
    run.writer.write_csv("area_sweep.csv", t);
    auto& r = run.report;
    r << "flip model " << a.flip_model << "\n";
    r << "seed = " << run.seed << ", shots per area = " << a.shots << ", trace pulses = " << a.trace_pulses << "\n";
    for (const auto& p : points)
        r << "  area " << format_number(p.area_pi) << " pi: p = " << format_number(p.p_excite)
          << ", zeta = " << (p.fit_ok ? format_number(p.cyclicity) : std::string("fit failed"))
          << ", F* = " << format_number(p.f_star) << " at N* = " << p.n_star << "\n";
    finish_run(run, out);
    return exit_ok;
}

struct CalibrateOptions {
    std::optional<double> target;
    std::optional<double> relaxation;
};

int cmd_calibrate(const GlobalOptions& g, const CalibrateOptions& o, std::ostream& out) {
    Run run = start_run("calibrate", g);
    const Config& c = run.config;
    const double target = o.target.value_or(c.readout.target_fidelity);
    const double relax = o.relaxation.value_or(c.readout.relaxation_constant);
    ReadoutParams params = c.readout_params();
    auto& r = run.report;
    r << "target F = " << format_number(target) << " at N = " << c.readout.n_pulses
      << ", threshold = " << c.readout.threshold << ", a + b = 1/" << format_number(relax) << "\n";
    ReadoutParams symmetric = params;
    symmetric.flip_bright = symmetric.flip_dark = 0.5 / relax;
    r << "symmetric model F = " << format_number(summarize_readout(symmetric, c.readout.threshold).f_min) << "\n";
    FlipCalibration cal;
    try {
        cal = calibrate_flip_asymmetry(params, relax, target, c.readout.n_pulses, c.readout.threshold);
    } catch (const CalibrationError& e) {
        r << "calibration failed: " << e.what() << "\n";
        r << "attainable F range: [" << format_number(e.attainable_min()) << ", "
          << format_number(e.attainable_max()) << "]\n";
        run.writer.write_report(run.report.str());
        run.writer.finish();
        throw;
    }
    params.flip_bright = cal.flip_bright;
    params.flip_dark = cal.flip_dark;
    const ReadoutOptimum opt = optimize_readout(params, c.readout.n_min, c.readout.n_max);
    CsvTable t{{"asymmetry", "flip_bright", "flip_dark", "achieved_f", "n_star", "threshold_star", "f_star"}, {}};
    t.add_row({format_number(cal.asymmetry), format_number(cal.flip_bright), format_number(cal.flip_dark),
               format_number(cal.achieved_f), std::to_string(opt.n_star), std::to_string(opt.threshold_star),
               format_number(opt.f_star)});
    run.writer.write_csv("calibration.csv", t);
    run.writer.write_csv("fidelity_vs_n.csv", curve_table(opt));
    r << "asymmetry s = " << format_number(cal.asymmetry) << " (a = " << format_number(cal.flip_bright)
      << ", b = " << format_number(cal.flip_dark) << ")\n";
    r << "achieved F = " << format_number(cal.achieved_f) << "\n";
    r << "calibrated optimum: N* = " << opt.n_star << ", threshold* = " << opt.threshold_star
      << ", F* = " << format_number(opt.f_star) << " (reference N = " << c.readout.n_pulses << ")\n";
    finish_run(run, out);
    return exit_ok;
}

int error_code(const Error& e) {
    if (dynamic_cast<const NumericalError*>(&e) || dynamic_cast<const DivergenceError*>(&e)) return exit_numerical;
    if (dynamic_cast<const InvalidInput*>(&e)) return exit_usage;
    return exit_config;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"spinshot: cavity-enhanced single-shot spin readout simulator", "spinshot"};
    app.set_version_flag("--version", SPINSHOT_VERSION);
    app.require_subcommand(1);
    GlobalOptions g;

    auto* levels = app.add_subcommand("levels", "Print the Zeeman-split optical transitions and cavity figures");
    add_globals(levels, g);

    auto* optimize = app.add_subcommand("readout-optimize", "Exact fidelity scan over pulse number and threshold");
    add_globals(optimize, g);

    SimulateOptions sim;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo run of a sequence file, a spin protocol, or the readout model");
    simulate->add_option("sequence", sim.sequence, "Pulse-sequence file");
    simulate->add_option("--initial", sim.initial, "Initial spin state (bright|dark; default from config)")
        ->check(CLI::IsMember({"bright", "dark"}));
    simulate->add_option("--protocol", sim.protocol, "Spin protocol: t1, odmr, rabi, echo");
    simulate->add_option("--sweep", sim.sweep, "Protocol sweep: start:stop:count or comma list");
    simulate->add_flag("--readout", sim.readout, "Simulate the per-pulse readout model");
    add_globals(simulate, g);

    FitCliOptions fit;
    auto* fitcmd = app.add_subcommand("fit", "Least-squares fit of an x,y[,sigma] CSV series");
    fitcmd->add_option("csv", fit.csv, "Input CSV")->required();
    fitcmd->add_option("--model", fit.model,
                       "exp_decay, exp_relax, gaussian_sum<k>, damped_sine, gaussian_echo, lorentzian")
        ->required();
    fitcmd->add_option("--initial", fit.initial, "Explicit starting parameters")->delimiter(',');
    fitcmd->add_flag("--unweighted", fit.unweighted, "Ignore the sigma column");
    add_globals(fitcmd, g);

    G2Options g2;
    auto* g2cmd = app.add_subcommand("g2", "Pulsed autocorrelation of a photon record file");
    g2cmd->add_option("records", g2.records, "Photon record file")->required();
    g2cmd->add_option("--period", g2.period_us, "Pulse period in us (default: [readout] pulse_period_us)");
    g2cmd->add_option("--max-lag", g2.max_lag, "Largest pulse lag used for normalization")->capture_default_str();
    add_globals(g2cmd, g);

    auto* area = app.add_subcommand("area-sweep", "Cyclicity and fidelity versus optical pulse area");
    add_globals(area, g);

    CalibrateOptions cal;
    auto* calibrate = app.add_subcommand("calibrate", "Infer the flip asymmetry that reproduces a target fidelity");
    calibrate->add_option("--target", cal.target, "Target fidelity (default: [readout] target_fidelity)");
    calibrate->add_option("--relaxation", cal.relaxation,
                          "Relaxation constant 1/(a+b) in pulses (default: [readout] relaxation_constant)");
    add_globals(calibrate, g);

    if (!args.empty() && !args.front().empty() && args.front().front() != '-') {
        bool known = false;
        for (const auto* sub : app.get_subcommands({})) known |= sub->get_name() == args.front();
        if (!known) {
            err << "error: unknown subcommand '" << args.front() << "'\n\n" << app.help();
            return exit_usage;
        }
    }
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return exit_usage;
    }

    try {
        if (levels->parsed()) return cmd_levels(g, out);
        if (optimize->parsed()) return cmd_readout_optimize(g, out);
        if (simulate->parsed()) return cmd_simulate(g, sim, out);
        if (fitcmd->parsed()) return cmd_fit(g, fit, out);
        if (g2cmd->parsed()) return cmd_g2(g, g2, out);
        if (area->parsed()) return cmd_area_sweep(g, out);
        if (calibrate->parsed()) return cmd_calibrate(g, cal, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return error_code(e);
    }
    err << app.help();
    return exit_usage;
}

int dispatch(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return dispatch(args, std::cout, std::cerr);
}

}  // namespace spinshot
