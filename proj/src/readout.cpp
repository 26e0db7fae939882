#include "spinshot/readout.hpp"

#include "spinshot/errors.hpp"
#include "spinshot/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace spinshot {

namespace {

constexpr double kTailCutoff = 1e-12;

bool is_probability(double x) { return std::isfinite(x) && x >= 0.0 && x <= 1.0; }

// Two-state chain with counts, advanced one pulse at a time.
class CountChain {
public:
    CountChain(const ReadoutParams& params, SpinState initial, int capacity)
        : a_(params.flip_bright), b_(params.flip_dark), d_(params.detection_probability()),
          bright_(capacity + 1, 0.0), dark_(capacity + 1, 0.0), next_bright_(capacity + 1),
          next_dark_(capacity + 1) {
        (initial == SpinState::bright ? bright_ : dark_)[0] = 1.0;
    }

    void step() {
        const double stay_detect = (1.0 - a_) * d_;
        const double stay_miss = (1.0 - a_) * (1.0 - d_);
        const int top = pulses_ + 1;  // counts 0..top reachable after this pulse
        for (int k = 0; k <= top; ++k) {
            const double from_below = k > 0 ? bright_[k - 1] * stay_detect : 0.0;
            next_bright_[k] = bright_[k] * stay_miss + from_below + dark_[k] * b_;
            next_dark_[k] = bright_[k] * a_ + dark_[k] * (1.0 - b_);
        }
        std::copy_n(next_bright_.begin(), top + 1, bright_.begin());
        std::copy_n(next_dark_.begin(), top + 1, dark_.begin());
        ++pulses_;
    }

    std::vector<double> counts() const {
        std::vector<double> p(pulses_ + 1);
        for (int k = 0; k <= pulses_; ++k) p[k] = bright_[k] + dark_[k];
        return p;
    }

private:
    double a_, b_, d_;
    int pulses_ = 0;
    std::vector<double> bright_, dark_, next_bright_, next_dark_;
};

std::vector<double> poisson_pmf(double mean) {
    std::vector<double> pmf;
    double term = std::exp(-mean);
    double cumulative = 0.0;
    for (int k = 0;; ++k) {
        if (k > 0) term *= mean / k;
        pmf.push_back(term);
        cumulative += term;
        if (cumulative >= 1.0 - 1e-16 || (k > mean && term < 1e-300)) break;
    }
    return pmf;
}

void check_capacity(int n) {
    if (n < 1) throw InvalidInput("n_pulses must be >= 1");
    if (n > kMaxPulses)
        throw CapacityError("n_pulses " + std::to_string(n) + " exceeds capacity " +
                            std::to_string(kMaxPulses));
}

}  // namespace

std::string_view to_string(SpinState s) { return s == SpinState::bright ? "bright" : "dark"; }

SpinState spin_state_from_string(std::string_view s) {
    if (s == "bright" || s == "up") return SpinState::bright;
    if (s == "dark" || s == "down") return SpinState::dark;
    throw InvalidInput("unknown spin state '" + std::string(s) + "'");
}

void ReadoutParams::validate() const {
    if (n_pulses < 1) throw InvalidConfig("readout.n_pulses must be >= 1");
    for (double p : {p_excite, eta_detect, flip_bright, flip_dark})
        if (!is_probability(p)) throw InvalidConfig("readout probabilities must lie in [0, 1]");
    if (!is_probability(detection_probability()))
        throw InvalidConfig("readout detection probability must lie in [0, 1]");
    if (!(dark_rate_hz >= 0.0)) throw InvalidConfig("readout.dark_rate must be >= 0");
    if (!(gate_window_us >= 0.0)) throw InvalidConfig("readout.gate_window must be >= 0");
    if (!(pulse_period_us >= 0.0) || !(pulse_length_us >= 0.0))
        throw InvalidConfig("readout timing must be >= 0");
}

double CountDistribution::tail(int threshold) const {
    if (threshold <= 0) return total();
    double s = 0.0;
    for (std::size_t k = threshold; k < probabilities.size(); ++k) s += probabilities[k];
    return s;
}

double CountDistribution::total() const {
    return std::accumulate(probabilities.begin(), probabilities.end(), 0.0);
}

CountDistribution emitter_count_distribution(const ReadoutParams& params, SpinState initial) {
    params.validate();
    check_capacity(params.n_pulses);
    CountChain chain(params, initial, params.n_pulses);
    for (int i = 0; i < params.n_pulses; ++i) chain.step();
    return {chain.counts(), initial, params.n_pulses};
}

CountDistribution add_dark_counts(const CountDistribution& dist, double mean) {
    if (!(mean >= 0.0)) throw InvalidInput("dark-count mean must be >= 0");
    if (mean == 0.0) return dist;
    const std::vector<double> pmf = poisson_pmf(mean);
    std::vector<double> out(dist.probabilities.size() + pmf.size() - 1, 0.0);
    for (std::size_t i = 0; i < dist.probabilities.size(); ++i) {
        const double pi = dist.probabilities[i];
        if (pi == 0.0) continue;
        for (std::size_t j = 0; j < pmf.size(); ++j) out[i + j] += pi * pmf[j];
    }
    double cumulative = 0.0;
    std::size_t keep = out.size();
    for (std::size_t k = 0; k < out.size(); ++k) {
        cumulative += out[k];
        if (cumulative >= 1.0 - kTailCutoff) {
            keep = k + 1;
            break;
        }
    }
    out.resize(std::max(keep, dist.probabilities.size()));
    return {std::move(out), dist.initial, dist.n_pulses};
}

CountDistribution count_distribution(const ReadoutParams& params, SpinState initial) {
    return add_dark_counts(emitter_count_distribution(params, initial), params.dark_count_mean());
}

std::vector<double> expected_trace(const ReadoutParams& params, SpinState initial) {
    params.validate();
    const double a = params.flip_bright;
    const double b = params.flip_dark;
    const double d = params.detection_probability();
    const double p0 = initial == SpinState::bright ? 1.0 : 0.0;
    // a = b = 0 freezes the chain; pi is then irrelevant.
    const double pi = (a + b) > 0.0 ? b / (a + b) : p0;
    const double lambda = 1.0 - a - b;
    std::vector<double> trace(params.n_pulses);
    double decay = 1.0;
    for (int k = 0; k < params.n_pulses; ++k) {
        trace[k] = d * (1.0 - a) * (pi + (p0 - pi) * decay);
        decay *= lambda;
    }
    return trace;
}

DecayFit fit_decay_constant(const std::vector<double>& trace) {
    if (trace.size() < 4) throw InvalidInput("decay fit needs at least 4 points");
    Series s;
    s.x.resize(trace.size());
    std::iota(s.x.begin(), s.x.end(), 0.0);
    s.y = trace;
    const FitResult r = fit_model(FitModel::exp_decay(), s);
    if (r.degenerate)
        throw FitError("decay fit is degenerate (flat trace, N0 unbounded)");
    DecayFit out;
    out.amplitude = r.values[0];
    out.n0 = r.values[1];
    out.offset = r.values[2];
    out.amplitude_sigma = r.sigmas[0];
    out.n0_sigma = r.sigmas[1];
    out.offset_sigma = r.sigmas[2];
    // A decay constant far beyond the observation window is unresolved.
    if (out.n0 > 1e3 * static_cast<double>(trace.size()))
        throw FitError("decay constant unresolved: N0 = " + std::to_string(out.n0) +
                       " pulses exceeds the trace length by > 1000x");
    return out;
}

double chain_relaxation_pulses(double flip_bright, double flip_dark) {
    const double lambda = 1.0 - flip_bright - flip_dark;
    if (!(lambda > 0.0 && lambda < 1.0))
        throw InvalidInput("chain relaxation needs 0 < a + b < 1");
    return -1.0 / std::log(lambda);
}

double cyclicity(double p_excite, double n0) {
    if (!(p_excite > 0.0) || !(n0 > 0.0)) throw InvalidInput("cyclicity inputs must be > 0");
    return p_excite * n0;
}

FidelityReport readout_fidelity(const CountDistribution& bright, const CountDistribution& dark,
                                int threshold) {
    if (bright.n_pulses != dark.n_pulses)
        throw InvalidInput("count distributions cover different pulse numbers (" +
                           std::to_string(bright.n_pulses) + " vs " +
                           std::to_string(dark.n_pulses) + ")");
    if (threshold < 1) throw InvalidInput("threshold must be >= 1");
    FidelityReport r;
    r.threshold = threshold;
    r.n_pulses = bright.n_pulses;
    r.f_bright = bright.tail(threshold);
    r.f_dark = dark.total() - dark.tail(threshold);
    r.f_min = std::min(r.f_bright, r.f_dark);
    return r;
}

FidelityReport summarize_readout(const ReadoutParams& params, int threshold) {
    FidelityReport r = readout_fidelity(count_distribution(params, SpinState::bright),
                                        count_distribution(params, SpinState::dark), threshold);
    r.readout_duration_ms = params.readout_duration_ms();
    const double ab = params.flip_bright + params.flip_dark;
    if (ab > 0.0 && ab < 1.0 && params.p_excite > 0.0) {
        const double n0 = chain_relaxation_pulses(params.flip_bright, params.flip_dark);
        r.cyclicity_bright = cyclicity(params.p_excite, n0);
        r.cyclicity_dark = r.cyclicity_bright;
        r.cyclicity_mean = 0.5 * (*r.cyclicity_bright + *r.cyclicity_dark);
    }
    return r;
}

ReadoutOptimum optimize_readout(const ReadoutParams& params, int n_min, int n_max) {
    params.validate();
    if (n_min < 1) n_min = 1;
    if (n_max < n_min) throw InvalidInput("empty pulse-number range");
    check_capacity(n_max);

    // One pass of each chain yields the distributions for every prefix N.
    CountChain bright_chain(params, SpinState::bright, n_max);
    CountChain dark_chain(params, SpinState::dark, n_max);
    ReadoutOptimum best;
    best.f_star = -1.0;
    for (int n = 1; n <= n_max; ++n) {
        bright_chain.step();
        dark_chain.step();
        if (n < n_min) continue;
        ReadoutParams at_n = params;
        at_n.n_pulses = n;
        const double mean = at_n.dark_count_mean();
        const CountDistribution db =
            add_dark_counts({bright_chain.counts(), SpinState::bright, n}, mean);
        const CountDistribution dd =
            add_dark_counts({dark_chain.counts(), SpinState::dark, n}, mean);

        ReadoutGridRow row;
        row.f_min = -1.0;
        // Running sums over thresholds 1..n.
        double bright_below = db.at(0);
        double dark_below = dd.at(0);
        const double bright_total = db.total();
        for (int t = 1; t <= n; ++t) {
            const double fb = bright_total - bright_below;
            const double fd = dark_below;
            const double fm = std::min(fb, fd);
            if (fm > row.f_min) row = {n, t, fb, fd, fm};
            bright_below += db.at(t);
            dark_below += dd.at(t);
        }
        if (row.f_min > best.f_star) {
            best.f_star = row.f_min;
            best.n_star = n;
            best.threshold_star = row.threshold;
        }
        best.curve.push_back(row);
    }
    return best;
}

FlipCalibration calibrate_flip_asymmetry(const ReadoutParams& params, double relaxation_constant,
                                         double target_f, int n_pulses, int threshold) {
    if (!(relaxation_constant > 1.0)) throw InvalidInput("relaxation constant must be > 1 pulse");
    if (!is_probability(target_f)) throw InvalidInput("target fidelity must lie in [0, 1]");
    const double rate = 1.0 / relaxation_constant;
    auto fidelity_at = [&](double s) {
        ReadoutParams p = params;
        p.n_pulses = n_pulses;
        p.flip_bright = s * rate;
        p.flip_dark = (1.0 - s) * rate;
        return summarize_readout(p, threshold).f_min;
    };

    constexpr int kGrid = 1000;  // s = i / kGrid, i = 1..kGrid-1
    std::vector<double> f(kGrid + 1, 0.0);
    double lo = 2.0, hi = -1.0;
    for (int i = 1; i < kGrid; ++i) {
        f[i] = fidelity_at(static_cast<double>(i) / kGrid);
        lo = std::min(lo, f[i]);
        hi = std::max(hi, f[i]);
    }
    // First crossing scanning up from small s, i.e. on the rising branch.
    int hit = -1;
    for (int i = 1; i < kGrid; ++i) {
        if (f[i] >= target_f) {
            hit = i;
            break;
        }
    }
    if (hit < 0 || (hit == 1 && f[1] - target_f > 1e-4))
        throw CalibrationError("target fidelity " + std::to_string(target_f) +
                                   " unreachable; attainable range [" + std::to_string(lo) +
                                   ", " + std::to_string(hi) + "]",
                               lo, hi);

    auto finish = [&](double s, double achieved) {
        return FlipCalibration{s, s * rate, (1.0 - s) * rate, achieved};
    };
    const double s_hit = static_cast<double>(hit) / kGrid;
    if (f[hit] == target_f || hit == 1) return finish(s_hit, f[hit]);

    double s_lo = static_cast<double>(hit - 1) / kGrid;
    double s_hi = s_hit;
    double f_mid = f[hit];
    double s_mid = s_hi;
    for (int iter = 0; iter < 100 && s_hi - s_lo > 1e-13; ++iter) {
        s_mid = 0.5 * (s_lo + s_hi);
        f_mid = fidelity_at(s_mid);
        if (f_mid >= target_f) s_hi = s_mid;
        else s_lo = s_mid;
    }
    if (std::abs(f_mid - target_f) > 1e-4)
        throw CalibrationError("calibration did not reach the target within 1e-4", lo, hi);
    return finish(s_mid, f_mid);
}

double dark_count_penalty(const ReadoutParams& params, int threshold) {
    if (threshold < 1) throw InvalidInput("threshold must be >= 1");
    const CountDistribution clean = emitter_count_distribution(params, SpinState::dark);
    const CountDistribution noisy = add_dark_counts(clean, params.dark_count_mean());
    const double f_clean = clean.total() - clean.tail(threshold);
    const double f_noisy = noisy.total() - noisy.tail(threshold);
    return f_clean - f_noisy;
}

}  // namespace spinshot
