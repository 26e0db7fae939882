#include "spinshot/estimators.hpp"

#include "spinshot/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace spinshot {

G2Result g2_pulsed(const std::vector<PhotonRecord>& records, double pulse_period_us, int max_lag) {
    if (max_lag < 1) throw InvalidInput("g2 needs max_lag >= 1");
    std::size_t total_events = 0;
    for (const auto& r : records) total_events += r.events.size();
    if (total_events < 2) throw InvalidInput("g2 needs at least 2 detected events");

    // Ordered pair counts and available pulse-slot pairs per lag.
    std::vector<double> pairs(max_lag + 1, 0.0);
    std::vector<double> slots(max_lag + 1, 0.0);
    for (const auto& r : records) {
        std::map<int, double> per_pulse;
        int span = r.n_pulses;
        for (const auto& e : r.events) {
            per_pulse[e.pulse_index] += 1.0;
            span = std::max(span, e.pulse_index + 1);
        }
        for (int lag = 0; lag <= max_lag; ++lag) slots[lag] += std::max(0, span - lag);
        for (const auto& [idx, n] : per_pulse) {
            pairs[0] += n * (n - 1.0);
            for (int lag = 1; lag <= max_lag; ++lag) {
                auto it = per_pulse.find(idx + lag);
                if (it != per_pulse.end()) pairs[lag] += n * it->second;
            }
        }
    }

    double cross_pairs = 0.0;
    double norm = 0.0;
    int used_lags = 0;
    for (int lag = 1; lag <= max_lag; ++lag) {
        if (slots[lag] <= 0.0) continue;
        cross_pairs += pairs[lag];
        norm += pairs[lag] / slots[lag];
        ++used_lags;
    }
    if (cross_pairs == 0.0 || used_lags == 0)
        throw NumericalError("g2 normalization undefined: no cross-pulse coincidences at lags 1.." +
                             std::to_string(max_lag));
    norm /= used_lags;

    G2Result out;
    out.max_lag = max_lag;
    for (int lag = 0; lag <= max_lag; ++lag) {
        out.lag_pairs.push_back(pairs[lag]);
        out.lag_time_us.push_back(lag * pulse_period_us);
        out.lag_g2.push_back(slots[lag] > 0.0 ? pairs[lag] / slots[lag] / norm : 0.0);
    }
    out.g2_zero = out.lag_g2[0];
    // Counting statistics of the pair numbers; with no zero-lag pairs, quote
    // the one-pair resolution.
    if (pairs[0] > 0.0)
        out.g2_zero_sigma = out.g2_zero * std::sqrt(1.0 / pairs[0] + 1.0 / cross_pairs);
    else
        out.g2_zero_sigma = 1.0 / slots[0] / norm;
    return out;
}

EmpiricalFidelity empirical_fidelity(std::span<const int> shots_bright,
                                     std::span<const int> shots_dark) {
    if (shots_bright.empty() || shots_dark.empty())
        throw InvalidInput("empirical fidelity needs shots for both states");
    int max_count = 0;
    for (int c : shots_bright) max_count = std::max(max_count, c);
    for (int c : shots_dark) max_count = std::max(max_count, c);
    for (auto span : {shots_bright, shots_dark})
        for (int c : span)
            if (c < 0) throw InvalidInput("photon counts must be >= 0");

    std::vector<double> hb(max_count + 1, 0.0), hd(max_count + 1, 0.0);
    for (int c : shots_bright) hb[c] += 1.0;
    for (int c : shots_dark) hd[c] += 1.0;
    const double nb = static_cast<double>(shots_bright.size());
    const double nd = static_cast<double>(shots_dark.size());
    for (auto& v : hb) v /= nb;
    for (auto& v : hd) v /= nd;

    EmpiricalFidelity out;
    out.report.f_min = -1.0;
    double bright_below = 0.0, dark_below = 0.0;
    for (int t = 1; t <= max_count + 1; ++t) {
        bright_below += hb[t - 1];
        dark_below += hd[t - 1];
        const double fb = std::max(0.0, 1.0 - bright_below);
        const double fd = std::min(1.0, dark_below);
        const double fm = std::min(fb, fd);
        if (fm > out.report.f_min) {
            out.report.f_bright = fb;
            out.report.f_dark = fd;
            out.report.f_min = fm;
            out.report.threshold = t;
        }
    }
    out.report.n_pulses = 0;
    auto binomial = [](double f, double n) { return std::sqrt(f * (1.0 - f) / n); };
    out.f_bright_sigma = binomial(out.report.f_bright, nb);
    out.f_dark_sigma = binomial(out.report.f_dark, nd);
    out.f_min_sigma =
        out.report.f_bright <= out.report.f_dark ? out.f_bright_sigma : out.f_dark_sigma;
    out.hist_bright = std::move(hb);
    out.hist_dark = std::move(hd);
    return out;
}

}  // namespace spinshot
