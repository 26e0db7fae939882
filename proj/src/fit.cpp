#include "spinshot/estimators.hpp"

#include "spinshot/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

namespace spinshot {

namespace {

constexpr double kFourLn2 = 4.0 * std::numbers::ln2;

// Central finite-difference step: relative 1e-6 with absolute floor 1e-9.
double fd_step(double v) { return std::max(1e-6 * std::abs(v), 1e-9); }

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

bool parse_double(std::string_view s, double& out) {
    const std::string t = trim(s);
    if (t.empty()) return false;
    const char* first = t.data();
    const char* last = t.data() + t.size();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

double tail_mean(const std::vector<double>& y, const std::vector<std::size_t>& order,
                 double fraction) {
    const std::size_t n = order.size();
    const std::size_t m = std::max<std::size_t>(1, static_cast<std::size_t>(fraction * n));
    double s = 0.0;
    for (std::size_t i = n - m; i < n; ++i) s += y[order[i]];
    return s / static_cast<double>(m);
}

double quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const double pos = q * (v.size() - 1);
    const auto i = static_cast<std::size_t>(pos);
    const double f = pos - i;
    return i + 1 < v.size() ? v[i] * (1 - f) + v[i + 1] * f : v[i];
}

std::vector<std::size_t> sorted_order(const std::vector<double>& x) {
    std::vector<std::size_t> order(x.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    return order;
}

// x at which |y - base| first drops below |amp| / e, as a decay-time guess.
double e_folding_guess(const Series& d, const std::vector<std::size_t>& order, double base,
                       double amp) {
    const double x0 = d.x[order.front()];
    const double span = d.x[order.back()] - x0;
    for (std::size_t i : order)
        if (std::abs(d.y[i] - base) <= std::abs(amp) / std::numbers::e)
            return std::max(d.x[i] - x0, span / 50.0);
    return span / 3.0 > 0 ? span / 3.0 : 1.0;
}

// Width of the contiguous region around `peak` where |y - base| >= |amp| / 2.
double half_max_width(const Series& d, const std::vector<std::size_t>& order, std::size_t pos,
                      double base, double amp) {
    std::size_t lo = pos, hi = pos;
    const double half = std::abs(amp) / 2.0;
    while (lo > 0 && std::abs(d.y[order[lo - 1]] - base) >= half) --lo;
    while (hi + 1 < order.size() && std::abs(d.y[order[hi + 1]] - base) >= half) ++hi;
    double w = d.x[order[hi]] - d.x[order[lo]];
    const double span = d.x[order.back()] - d.x[order.front()];
    const double dx = span / std::max<std::size_t>(1, order.size() - 1);
    return std::max(w, 2.0 * dx);
}

std::vector<double> heuristic_guess(const FitModel& model, const Series& d) {
    const auto order = sorted_order(d.x);
    const std::size_t n = order.size();
    const double y_first = d.y[order.front()];
    const double span = d.x[order.back()] - d.x[order.front()];
    switch (model.kind) {
        case ModelKind::exp_decay:
        case ModelKind::exp_relax:
        case ModelKind::gaussian_echo: {
            const double c = tail_mean(d.y, order, 0.1);
            double amp = y_first - c;
            if (amp == 0.0) amp = 1e-3 * (std::abs(c) + 1.0);
            const double tau = e_folding_guess(d, order, c, amp);
            if (model.kind == ModelKind::exp_relax) return {y_first, tau, c};
            return {amp, tau, c};
        }
        case ModelKind::lorentzian: {
            const double med = quantile(d.y, 0.5);
            const double hi = *std::max_element(d.y.begin(), d.y.end());
            const double lo = *std::min_element(d.y.begin(), d.y.end());
            const bool dip = (med - lo) > (hi - med);
            const double c = quantile(d.y, dip ? 0.9 : 0.1);
            std::size_t best = 0;
            for (std::size_t i = 0; i < n; ++i)
                if (std::abs(d.y[order[i]] - c) > std::abs(d.y[order[best]] - c)) best = i;
            const double amp = d.y[order[best]] - c;
            return {amp, d.x[order[best]], half_max_width(d, order, best, c, amp), c};
        }
        case ModelKind::gaussian_sum: {
            const double c = quantile(d.y, 0.1);
            std::vector<double> resid(n);
            for (std::size_t i = 0; i < n; ++i) resid[i] = d.y[order[i]] - c;
            std::vector<double> guess;
            std::vector<bool> used(n, false);
            for (int k = 0; k < model.components; ++k) {
                std::size_t best = n;
                for (std::size_t i = 0; i < n; ++i)
                    if (!used[i] && (best == n || resid[i] > resid[best])) best = i;
                if (best == n) best = 0;
                const double amp = resid[best];
                const double w = half_max_width(d, order, best, c, amp);
                guess.insert(guess.end(), {amp, d.x[order[best]], w});
                // Exclude the claimed peak before looking for the next one.
                for (std::size_t i = 0; i < n; ++i)
                    if (std::abs(d.x[order[i]] - d.x[order[best]]) < 0.75 * w) used[i] = true;
            }
            guess.push_back(c);
            return guess;
        }
        case ModelKind::damped_sine: {
            double c = 0.0;
            for (double v : d.y) c += v;
            c /= static_cast<double>(n);
            double min_dx = std::numeric_limits<double>::infinity();
            for (std::size_t i = 1; i < n; ++i)
                min_dx = std::min(min_dx, d.x[order[i]] - d.x[order[i - 1]]);
            if (!(min_dx > 0.0)) min_dx = span / std::max<std::size_t>(1, n - 1);
            const double f_lo = 0.5 / span;
            const double f_hi = 0.5 / min_dx;
            constexpr int kFreqs = 4000;
            double best_f = f_lo, best_p = -1.0, best_a = 0.0, best_b = 0.0;
            for (int j = 0; j < kFreqs; ++j) {
                const double f = f_lo + (f_hi - f_lo) * j / (kFreqs - 1);
                double cc = 0, ss = 0, cs = 0, yc = 0, ys = 0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double ph = 2.0 * std::numbers::pi * f * d.x[i];
                    const double co = std::cos(ph), si = std::sin(ph);
                    const double yy = d.y[i] - c;
                    cc += co * co; ss += si * si; cs += co * si; yc += yy * co; ys += yy * si;
                }
                const double det = cc * ss - cs * cs;
                if (std::abs(det) < 1e-12) continue;
                const double alpha = (yc * ss - ys * cs) / det;
                const double beta = (ys * cc - yc * cs) / det;
                const double power = alpha * yc + beta * ys;
                if (power > best_p) { best_p = power; best_f = f; best_a = alpha; best_b = beta; }
            }
            const double amp = std::hypot(best_a, best_b);
            const double phi = std::atan2(-best_b, best_a);
            return {amp > 0 ? amp : 1e-3, span, best_f, phi, c};
        }
    }
    return {};
}

// Model restated over internal coordinates (log for positive parameters).
class Problem {
public:
    Problem(const FitModel& model, const Series& data)
        : model_(model), data_(data), positive_(model.positive_mask()) {}

    std::size_t n_params() const { return positive_.size(); }
    std::size_t n_points() const { return data_.size(); }

    std::vector<double> to_natural(const Eigen::VectorXd& u) const {
        std::vector<double> v(u.size());
        for (Eigen::Index j = 0; j < u.size(); ++j) v[j] = positive_[j] ? std::exp(u[j]) : u[j];
        return v;
    }

    Eigen::VectorXd to_internal(const std::vector<double>& v) const {
        Eigen::VectorXd u(v.size());
        for (std::size_t j = 0; j < v.size(); ++j)
            u[j] = positive_[j] ? std::log(std::max(std::abs(v[j]), 1e-300)) : v[j];
        return u;
    }

    // Weighted residuals (f - y) / sigma at natural parameters.
    Eigen::VectorXd residuals(const std::vector<double>& v) const {
        Eigen::VectorXd r(n_points());
        for (std::size_t i = 0; i < n_points(); ++i) {
            const double w = data_.sigma.empty() ? 1.0 : data_.sigma[i];
            r[i] = (model_.evaluate(data_.x[i], v) - data_.y[i]) / w;
        }
        return r;
    }

    Eigen::VectorXd residuals_internal(const Eigen::VectorXd& u) const {
        return residuals(to_natural(u));
    }

    template <class F>
    Eigen::MatrixXd jacobian(const Eigen::VectorXd& at, F&& resid) const {
        Eigen::MatrixXd j(n_points(), at.size());
        for (Eigen::Index k = 0; k < at.size(); ++k) {
            const double h = fd_step(at[k]);
            Eigen::VectorXd up = at, dn = at;
            up[k] += h;
            dn[k] -= h;
            j.col(k) = (resid(up) - resid(dn)) / (2.0 * h);
        }
        return j;
    }

    Eigen::MatrixXd jacobian_internal(const Eigen::VectorXd& u) const {
        return jacobian(u, [&](const Eigen::VectorXd& x) { return residuals_internal(x); });
    }

    Eigen::MatrixXd jacobian_natural(const std::vector<double>& v) const {
        Eigen::VectorXd at = Eigen::Map<const Eigen::VectorXd>(v.data(), v.size());
        return jacobian(at, [&](const Eigen::VectorXd& x) {
            return residuals(std::vector<double>(x.data(), x.data() + x.size()));
        });
    }

private:
    const FitModel& model_;
    const Series& data_;
    std::vector<bool> positive_;
};

struct LmOutcome {
    Eigen::VectorXd u;
    double cost = 0.0;
    int iterations = 0;
    bool converged = false;
    std::string message;
};

LmOutcome levenberg_marquardt(const Problem& prob, Eigen::VectorXd u, int max_iterations) {
    LmOutcome out;
    Eigen::VectorXd r = prob.residuals_internal(u);
    double cost = 0.5 * r.squaredNorm();
    if (!std::isfinite(cost)) {
        out.u = u;
        out.cost = cost;
        out.message = "non-finite cost at start";
        return out;
    }
    double lambda = 1e-3;
    int it = 0;
    for (; it < max_iterations; ++it) {
        const Eigen::MatrixXd j = prob.jacobian_internal(u);
        const Eigen::MatrixXd a = j.transpose() * j;
        const Eigen::VectorXd g = j.transpose() * r;
        if (g.lpNorm<Eigen::Infinity>() <= 1e-14 * (1.0 + cost)) {
            out.converged = true;
            out.message = "gradient below tolerance";
            break;
        }
        bool accepted = false;
        Eigen::VectorXd u_new;
        double cost_new = cost;
        for (int tries = 0; tries < 40; ++tries) {
            Eigen::MatrixXd damped = a;
            for (Eigen::Index k = 0; k < damped.rows(); ++k)
                damped(k, k) += lambda * std::max(a(k, k), 1e-12);
            const Eigen::VectorXd step = damped.ldlt().solve(-g);
            if (!step.allFinite()) {
                lambda *= 10.0;
                continue;
            }
            u_new = u + step;
            const Eigen::VectorXd r_new = prob.residuals_internal(u_new);
            cost_new = 0.5 * r_new.squaredNorm();
            if (std::isfinite(cost_new) && cost_new < cost) {
                accepted = true;
                const double rel_drop = (cost - cost_new) / std::max(cost, 1e-300);
                const double rel_step =
                    step.lpNorm<Eigen::Infinity>() / (u.lpNorm<Eigen::Infinity>() + 1e-12);
                u = u_new;
                r = r_new;
                cost = cost_new;
                lambda = std::max(lambda * 0.3, 1e-12);
                if (rel_drop < 1e-15 || rel_step < 1e-13 || cost == 0.0) {
                    out.converged = true;
                    out.message = "step below tolerance";
                }
                break;
            }
            lambda *= 4.0;
            if (lambda > 1e16) break;
        }
        if (out.converged) {
            ++it;
            break;
        }
        if (!accepted) {
            // No descent direction left at machine precision: a local minimum.
            out.converged = true;
            out.message = "no further descent";
            break;
        }
    }
    if (!out.converged) out.message = "iteration limit reached";
    out.u = u;
    out.cost = cost;
    out.iterations = it;
    return out;
}

// Canonical form: positive sine amplitude with phase in (-pi, pi], gaussian
// components ordered by center.
void canonicalize(const FitModel& model, std::vector<double>& v) {
    if (model.kind == ModelKind::damped_sine) {
        if (v[0] < 0) {
            v[0] = -v[0];
            v[3] += std::numbers::pi;
        }
        v[3] = std::remainder(v[3], 2.0 * std::numbers::pi);
        if (v[3] <= -std::numbers::pi) v[3] += 2.0 * std::numbers::pi;
    } else if (model.kind == ModelKind::gaussian_sum) {
        std::vector<std::array<double, 3>> comps;
        for (int k = 0; k < model.components; ++k)
            comps.push_back({v[3 * k], v[3 * k + 1], v[3 * k + 2]});
        std::stable_sort(comps.begin(), comps.end(),
                         [](const auto& a, const auto& b) { return a[1] < b[1]; });
        for (int k = 0; k < model.components; ++k)
            for (int m = 0; m < 3; ++m) v[3 * k + m] = comps[k][m];
    }
}

}  // namespace

FitModel FitModel::parse(std::string_view name) {
    if (name == "exp_decay") return exp_decay();
    if (name == "exp_relax") return exp_relax();
    if (name == "damped_sine") return damped_sine();
    if (name == "gaussian_echo") return gaussian_echo();
    if (name == "lorentzian") return lorentzian();
    constexpr std::string_view prefix = "gaussian_sum";
    if (name.substr(0, prefix.size()) == prefix) {
        std::string_view rest = name.substr(prefix.size());
        if (!rest.empty() && (rest.front() == ':' || rest.front() == '(')) rest.remove_prefix(1);
        if (!rest.empty() && rest.back() == ')') rest.remove_suffix(1);
        int k = 1;
        if (!rest.empty()) {
            auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), k);
            if (ec != std::errc() || ptr != rest.data() + rest.size() || k < 1)
                throw InvalidInput("bad gaussian_sum component count in '" + std::string(name) + "'");
        }
        return gaussian_sum(k);
    }
    throw InvalidInput("unknown fit model '" + std::string(name) + "'");
}

std::string FitModel::name() const {
    switch (kind) {
        case ModelKind::exp_decay: return "exp_decay";
        case ModelKind::exp_relax: return "exp_relax";
        case ModelKind::gaussian_sum: return "gaussian_sum" + std::to_string(components);
        case ModelKind::damped_sine: return "damped_sine";
        case ModelKind::gaussian_echo: return "gaussian_echo";
        case ModelKind::lorentzian: return "lorentzian";
    }
    return "?";
}

std::size_t FitModel::parameter_count() const { return parameter_names().size(); }

std::vector<std::string> FitModel::parameter_names() const {
    switch (kind) {
        case ModelKind::exp_decay: return {"amplitude", "tau", "offset"};
        case ModelKind::exp_relax: return {"initial", "tau", "final"};
        case ModelKind::damped_sine: return {"amplitude", "tau", "frequency", "phase", "offset"};
        case ModelKind::gaussian_echo: return {"amplitude", "t2", "offset"};
        case ModelKind::lorentzian: return {"amplitude", "center", "fwhm", "offset"};
        case ModelKind::gaussian_sum: {
            if (components < 1) throw InvalidInput("gaussian_sum needs >= 1 component");
            std::vector<std::string> names;
            for (int k = 1; k <= components; ++k) {
                const std::string s = std::to_string(k);
                names.insert(names.end(), {"amplitude" + s, "center" + s, "fwhm" + s});
            }
            names.push_back("offset");
            return names;
        }
    }
    return {};
}

std::vector<bool> FitModel::positive_mask() const {
    switch (kind) {
        case ModelKind::exp_decay:
        case ModelKind::exp_relax:
        case ModelKind::gaussian_echo: return {false, true, false};
        case ModelKind::damped_sine: return {false, true, true, false, false};
        case ModelKind::lorentzian: return {false, false, true, false};
        case ModelKind::gaussian_sum: {
            std::vector<bool> m;
            for (int k = 0; k < components; ++k) m.insert(m.end(), {false, false, true});
            m.push_back(false);
            return m;
        }
    }
    return {};
}

double FitModel::evaluate(double x, std::span<const double> p) const {
    switch (kind) {
        case ModelKind::exp_decay: return p[0] * std::exp(-x / p[1]) + p[2];
        case ModelKind::exp_relax: return p[2] + (p[0] - p[2]) * std::exp(-x / p[1]);
        case ModelKind::gaussian_echo: {
            const double u = x / p[1];
            return p[0] * std::exp(-u * u) + p[2];
        }
        case ModelKind::damped_sine:
            return p[0] * std::exp(-x / p[1]) * std::cos(2.0 * std::numbers::pi * p[2] * x + p[3]) +
                   p[4];
        case ModelKind::lorentzian: {
            const double u = 2.0 * (x - p[1]) / p[2];
            return p[0] / (1.0 + u * u) + p[3];
        }
        case ModelKind::gaussian_sum: {
            double s = p[3 * components];
            for (int k = 0; k < components; ++k) {
                const double u = (x - p[3 * k + 1]) / p[3 * k + 2];
                s += p[3 * k] * std::exp(-kFourLn2 * u * u);
            }
            return s;
        }
    }
    return 0.0;
}

double FitResult::value(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return values[i];
    throw InvalidInput("fit result has no parameter '" + std::string(name) + "'");
}

double FitResult::sigma(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return sigmas[i];
    throw InvalidInput("fit result has no parameter '" + std::string(name) + "'");
}

double fit_cost(const FitModel& model, const Series& data, std::span<const double> params) {
    double s = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double w = data.sigma.empty() ? 1.0 : data.sigma[i];
        const double r = (model.evaluate(data.x[i], params) - data.y[i]) / w;
        s += r * r;
    }
    return 0.5 * s;
}

FitResult fit_model(const FitModel& model, const Series& data, const FitOptions& options) {
    const std::size_t p = model.parameter_count();
    if (data.x.size() != data.y.size() || (!data.sigma.empty() && data.sigma.size() != data.x.size()))
        throw InvalidInput("series columns have different lengths");
    if (data.size() < p + 1)
        throw InvalidInput("fit of " + model.name() + " needs at least " + std::to_string(p + 1) +
                           " points, got " + std::to_string(data.size()));
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (!std::isfinite(data.x[i]) || !std::isfinite(data.y[i]))
            throw InvalidInput("series contains non-finite values");
        if (!data.sigma.empty() && !(data.sigma[i] > 0.0))
            throw InvalidInput("series sigma must be > 0");
    }

    std::vector<std::vector<double>> starts;
    const std::vector<bool> positive = model.positive_mask();
    if (options.initial) {
        if (options.initial->size() != p)
            throw InvalidInput("initial guess has " + std::to_string(options.initial->size()) +
                               " entries, model needs " + std::to_string(p));
        starts.push_back(*options.initial);
    } else {
        const std::vector<double> base = heuristic_guess(model, data);
        for (double m : {1.0, 0.5, 2.0, 0.25, 4.0}) {
            std::vector<double> s = base;
            for (std::size_t j = 0; j < p; ++j)
                if (positive[j]) s[j] *= m;
            starts.push_back(std::move(s));
        }
    }

    const Problem prob(model, data);
    FitResult result;
    result.model = model;
    result.names = model.parameter_names();
    int best = -1;
    double best_cost = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_u;
    for (std::size_t s = 0; s < starts.size(); ++s) {
        StartDiagnostic diag;
        diag.initial = starts[s];
        diag.initial_cost = fit_cost(model, data, starts[s]);
        const LmOutcome lm = levenberg_marquardt(prob, prob.to_internal(starts[s]),
                                                 options.max_iterations);
        diag.final_cost = lm.cost;
        diag.iterations = lm.iterations;
        diag.converged = lm.converged;
        diag.message = lm.message;
        result.starts.push_back(diag);
        if (std::isfinite(lm.cost) && lm.cost < best_cost) {
            best_cost = lm.cost;
            best = static_cast<int>(s);
            best_u = lm.u;
        }
    }
    const bool any_converged = std::any_of(result.starts.begin(), result.starts.end(),
                                           [](const StartDiagnostic& d) { return d.converged; });
    if (best < 0 || !any_converged) {
        std::ostringstream msg;
        msg << "fit of " << model.name() << " did not converge from any start:";
        for (std::size_t s = 0; s < result.starts.size(); ++s)
            msg << " [start " << s << ": cost " << result.starts[s].initial_cost << " -> "
                << result.starts[s].final_cost << ", " << result.starts[s].message << "]";
        throw FitError(msg.str());
    }

    result.start_index = best;
    result.converged = result.starts[best].converged;
    result.iterations = result.starts[best].iterations;
    result.values = prob.to_natural(best_u);
    canonicalize(model, result.values);
    result.residual_norm = std::sqrt(2.0 * fit_cost(model, data, result.values));

    // Covariance in natural coordinates from the linearized problem.
    const Eigen::MatrixXd j = prob.jacobian_natural(result.values);
    Eigen::VectorXd scale = j.colwise().norm();
    for (Eigen::Index k = 0; k < scale.size(); ++k)
        if (!(scale[k] > 0.0)) scale[k] = 1.0;
    const Eigen::MatrixXd js = j * scale.cwiseInverse().asDiagonal();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(js);
    const auto& sv = svd.singularValues();
    const bool rank_deficient = sv.size() == 0 || !(sv[sv.size() - 1] > 1e-10 * sv[0]);
    result.degenerate = rank_deficient;
    result.sigmas.assign(p, std::numeric_limits<double>::infinity());
    if (!rank_deficient) {
        const Eigen::MatrixXd inv = (js.transpose() * js).inverse();
        const double dof = static_cast<double>(data.size() - p);
        const double s2 = data.sigma.empty() ? 2.0 * best_cost / dof : 1.0;
        for (std::size_t k = 0; k < p; ++k)
            result.sigmas[k] = std::sqrt(std::max(0.0, s2 * inv(k, k))) / scale[k];
    }
    return result;
}

Series parse_series_csv(std::string_view text, const std::string& source) {
    Series s;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    bool seen_data = false;
    int columns = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ss(t);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        std::vector<double> vals;
        bool numeric = true;
        for (const auto& c : cells) {
            double v;
            if (!parse_double(c, v)) {
                numeric = false;
                break;
            }
            vals.push_back(v);
        }
        if (!numeric) {
            if (!seen_data && s.x.empty() && columns == 0) {
                columns = -1;  // header consumed
                continue;
            }
            throw ParseError(source, lineno, 0, "non-numeric value in row '" + t + "'");
        }
        if (vals.size() < 2)
            throw ParseError(source, lineno, 0, "expected x,y[,sigma], got " +
                                                    std::to_string(vals.size()) + " columns");
        if (seen_data && static_cast<int>(vals.size()) != columns)
            throw ParseError(source, lineno, 0, "inconsistent column count");
        columns = static_cast<int>(vals.size());
        seen_data = true;
        s.x.push_back(vals[0]);
        s.y.push_back(vals[1]);
        if (vals.size() >= 3) s.sigma.push_back(vals[2]);
    }
    return s;
}

Series read_series_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_series_csv(buf.str(), path);
}

}  // namespace spinshot
