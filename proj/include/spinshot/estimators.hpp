#pragma once

#include "spinshot/readout.hpp"
#include "spinshot/records.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace spinshot {

enum class ModelKind { exp_decay, exp_relax, gaussian_sum, damped_sine, gaussian_echo, lorentzian };

// Functional forms used throughout the analysis. Parameter order:
//   exp_decay      A exp(-x / tau) + c                        [A, tau, c]
//   exp_relax      y_inf + (y0 - y_inf) exp(-x / tau)         [y0, tau, y_inf]
//   gaussian_sum   sum_i A_i exp(-4 ln2 (x - mu_i)^2 / w_i^2) + c
//                                                  [A_1, mu_1, fwhm_1, ..., c]
//   damped_sine    A exp(-x / tau) cos(2 pi f x + phi) + c    [A, tau, f, phi, c]
//   gaussian_echo  A exp(-(x / T2)^2) + c                     [A, T2, c]
//   lorentzian     A / (1 + (2 (x - x0) / fwhm)^2) + c        [A, x0, fwhm, c]
// Rates, widths and frequencies (tau, fwhm, f, T2) are kept positive.
struct FitModel {
    ModelKind kind = ModelKind::exp_decay;
    int components = 1;  // gaussian_sum only

    static FitModel exp_decay() { return {ModelKind::exp_decay, 1}; }
    static FitModel exp_relax() { return {ModelKind::exp_relax, 1}; }
    static FitModel gaussian_sum(int k) { return {ModelKind::gaussian_sum, k}; }
    static FitModel damped_sine() { return {ModelKind::damped_sine, 1}; }
    static FitModel gaussian_echo() { return {ModelKind::gaussian_echo, 1}; }
    static FitModel lorentzian() { return {ModelKind::lorentzian, 1}; }

    // Accepts "exp_decay", "gaussian_sum3", "gaussian_sum:3", ...
    static FitModel parse(std::string_view name);

    std::string name() const;
    std::size_t parameter_count() const;
    std::vector<std::string> parameter_names() const;
    std::vector<bool> positive_mask() const;
    double evaluate(double x, std::span<const double> params) const;
};

struct Series {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> sigma;  // empty: unweighted

    std::size_t size() const { return x.size(); }
};

// Reads "x,y[,sigma,...]" rows; columns past the third are ignored and a
// non-numeric first line is taken as a header.
Series read_series_csv(const std::string& path);
Series parse_series_csv(std::string_view text, const std::string& source = "<csv>");

struct FitOptions {
    // Explicit starting point; otherwise a heuristic guess is spread over a
    // fixed grid of multipliers.
    std::optional<std::vector<double>> initial;
    int max_iterations = 400;
};

struct StartDiagnostic {
    std::vector<double> initial;
    double initial_cost = 0.0;
    double final_cost = 0.0;
    int iterations = 0;
    bool converged = false;
    std::string message;
};

struct FitResult {
    FitModel model;
    std::vector<std::string> names;
    std::vector<double> values;
    std::vector<double> sigmas;  // 1 SD from the linearized covariance
    double residual_norm = 0.0;  // sqrt of the (weighted) residual sum of squares
    bool converged = false;
    bool degenerate = false;  // rank-deficient Jacobian at the optimum
    int iterations = 0;
    int start_index = 0;
    std::vector<StartDiagnostic> starts;

    double value(std::string_view name) const;
    double sigma(std::string_view name) const;
};

// Weighted cost 0.5 * sum(((y - f(x)) / sigma)^2).
double fit_cost(const FitModel& model, const Series& data, std::span<const double> params);

// Damped Gauss-Newton (Levenberg-Marquardt) with a central finite-difference
// Jacobian (relative step 1e-6, floor 1e-9), run from every start; returns the
// lowest-cost result. Throws FitError when no start converges.
FitResult fit_model(const FitModel& model, const Series& data, const FitOptions& options = {});

struct G2Result {
    double g2_zero = 0.0;
    double g2_zero_sigma = 0.0;
    int max_lag = 0;
    // Normalized pair rate per pulse lag 0..max_lag (lag 0 is g2(0)).
    std::vector<double> lag_g2;
    std::vector<double> lag_time_us;
    std::vector<double> lag_pairs;
};

// Pulsed autocorrelation: ordered same-pulse pairs n(n-1) per pulse slot,
// normalized by the mean of the cross-pulse pair rates n_i n_{i+l} per slot
// pair over lags 1..max_lag. Pairs are formed within a record only.
G2Result g2_pulsed(const std::vector<PhotonRecord>& records, double pulse_period_us,
                   int max_lag = 10);

struct EmpiricalFidelity {
    FidelityReport report;
    double f_bright_sigma = 0.0;
    double f_dark_sigma = 0.0;
    double f_min_sigma = 0.0;
    std::vector<double> hist_bright;  // normalized
    std::vector<double> hist_dark;
};

// Threshold scan over empirical histograms, maximizing min(F_bright, F_dark).
EmpiricalFidelity empirical_fidelity(std::span<const int> shots_bright,
                                     std::span<const int> shots_dark);

}  // namespace spinshot
