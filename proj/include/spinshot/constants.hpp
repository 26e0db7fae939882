#pragma once

#include <cmath>
#include <numbers>

// CODATA 2018 values. h is exact in the 2019 SI.
namespace spinshot::constants {

inline constexpr double planck = 6.62607015e-34;         // J s
inline constexpr double bohr_magneton = 9.2740100783e-24;  // J / T

// mu_B / h expressed in GHz per tesla (~13.996 GHz/T).
inline constexpr double bohr_ghz_per_tesla = bohr_magneton / planck * 1e-9;

// FWHM = 2 sqrt(2 ln 2) sigma for a Gaussian line.
inline const double gaussian_fwhm_per_sigma = 2.0 * std::sqrt(2.0 * std::numbers::ln2);

inline double gaussian_sigma_from_fwhm(double fwhm) { return fwhm / gaussian_fwhm_per_sigma; }
inline double gaussian_fwhm_from_sigma(double sigma) { return sigma * gaussian_fwhm_per_sigma; }

// FWHM = 2 gamma for a Lorentzian with half width gamma.
inline double lorentzian_hwhm_from_fwhm(double fwhm) { return 0.5 * fwhm; }

}  // namespace spinshot::constants
