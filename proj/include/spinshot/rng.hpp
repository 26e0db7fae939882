#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace spinshot {

// SplitMix64 output function.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Derives an independent seed for a named sub-experiment (e.g. bright vs dark
// initialization within one run).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
    return mix64(seed ^ mix64(tag + 0x632BE59BD9B4E019ULL));
}

// Counter-based stream: draw i of stream (seed, index) is a pure function of
// (seed, index, i), so shots can be simulated in any order or on any worker.
class RandomStream {
public:
    using result_type = std::uint64_t;

    RandomStream(std::uint64_t seed, std::uint64_t stream_index)
        : key_(mix64(seed + 0x9E3779B97F4A7C15ULL) ^
               mix64((stream_index << 1) ^ 0xD1B54A32D192ED03ULL)) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return mix64(key_ + (++counter_) * 0x9E3779B97F4A7C15ULL); }

    std::uint64_t draws() const { return counter_; }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    double exponential(double mean) { return -mean * std::log1p(-uniform()); }

    // Exponential with the given mean conditioned on [0, limit).
    double truncated_exponential(double mean, double limit) {
        if (!(limit > 0.0)) return 0.0;
        const double mass = -std::expm1(-limit / mean);
        return -mean * std::log1p(-uniform() * mass);
    }

    double normal() {
        // Box-Muller; the second variate is discarded to keep draws stateless.
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    // Inversion sampling; intended for the small means of dark counts.
    int poisson(double mean) {
        if (!(mean > 0.0)) return 0;
        if (mean > 30.0) {
            const double x = std::round(mean + std::sqrt(mean) * normal());
            return x < 0.0 ? 0 : static_cast<int>(x);
        }
        double u = uniform();
        double term = std::exp(-mean);
        int k = 0;
        while (u >= term && k < 1000) {
            u -= term;
            ++k;
            term *= mean / k;
        }
        return k;
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace spinshot
