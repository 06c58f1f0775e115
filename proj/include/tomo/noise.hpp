#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace tomo {

/// Gaussian Markov attenuation noise with covariance h*alpha*exp(-alpha|s - s'|).
struct ColoredNoise {
    double h = 0.0;
    double alpha = 1.0;

    double variance() const { return h * alpha; }
    /// Throws InvalidArgument unless h >= 0 and alpha > 0.
    void validate() const;
};

/// Samples of the noise along a ray at spacing `step`, starting at s = 0.
struct NoisePath {
    double step = 0.0;
    std::vector<double> samples;
};

/// Noise node values plus the exact integral of the continuous path over
/// each step.
struct NoiseIntegralPath {
    double step = 0.0;
    std::vector<double> samples;
    std::vector<double> segment_integrals;

    double total() const;
};

struct EffectiveCoefficients {
    double mu_star;
    double velocity;
    double dissipation;
};

struct ConsistencyReport {
    bool negative_integral = false;
    bool correlation_too_long = false;
    bool strong_noise = false;
    double min_integral = 0.0;
    double h_over_alpha = 0.0;

    bool ok() const { return !negative_integral && !correlation_too_long && !strong_noise; }
};

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

/// Seed for realization `index` of a run seeded with `seed`.
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(seed + 0x9E3779B97F4A7C15ULL * (index + 1));
}

double covariance(const ColoredNoise& noise, double s, double s_prime);

/// Exact stationary Ornstein-Uhlenbeck recursion on interval_count(length,
/// step) equal steps (so the realized step never exceeds `step`).
NoisePath sample_path(const ColoredNoise& noise, double length, double step, std::uint64_t seed);

/// Same recursion driven by a caller-owned generator, writing n nodes.
void fill_path(const ColoredNoise& noise, double step, std::size_t n, Rng& rng,
               std::vector<double>& out);

/// Joint exact sampling of the nodes and of the per-step integrals. Exact for
/// any alpha * step, unlike a trapezoid rule on the nodes.
NoiseIntegralPath sample_path_integral(const ColoredNoise& noise, double length, double step,
                                       std::uint64_t seed);

/// <exp(-int_a^b noise ds)> = exp{h D + (h/alpha)(exp(-alpha D) - 1)}, D = b - a.
double gaussian_characteristic_functional(const ColoredNoise& noise, double a, double b);

/// Exponent of the factor exp{(h/alpha)(exp(-alpha D) - 1)}, which lies in (-h/alpha, 0].
double g_exponent(const ColoredNoise& noise, double delta);

/// gaussian_characteristic_functional(noise, 0, delta) * exp(-mubar_integral).
double mean_attenuation_factor(const ColoredNoise& noise, double mubar_integral, double delta);

EffectiveCoefficients effective_coefficients(const ColoredNoise& noise, double mubar);

ConsistencyReport validate_self_consistency(const ColoredNoise& noise,
                                            const std::vector<double>& mustar_integrals,
                                            double resolution, double strong_threshold = 0.1);

std::string describe(const ConsistencyReport& report);

}  // namespace tomo
