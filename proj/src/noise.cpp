#include "tomo/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "tomo/error.hpp"
#include "tomo/geometry.hpp"

namespace tomo {

void ColoredNoise::validate() const {
    if (!(h >= 0.0) || !std::isfinite(h)) throw InvalidArgument("noise h must be >= 0");
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidArgument("noise alpha must be > 0");
}

double NoiseIntegralPath::total() const {
    return std::accumulate(segment_integrals.begin(), segment_integrals.end(), 0.0);
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

double covariance(const ColoredNoise& noise, double s, double s_prime) {
    return noise.variance() * std::exp(-noise.alpha * std::abs(s - s_prime));
}

void fill_path(const ColoredNoise& noise, double step, std::size_t n, Rng& rng,
               std::vector<double>& out) {
    out.assign(n, 0.0);
    if (n == 0 || noise.h == 0.0) return;
    std::normal_distribution<double> normal;
    const double sigma = std::sqrt(noise.variance());
    const double rho = std::exp(-noise.alpha * step);
    const double innovation = sigma * std::sqrt(-std::expm1(-2.0 * noise.alpha * step));
    out[0] = sigma * normal(rng);
    for (std::size_t k = 1; k < n; ++k) out[k] = rho * out[k - 1] + innovation * normal(rng);
}

NoisePath sample_path(const ColoredNoise& noise, double length, double step, std::uint64_t seed) {
    noise.validate();
    if (!(length > 0.0)) throw InvalidArgument("path length must be positive");
    const std::size_t intervals = interval_count(length, step);
    NoisePath path;
    path.step = length / static_cast<double>(intervals);
    Rng rng(seed);
    fill_path(noise, path.step, intervals + 1, rng, path.samples);
    return path;
}

NoiseIntegralPath sample_path_integral(const ColoredNoise& noise, double length, double step,
                                       std::uint64_t seed) {
    noise.validate();
    if (!(length > 0.0)) throw InvalidArgument("path length must be positive");
    const std::size_t intervals = interval_count(length, step);
    NoiseIntegralPath path;
    path.step = length / static_cast<double>(intervals);
    path.samples.assign(intervals + 1, 0.0);
    path.segment_integrals.assign(intervals, 0.0);
    if (noise.h == 0.0) return path;

    const double a = noise.alpha;
    const double d = path.step;
    const double var = noise.variance();
    const double one_minus_rho = -std::expm1(-a * d);
    const double rho = 1.0 - one_minus_rho;
    // Conditional moments of (X_{k+1}, Y_k) given X_k, with Y_k the integral
    // of the path over the step.
    const double var_x = var * -std::expm1(-2.0 * a * d);
    const double cov_xy = var * one_minus_rho * one_minus_rho / a;
    const double var_y =
        var * (2.0 * (a * d + std::expm1(-a * d)) / (a * a) - (one_minus_rho / a) * (one_minus_rho / a));
    const double sx = std::sqrt(var_x);
    const double load = cov_xy / sx;
    const double sy = std::sqrt(std::max(0.0, var_y - load * load));

    Rng rng(seed);
    std::normal_distribution<double> normal;
    path.samples[0] = std::sqrt(var) * normal(rng);
    for (std::size_t k = 0; k < intervals; ++k) {
        const double x = path.samples[k];
        const double z1 = normal(rng);
        const double z2 = normal(rng);
        path.samples[k + 1] = rho * x + sx * z1;
        path.segment_integrals[k] = x * one_minus_rho / a + load * z1 + sy * z2;
    }
    return path;
}

double g_exponent(const ColoredNoise& noise, double delta) {
    return (noise.h / noise.alpha) * std::expm1(-noise.alpha * delta);
}

double gaussian_characteristic_functional(const ColoredNoise& noise, double a, double b) {
    const double delta = b - a;
    return std::exp(noise.h * delta + g_exponent(noise, delta));
}

double mean_attenuation_factor(const ColoredNoise& noise, double mubar_integral, double delta) {
    if (delta < 0.0) throw InvalidArgument("segment length must be >= 0");
    return std::exp(noise.h * delta + g_exponent(noise, delta) - mubar_integral);
}

EffectiveCoefficients effective_coefficients(const ColoredNoise& noise, double mubar) {
    return {mubar - noise.h, 1.0 - noise.h / noise.alpha, noise.h / (noise.alpha * noise.alpha)};
}

ConsistencyReport validate_self_consistency(const ColoredNoise& noise,
                                            const std::vector<double>& mustar_integrals,
                                            double resolution, double strong_threshold) {
    if (!(resolution > 0.0)) throw InvalidArgument("resolution must be positive");
    ConsistencyReport r;
    r.min_integral = mustar_integrals.empty()
                         ? 0.0
                         : *std::min_element(mustar_integrals.begin(), mustar_integrals.end());
    r.negative_integral = r.min_integral < 0.0;
    r.correlation_too_long = 1.0 / noise.alpha >= resolution;
    r.h_over_alpha = noise.h / noise.alpha;
    r.strong_noise = r.h_over_alpha >= strong_threshold;
    return r;
}

std::string describe(const ConsistencyReport& report) {
    std::ostringstream os;
    if (report.ok()) return "self-consistent";
    if (report.negative_integral) os << "negative mu* integral (min " << report.min_integral << "); ";
    if (report.correlation_too_long) os << "correlation radius not below resolution; ";
    if (report.strong_noise) os << "h/alpha = " << report.h_over_alpha << " is not small; ";
    return os.str();
}

}  // namespace tomo
