#include <doctest.h>

#include <cmath>
#include <numeric>

#include "tomo/error.hpp"
#include "tomo/geometry.hpp"
#include "tomo/noise.hpp"

using namespace tomo;

TEST_CASE("covariance") {
    CHECK(covariance({0.1, 10.0}, 0.3, 0.3) == doctest::Approx(1.0));
    CHECK(covariance({0.0, 3.0}, 0.0, 2.0) == 0.0);
    CHECK(covariance({0.1, 1.0}, 0.0, 1.0) == doctest::Approx(0.1 * std::exp(-1.0)));
    CHECK(covariance({0.1, 1.0}, 1.0, 0.0) == covariance({0.1, 1.0}, 0.0, 1.0));
}

TEST_CASE("noise parameters are validated") {
    CHECK_THROWS_AS(ColoredNoise({-0.1, 1.0}).validate(), InvalidArgument);
    CHECK_THROWS_AS(ColoredNoise({0.1, 0.0}).validate(), InvalidArgument);
    CHECK_THROWS_AS(sample_path({0.1, 1.0}, 1.0, 0.0, 1), InvalidArgument);
}

TEST_CASE("zero amplitude gives a zero path") {
    const NoisePath p = sample_path({0.0, 2.0}, 3.0, 0.1, 99);
    CHECK(p.samples.size() == 31);
    for (double v : p.samples) CHECK(v == 0.0);
}

TEST_CASE("paths are reproducible from the seed") {
    const NoisePath a = sample_path({0.2, 1.0}, 2.0, 0.01, 42);
    const NoisePath b = sample_path({0.2, 1.0}, 2.0, 0.01, 42);
    const NoisePath c = sample_path({0.2, 1.0}, 2.0, 0.01, 43);
    CHECK(a.samples == b.samples);
    CHECK(a.samples != c.samples);
}

TEST_CASE("lag-one sample covariance matches h alpha exp(-alpha step)") {
    const ColoredNoise noise{0.1, 1.0};
    const double step = 0.1;
    const NoisePath p = sample_path(noise, 1e5, step, 7);
    REQUIRE(p.samples.size() == 1000001);
    // Batch means for the standard error of a correlated series.
    const std::size_t batches = 200;
    const std::size_t per = (p.samples.size() - 1) / batches;
    std::vector<double> est(batches, 0.0);
    for (std::size_t b = 0; b < batches; ++b) {
        double s = 0.0;
        for (std::size_t k = b * per; k < (b + 1) * per; ++k) s += p.samples[k] * p.samples[k + 1];
        est[b] = s / static_cast<double>(per);
    }
    const double mean = std::accumulate(est.begin(), est.end(), 0.0) / batches;
    double var = 0.0;
    for (double e : est) var += (e - mean) * (e - mean);
    const double se = std::sqrt(var / (batches - 1) / batches);
    const double expected = 0.1 * std::exp(-0.1);
    CHECK(std::abs(mean - expected) <= 3.0 * se);
}

TEST_CASE("characteristic functional closed form") {
    CHECK(gaussian_characteristic_functional({0.0, 1.0}, 0.0, 5.0) == 1.0);
    CHECK(gaussian_characteristic_functional({0.3, 2.0}, 1.0, 1.0) == 1.0);
    CHECK(gaussian_characteristic_functional({0.2, 1.0}, 0.0, 2.0) ==
          doctest::Approx(std::exp(0.4 + 0.2 * (std::exp(-2.0) - 1.0))).epsilon(1e-14));
    CHECK(gaussian_characteristic_functional({0.2, 1.0}, 0.0, 2.0) == doctest::Approx(1.2549).epsilon(1e-4));
}

TEST_CASE("Monte Carlo oracle for the characteristic functional") {
    // Independent oracle: node recursion plus trapezoid rule.
    const ColoredNoise noise{0.2, 1.0};
    const std::size_t n = 100000;
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const NoisePath p = sample_path(noise, 2.0, 0.01, stream_seed(2024, i));
        const double v = std::exp(-trapezoid(p.samples, p.step));
        s1 += v;
        s2 += v * v;
    }
    const double mean = s1 / n;
    const double se = std::sqrt((s2 / n - mean * mean) / (n - 1));
    CHECK(std::abs(mean - gaussian_characteristic_functional(noise, 0.0, 2.0)) <= 3.0 * se);
    CHECK(std::abs(mean * std::exp(-0.6) - mean_attenuation_factor(noise, 0.6, 2.0)) <= 3.0 * se);
}

TEST_CASE("exact step integrals have the right mean and variance") {
    const ColoredNoise noise{0.3, 20.0};
    const double L = 1.5;
    const std::size_t n = 40000;
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = sample_path_integral(noise, L, 0.25, stream_seed(5, i)).total();
        s1 += t;
        s2 += t * t;
    }
    const double mean = s1 / n;
    const double var = s2 / n - mean * mean;
    const double a = noise.alpha;
    const double expected = 2.0 * noise.h * (L - (1.0 - std::exp(-a * L)) / a);
    CHECK(std::abs(mean) <= 4.0 * std::sqrt(expected / n));
    CHECK(std::abs(var / expected - 1.0) <= 4.0 * std::sqrt(2.0 / n));
}

TEST_CASE("integral sampler nodes follow the plain recursion statistics") {
    const NoiseIntegralPath p = sample_path_integral({0.1, 2.0}, 4.0, 0.5, 11);
    CHECK(p.samples.size() == 9);
    CHECK(p.segment_integrals.size() == 8);
    CHECK(p.total() == doctest::Approx(std::accumulate(p.segment_integrals.begin(), p.segment_integrals.end(), 0.0)));
}

TEST_CASE("mean attenuation factor") {
    CHECK(mean_attenuation_factor({0.0, 1.0}, 0.6, 2.0) == doctest::Approx(std::exp(-0.6)));
    CHECK(mean_attenuation_factor({0.2, 1.0}, 0.6, 0.0) == doctest::Approx(std::exp(-0.6)));
    CHECK(mean_attenuation_factor({0.2, 1.0}, 0.6, 2.0) == doctest::Approx(0.6887).epsilon(2e-4));
    CHECK(mean_attenuation_factor({0.1, 1000.0}, 0.6, 2.0) == doctest::Approx(std::exp(-0.4)).epsilon(1e-3));
    CHECK_THROWS_AS(mean_attenuation_factor({0.1, 1.0}, 0.6, -1.0), InvalidArgument);
}

TEST_CASE("g exponent bounds") {
    const ColoredNoise noise{0.3, 4.0};
    CHECK(g_exponent(noise, 0.0) == 0.0);
    for (double d : {0.01, 0.1, 1.0, 10.0, 100.0}) {
        CHECK(g_exponent(noise, d) <= 0.0);
        CHECK(g_exponent(noise, d) >= -noise.h / noise.alpha);
    }
    CHECK(g_exponent(noise, 1e3) == doctest::Approx(-noise.h / noise.alpha));
}

TEST_CASE("effective coefficients") {
    const auto a = effective_coefficients({0.1, 10.0}, 0.5);
    CHECK(a.mu_star == doctest::Approx(0.4));
    CHECK(a.velocity == doctest::Approx(0.99));
    CHECK(a.dissipation == doctest::Approx(0.001));
    const auto b = effective_coefficients({0.0, 3.0}, 0.5);
    CHECK(b.mu_star == 0.5);
    CHECK(b.velocity == 1.0);
    CHECK(b.dissipation == 0.0);
    const auto c = effective_coefficients({0.5, 0.5}, 0.5);
    CHECK(c.mu_star == doctest::Approx(0.0));
    CHECK(c.velocity == doctest::Approx(0.0));
    CHECK(c.dissipation == doctest::Approx(2.0));
}

TEST_CASE("self-consistency report") {
    CHECK(validate_self_consistency({1.0, 100.0}, {0.1, 0.5}, 0.1).ok());
    const auto neg = validate_self_consistency({0.01, 100.0}, {0.1, -0.01}, 0.1);
    CHECK(neg.negative_integral);
    CHECK(neg.min_integral == doctest::Approx(-0.01));
    CHECK_FALSE(validate_self_consistency({0.01, 5.0}, {0.1}, 0.5).correlation_too_long);
    CHECK(validate_self_consistency({0.01, 1.0}, {0.1}, 0.5).correlation_too_long);
    CHECK(validate_self_consistency({0.5, 2.0}, {0.1}, 1.0).strong_noise);
    CHECK_FALSE(validate_self_consistency({0.5, 2.0}, {0.1}, 1.0, 0.3).strong_noise);
    CHECK_FALSE(describe(neg).empty());
}
