#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "tomo/error.hpp"
#include "tomo/pointsrc.hpp"

using namespace tomo;

namespace {

constexpr double kPi = std::numbers::pi;
const Domain unit{{0, 0}, 1.0};

std::vector<double> exact_kn(int n_max, double R, double mu, double b) {
    std::vector<double> k(static_cast<std::size_t>(n_max) + 1);
    for (int n = 0; n <= n_max; ++n) k[static_cast<std::size_t>(n)] = kn_quadrature(n, R, mu, b, 1e-10).value;
    return k;
}

}  // namespace

TEST_CASE("G factor") {
    for (double phi : {0.0, 1.0, 4.0}) CHECK(g_factor({0.0, 2.0}, unit, {0.3, 0.2}, phi) == 1.0);
    const double c = std::exp(std::exp(-1.0) - 1.0);
    for (double phi : {0.0, 1.0, 4.0}) CHECK(g_factor({1.0, 1.0}, unit, {0, 0}, phi) == doctest::Approx(c));
    CHECK(c == doctest::Approx(0.5315).epsilon(1e-4));
    CHECK(g_factor({0.2, 200.0}, unit, {0.5, 0}, 0.0) == doctest::Approx(std::exp(-0.2 / 200.0)).epsilon(1e-12));
    CHECK_THROWS_AS(g_factor({0.2, 2.0}, unit, {1.5, 0}, 0.0), InvalidArgument);
    CHECK(source_exit_distance(unit, {0.5, 0}, 0.0) == doctest::Approx(0.5));
    CHECK(source_exit_distance(unit, {0.5, 0}, kPi) == doctest::Approx(1.5));
}

TEST_CASE("Fourier coefficients of G") {
    const auto flat = fourier_coeffs(sample_g_factor({0.0, 1.0}, unit, {0.2, 0.3}, 256), 16);
    CHECK(flat[0].real() == doctest::Approx(1.0));
    for (int n = 1; n <= 16; ++n) CHECK(std::abs(flat[n]) < 1e-14);

    const auto centred = fourier_coeffs(sample_g_factor({1.0, 1.0}, unit, {0, 0}, 256), 16);
    CHECK(centred[0].real() == doctest::Approx(std::exp(std::exp(-1.0) - 1.0)));
    for (int n = 1; n <= 16; ++n) CHECK(std::abs(centred[n]) < 1e-14);

    const auto prof = sample_g_factor({0.5, 2.0}, unit, {0.5, 0}, 1024);
    const auto off = fourier_coeffs(prof, 32);
    for (int n = 0; n <= 32; ++n) CHECK(std::abs(off[n].imag()) < 1e-14);
    CHECK(off[-3] == std::conj(off[3]));
    CHECK(off[40] == std::complex<double>{});
    for (double phi : {0.1, 1.9, 3.3}) CHECK(off.evaluate(phi) == doctest::Approx(g_factor({0.5, 2.0}, unit, {0.5, 0}, phi)).epsilon(1e-8));
    CHECK_THROWS_AS(fourier_coeffs(prof, 200), InvalidArgument);
}

TEST_CASE("band-limited delta") {
    CHECK(delta_b(0.0, 100.0) == doctest::Approx(795.77).epsilon(1e-5));
    CHECK(std::abs(delta_b(3.8317059702 / 40.0, 40.0)) < 1e-8);
    CHECK(delta_b(0.05, 40.0) == doctest::Approx(40.0 * std::cyl_bessel_j(1.0, 2.0) / (2.0 * kPi * 0.05)).epsilon(1e-12));
    CHECK(delta_b(-0.05, 40.0) == delta_b(0.05, 40.0));
}

TEST_CASE("K_n quadrature agrees with an independent eta-space integration") {
    for (int n : {0, 1, 2, 3, 6, 11})
        for (double R : {0.05, 0.5, 1.0})
            for (double mu : {0.0, 0.3}) {
                const double b = 40.0;
                const double lib = kn_quadrature(n, R, mu, b, 1e-10).value;
                const double ref = oracle::kn_eta(n, R, mu, b, 20000);
                CHECK(lib == doctest::Approx(ref).epsilon(1e-7).scale(1.0));
            }
}

TEST_CASE("K_n special cases") {
    for (int n : {1, 3, 5}) CHECK(kn_quadrature(n, 1.0, 0.0, 100.0).value == 0.0);
    // n = 2, mu = 0 reduces to 2 int_0^b J_2(R eta) eta d eta.
    const double R = 0.7, b = 30.0;
    const double ref = oracle::simpson([&](double e) { return 2.0 * std::cyl_bessel_j(2.0, R * e) * e; }, 0.0, b, 20000);
    CHECK(kn_quadrature(2, R, 0.0, b, 1e-10).value == doctest::Approx(ref).epsilon(1e-8));
    CHECK_THROWS_AS(kn_quadrature(2, 1.0, 0.5, 0.4), InvalidArgument);
    CHECK_THROWS_AS(kn_quadrature(-1, 1.0, 0.1, 10.0), InvalidArgument);
}

TEST_CASE("closed forms in the trivial limits") {
    for (int m = 1; m <= 16; ++m) {
        const KnClosed k = kn_closed_form(m, 0.8, 0.0);
        CHECK(k.K1 == 0.0);
        CHECK(k.K2 == doctest::Approx(4.0 * m / 0.64));
    }
    CHECK(kn_closed_form(1, 2.0, 0.3).K1 == doctest::Approx(0.3));
    CHECK_THROWS_AS(kn_closed_form(17, 1.0, 0.1), InvalidArgument);
    CHECK_THROWS_AS(kn_closed_form(2, 0.0, 0.1), InvalidArgument);
    CHECK_THROWS_AS(c1_coefficient(3, 0), InvalidArgument);
    CHECK_THROWS_AS(c2_coefficient(3, 3), InvalidArgument);
}

TEST_CASE("closed forms are the period averages of the quadrature") {
    // The remainder oscillates like cos(bR + phase)/sqrt(b); its mean over one
    // period in b is much smaller than its amplitude.
    for (int n = 1; n <= 6; ++n)
        for (double R : {0.5, 1.0})
            for (double mu : {0.15, 0.3}) {
                const int m = (n + 1) / 2;
                const KnClosed cf = kn_closed_form(m, R, mu);
                const int samples = 64;
                double mean = 0.0, amp = 0.0;
                for (int s = 0; s < samples; ++s) {
                    const double b = 200.0 + 2.0 * kPi / R * s / samples;
                    const double q = kn_quadrature(n, R, mu, b, 1e-10).value;
                    const double c = n % 2 ? cf.K1 : (m % 2 ? -1.0 : 1.0) * 4.0 * kPi * delta_b(R, b) + cf.K2;
                    mean += (q - c) / samples;
                    amp = std::max(amp, std::abs(q - c));
                }
                CHECK(std::abs(mean) < 0.05 * amp);
            }
}

TEST_CASE("K_2 at b = 200 is within the O(1/sqrt b) remainder") {
    const double R = 1.0, mu = 0.3, b = 200.0;
    const double q = kn_quadrature(2, R, mu, b).value;
    const double c = kn_closed_form(1, R, mu).K2 - 4.0 * kPi * delta_b(R, b);
    CHECK(std::abs(q - c) < 4.0 / std::sqrt(b));
    const double q3 = kn_quadrature(3, 1.0, 0.3, 400.0).value;
    CHECK(std::abs(q3 - kn_closed_form(2, 1.0, 0.3).K1) < 4.0 / std::sqrt(400.0));
}

TEST_CASE("Jacobi-Anger type expansion") {
    CHECK(jacobi_anger_check(0.3, 1.0, 0.7, 2.0, 48) < 1e-8);
    for (double t : {0.0, 1.1, 2.5, 4.0}) CHECK(jacobi_anger_check(0.0, 1.0, t, 10.0, 32) < 1e-10);
    double prev = INFINITY;
    for (int n = 2; n <= 20; n += 2) {
        const double r = jacobi_anger_check(0.3, 1.0, 0.7, 2.0, n);
        CHECK(r <= prev * (1.0 + 1e-6) + 1e-15);
        prev = r;
    }
}

TEST_CASE("oracle self-check: Fourier series against direct quadrature") {
    const ColoredNoise noise{0.5, 2.0};
    const Point y0{0.5, 0.0};
    const auto coeffs = fourier_coeffs(sample_g_factor(noise, unit, y0, 1024), 40);
    const double mu = 0.3, b = 40.0;
    for (double R : {0.0, 0.03, 0.08})
        for (double v : {0.0, 0.9, 2.0}) {
            const std::vector<double> K = exact_kn(40, R, mu, b);
            const double series = oracle::point_series(coeffs.g, K, 1.0, v);
            const double direct = oracle::point_direct([&](double phi) { return g_factor(noise, unit, y0, phi); },
                                                       1.0, mu, b, R, v, 4096);
            CHECK(series == doctest::Approx(direct).epsilon(1e-6).scale(1.0));
        }
}

TEST_CASE("predicted reconstruction") {
    // No noise: only the delta term survives.
    const auto flat = fourier_coeffs(sample_g_factor({0.0, 1.0}, unit, {0.5, 0}, 256), 32);
    for (double R : {0.0, 0.02, 0.07}) CHECK(predicted_reconstruction(flat, 2.0, 0.3, 40.0, {R, 0.0}) == doctest::Approx(2.0 * delta_b(R, 40.0)));

    const ColoredNoise noise{0.5, 2.0};
    const Point y0{0.5, 0.0};
    const auto coeffs = fourier_coeffs(sample_g_factor(noise, unit, y0, 1024), 40);
    const double mu = 0.3, b = 40.0;
    const double peak = predicted_peak_profile(coeffs, -0.5 * kPi) * b * b / (4.0 * kPi);
    CHECK(predicted_reconstruction(coeffs, 1.0, mu, b, {0.0, 0.0}) == doctest::Approx(peak));

    // Against the exact series on the outer half of the main lobe.
    double worst = 0.0;
    for (double R = 1.9 / b; R <= 3.8317 / b; R += 0.25 / b)
        for (double v : {0.0, 0.7, 1.6, 2.9}) {
            const double exact = oracle::point_series(coeffs.g, exact_kn(40, R, mu, b), 1.0, v);
            const double pred = predicted_reconstruction(coeffs, 1.0, mu, b, {R * std::cos(v), R * std::sin(v)});
            worst = std::max(worst, std::abs(pred - exact));
        }
    CHECK(worst < 0.02 * peak);
    CHECK_THROWS_AS(predicted_reconstruction(coeffs, 1.0, mu, b, {0.01, 0.0}, 21), InvalidArgument);
}

TEST_CASE("peak coefficient") {
    const auto flat = fourier_coeffs(sample_g_factor({0.0, 1.0}, unit, {0.5, 0}, 256), 32);
    CHECK(predicted_peak_profile(flat, 0.4) == doctest::Approx(1.0));
    const auto centred = fourier_coeffs(sample_g_factor({1.0, 1.0}, unit, {0, 0}, 256), 32);
    CHECK(predicted_peak_profile(centred, 0.4) == doctest::Approx(std::exp(std::exp(-1.0) - 1.0)));

    const ColoredNoise noise{0.5, 2.0};
    const Point y0{0.5, 0.0};
    const auto coeffs = fourier_coeffs(sample_g_factor(noise, unit, y0, 1024), 32);
    double lo = INFINITY, arg = 0.0;
    for (int k = 0; k < 360; ++k) {
        const double t = kPi * k / 360.0;
        const double direct = 0.5 * (g_factor(noise, unit, y0, t) + g_factor(noise, unit, y0, t + kPi));
        CHECK(predicted_peak_profile(coeffs, t) == doctest::Approx(direct).epsilon(1e-8));
        if (direct < lo) {
            lo = direct;
            arg = t;
        }
    }
    // Perpendicular to the offset both boundary distances are sqrt(0.75);
    // the average of the two factors is smallest there.
    CHECK(std::abs(arg - 0.5 * kPi) < 1e-9);
}

TEST_CASE("first K-term magnitude grows like b^2") {
    const ColoredNoise noise{0.5, 2.0};
    const auto coeffs = fourier_coeffs(sample_g_factor(noise, unit, {0.5, 0.0}, 1024), 32);
    const double m20 = first_k_term_magnitude(coeffs, 1.0, 0.3, kPi / 20.0);
    const double m40 = first_k_term_magnitude(coeffs, 1.0, 0.3, kPi / 40.0);
    CHECK(m40 / m20 == doctest::Approx(4.0).epsilon(0.01));
}
