#include "tomo/pointsrc.hpp"

#include <cmath>
#include <numbers>

#include "tomo/bessel.hpp"
#include "tomo/error.hpp"
#include "tomo/quadrature.hpp"

namespace tomo {

namespace {

constexpr double kPi = std::numbers::pi;
__extension__ typedef unsigned __int128 u128;

u128 binomial(int n, int k) {
    u128 r = 1;
    for (int i = 1; i <= k; ++i) r = r * static_cast<u128>(n - k + i) / static_cast<u128>(i);
    return r;
}

// j! / lo! for lo <= j.
u128 falling(int j, int lo) {
    u128 r = 1;
    for (int i = lo + 1; i <= j; ++i) r *= static_cast<u128>(i);
    return r;
}

double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

void check_mk(int m, int k, int k_lo) {
    if (m < 1 || m > 16) throw InvalidArgument("coefficient index m must lie in [1, 16]");
    if (k < k_lo || k > m - 1) throw InvalidArgument("coefficient index k out of range");
}

}  // namespace

double source_exit_distance(const Domain& domain, Point y0, double phi) {
    const Ray ray{phi, dot(y0, Ray{phi, 0.0}.perp())};
    return exit_parameter(domain, ray) - dot(y0, ray.dir());
}

double g_factor(const ColoredNoise& noise, const Domain& domain, Point y0, double phi) {
    if (!domain.contains(y0)) throw InvalidArgument("source must lie inside the domain");
    return std::exp(g_exponent(noise, source_exit_distance(domain, y0, phi)));
}

GFactorProfile sample_g_factor(const ColoredNoise& noise, const Domain& domain, Point y0,
                               std::size_t n_angles) {
    noise.validate();
    if (n_angles < 1) throw InvalidArgument("need at least one angle");
    GFactorProfile p{{}, {}, y0, noise, domain};
    p.phis.resize(n_angles);
    p.values.resize(n_angles);
    for (std::size_t k = 0; k < n_angles; ++k) {
        p.phis[k] = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(n_angles);
        p.values[k] = g_factor(noise, domain, y0, p.phis[k]);
    }
    return p;
}

std::complex<double> FourierCoeffs::operator[](int n) const {
    const int a = std::abs(n);
    if (a >= static_cast<int>(g.size())) return {0.0, 0.0};
    return n >= 0 ? g[static_cast<std::size_t>(a)] : std::conj(g[static_cast<std::size_t>(a)]);
}

double FourierCoeffs::evaluate(double phi) const {
    double sum = g.empty() ? 0.0 : g[0].real();
    for (std::size_t n = 1; n < g.size(); ++n)
        sum += 2.0 * (g[n] * std::polar(1.0, static_cast<double>(n) * phi)).real();
    return sum;
}

FourierCoeffs fourier_coeffs(const GFactorProfile& profile, int n_max) {
    if (n_max < 0) throw InvalidArgument("n_max must be >= 0");
    const std::size_t n = profile.values.size();
    if (n < 8 * static_cast<std::size_t>(std::max(n_max, 1)))
        throw InvalidArgument("fourier_coeffs needs at least 8 * n_max samples");
    FourierCoeffs c;
    c.g.resize(static_cast<std::size_t>(n_max) + 1);
    for (int m = 0; m <= n_max; ++m) {
        std::complex<double> sum{0.0, 0.0};
        for (std::size_t k = 0; k < n; ++k)
            sum += profile.values[k] * std::polar(1.0, -static_cast<double>(m) * profile.phis[k]);
        c.g[static_cast<std::size_t>(m)] = sum / static_cast<double>(n);
    }
    return c;
}

double delta_b(double R, double b) {
    if (!(b > 0.0)) throw InvalidArgument("delta_b needs b > 0");
    R = std::abs(R);
    if (R * b < 1e-8) return b * b / (4.0 * kPi);
    return b * bessel_j(1, b * R) / (2.0 * kPi * R);
}

KnQuadrature kn_quadrature(int n, double R, double mu, double b, double rel_tol) {
    if (n < 0) throw InvalidArgument("kn_quadrature needs n >= 0");
    if (!(mu >= 0.0)) throw InvalidArgument("kn_quadrature needs mu >= 0");
    if (!(b > mu)) throw InvalidArgument("kn_quadrature needs b > mu");
    if (!(R >= 0.0)) throw InvalidArgument("kn_quadrature needs R >= 0");
    const double top = std::sqrt(b * b - mu * mu);
    const double sign = (n % 2) ? -1.0 : 1.0;
    const double inv_fact = 1.0 / factorial(n);
    auto integrand = [&](double et) -> double {
        if (et == 0.0) return 0.0;
        const double eta = std::hypot(et, mu);
        const double x = R * et;
        if (x <= 1.0) {
            // r^n J_n(x) = ((mu + eta) R / 2)^n / n! * S_n(x), free of overflow as et -> 0.
            const double s = bessel_j_scaled_series(n, x);
            const double up = std::pow(0.5 * (mu + eta) * R, n);
            const double down = std::pow(0.5 * et * et * R / (mu + eta), n);
            return et * s * inv_fact * (up + sign * down);
        }
        const double r = (mu + eta) / et;
        return et * (std::pow(r, n) + sign * std::pow(r, -n)) * bessel_j(n, x);
    };
    const double periods = top * R / (2.0 * kPi);
    const auto intervals = static_cast<std::size_t>(std::max(64.0, 32.0 * std::ceil(periods)));
    const QuadResult q = simpson_refine(integrand, 0.0, top, intervals, rel_tol, rel_tol);
    return {q.value, q.error, q.converged};
}

double c1_coefficient(int m, int k) {
    check_mk(m, k, 1);
    u128 sum = 0;
    for (int j = m - k - 1; j <= m - 1; ++j)
        sum += binomial(2 * m - 1, 2 * j) * falling(j, j + k + 1 - m);
    return std::ldexp(static_cast<double>(sum) / factorial(m + k - 1), 1 - 2 * k);
}

double c2_coefficient(int m, int k) {
    check_mk(m, k, 0);
    u128 sum = 0;
    for (int j = m - k - 1; j <= m; ++j) sum += binomial(2 * m, 2 * j) * falling(j, j + k + 1 - m);
    return std::ldexp(static_cast<double>(sum) / factorial(m + k), -2 * k);
}

KnClosed kn_closed_form(int m, double R, double mu) {
    if (m < 1 || m > 16) throw InvalidArgument("kn_closed_form needs 1 <= m <= 16");
    if (!(R > 0.0)) throw InvalidArgument("kn_closed_form needs R > 0");
    const double x2 = (mu * R) * (mu * R);
    double s1 = 0.0;
    double p = 1.0;
    for (int k = 1; k <= m - 1; ++k, p *= x2) s1 += c1_coefficient(m, k) * p;
    double s2 = 0.0;
    p = 1.0;
    for (int k = 0; k <= m - 1; ++k, p *= x2) s2 += c2_coefficient(m, k) * p;
    return {2.0 * (2 * m - 1) * mu / R + mu * mu * mu * R * s1, 4.0 * m / (R * R) + mu * mu * s2};
}

double jacobi_anger_check(double mu, double R, double t, double eta_tilde, int n_max) {
    if (!(eta_tilde > 0.0)) throw InvalidArgument("jacobi_anger_check needs eta~ > 0");
    const double eta = std::hypot(eta_tilde, mu);
    const double r = std::sqrt((eta + mu) / (eta - mu));
    const std::complex<double> lhs =
        std::exp(-mu * R * std::sin(t)) * std::polar(1.0, eta * R * std::cos(t));
    const auto j = bessel_j_all(n_max, R * eta_tilde);
    const std::complex<double> iu{0.0, 1.0};
    std::complex<double> rhs = j[0];
    for (int n = 1; n <= n_max; ++n) {
        const double jn = j[static_cast<std::size_t>(n)];
        const std::complex<double> in = std::pow(iu, n);
        // J_{-n} = (-1)^n J_n and i^{-n} (-1)^n = i^n.
        rhs += in * jn * (std::pow(r, n) * std::polar(1.0, n * t) + std::pow(r, -n) * std::polar(1.0, -n * t));
    }
    return std::abs(lhs - rhs);
}

double predicted_reconstruction(const FourierCoeffs& coeffs, double intensity, double mu_star,
                                double b, Point x_rel, int m_max) {
    if (2 * m_max > coeffs.n_max()) throw InvalidArgument("m_max exceeds the available coefficients");
    const double R = norm(x_rel);
    const double theta = std::atan2(x_rel.y, x_rel.x) - 0.5 * kPi;
    double even = coeffs[0].real();
    for (int m = 1; m <= m_max; ++m)
        even += 2.0 * (std::polar(1.0, 2.0 * m * theta) * coeffs[2 * m]).real();
    double d = intensity * even * delta_b(R, b);
    if (R > 0.0) {
        double k_terms = 0.0;
        for (int m = 1; m <= m_max; ++m) {
            const KnClosed k = kn_closed_form(m, R, mu_star);
            const double odd_sign = (m % 2) ? 1.0 : -1.0;
            k_terms += odd_sign * k.K1 * (std::polar(1.0, (2.0 * m - 1.0) * theta) * coeffs[2 * m - 1]).imag();
            k_terms += -odd_sign * k.K2 * (std::polar(1.0, 2.0 * m * theta) * coeffs[2 * m]).real();
        }
        d += intensity / (2.0 * kPi) * k_terms;
    }
    return d;
}

double first_k_term_magnitude(const FourierCoeffs& coeffs, double intensity, double mu_star,
                              double R) {
    return intensity / (2.0 * kPi) * kn_closed_form(1, R, mu_star).K2 * std::abs(coeffs[2]);
}

double predicted_peak_profile(const FourierCoeffs& coeffs, double theta) {
    double even = coeffs[0].real();
    for (int m = 1; 2 * m <= coeffs.n_max(); ++m)
        even += 2.0 * (std::polar(1.0, 2.0 * m * theta) * coeffs[2 * m]).real();
    return even;
}

}  // namespace tomo
