#include "tomo/bessel.hpp"

#include <cmath>
#include <numbers>

#include "tomo/error.hpp"

namespace tomo {

namespace {

void check(int n, double x) {
    if (n < 0) throw InvalidArgument("bessel_j needs n >= 0");
    if (!(x >= 0.0) || !std::isfinite(x)) throw InvalidArgument("bessel_j needs finite x >= 0");
}

double series(int n, double x) {
    double lead = 1.0;
    for (int k = 1; k <= n; ++k) lead *= 0.5 * x / k;
    return lead * bessel_j_scaled_series(n, x);
}

// Hankel asymptotic expansion, valid for large x.
double hankel(int nu, double x) {
    const double mu4 = 4.0 * nu * nu;
    double p = 0.0;
    double q = 0.0;
    double term = 1.0;
    double prev = INFINITY;
    for (int k = 0; k < 200; ++k) {
        if (k > 0) term *= (mu4 - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (8.0 * k * x);
        const double mag = std::abs(term);
        if (mag > prev) break;
        // a_k / x^k enters P with sign (-1)^(k/2) for even k, Q likewise for odd k.
        const double sign = ((k / 2) % 2) ? -1.0 : 1.0;
        if (k % 2 == 0)
            p += sign * term;
        else
            q += sign * term;
        if (mag < 1e-17) break;
        prev = mag;
    }
    const double chi = x - (0.5 * nu + 0.25) * std::numbers::pi;
    return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

void miller(int n_max, double x, std::vector<double>& out) {
    int start = static_cast<int>(std::max<double>(n_max, x) + 30.0 + 10.0 * std::cbrt(x));
    if (start % 2) ++start;
    out.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
    double above = 0.0;
    double cur = 1e-30;
    double norm = 2.0 * cur;
    for (int k = start; k >= 1; --k) {
        const double below = (2.0 * k / x) * cur - above;
        above = cur;
        cur = below;
        const int idx = k - 1;
        if (idx <= n_max) out[static_cast<std::size_t>(idx)] = cur;
        if (idx % 2 == 0) norm += idx == 0 ? cur : 2.0 * cur;
        if (std::abs(cur) > 1e250) {
            cur *= 1e-250;
            above *= 1e-250;
            norm *= 1e-250;
            for (auto& v : out) v *= 1e-250;
        }
    }
    for (auto& v : out) v /= norm;
}

}  // namespace

double bessel_j_scaled_series(int n, double x) {
    const double q = 0.25 * x * x;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 500; ++k) {
        term *= -q / (static_cast<double>(k) * static_cast<double>(n + k));
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
}

std::vector<double> bessel_j_all(int n_max, double x) {
    check(n_max, x);
    std::vector<double> out(static_cast<std::size_t>(n_max) + 1, 0.0);
    if (x == 0.0) {
        out[0] = 1.0;
        return out;
    }
    if (x <= 1.0) {
        for (int n = 0; n <= n_max; ++n) out[static_cast<std::size_t>(n)] = series(n, x);
        return out;
    }
    if (x > 25.0 && n_max < x) {
        out[0] = hankel(0, x);
        if (n_max >= 1) out[1] = hankel(1, x);
        for (int k = 1; k < n_max; ++k)
            out[static_cast<std::size_t>(k + 1)] =
                (2.0 * k / x) * out[static_cast<std::size_t>(k)] - out[static_cast<std::size_t>(k - 1)];
        return out;
    }
    miller(n_max, x, out);
    return out;
}

double bessel_j(int n, double x) {
    check(n, x);
    if (x == 0.0) return n == 0 ? 1.0 : 0.0;
    if (x <= 1.0) return series(n, x);
    return bessel_j_all(n, x)[static_cast<std::size_t>(n)];
}

}  // namespace tomo
