#pragma once

#include <complex>
#include <vector>

#include "tomo/geometry.hpp"
#include "tomo/noise.hpp"

namespace tomo {

/// Source-to-boundary distance along w = (cos phi, sin phi) for a source at y0.
double source_exit_distance(const Domain& domain, Point y0, double phi);

/// G(w) = exp{(h/alpha)(exp(-alpha d(phi)) - 1)}; throws if y0 is outside the domain.
double g_factor(const ColoredNoise& noise, const Domain& domain, Point y0, double phi);

struct GFactorProfile {
    std::vector<double> phis;
    std::vector<double> values;
    Point y0;
    ColoredNoise noise;
    Domain domain;
};

/// G sampled at phi_k = 2 pi k / n_angles.
GFactorProfile sample_g_factor(const ColoredNoise& noise, const Domain& domain, Point y0,
                               std::size_t n_angles);

/// G_n = (1/2pi) int G(phi) exp(-i n phi) dphi for n = 0..n_max.
struct FourierCoeffs {
    std::vector<std::complex<double>> g;

    int n_max() const { return static_cast<int>(g.size()) - 1; }
    /// G_n for any integer n (G_{-n} = conj(G_n)); zero beyond n_max.
    std::complex<double> operator[](int n) const;
    /// sum_n G_n exp(i n phi): the profile rebuilt from its coefficients.
    double evaluate(double phi) const;
};

/// Periodic trapezoid rule; needs at least 8 * n_max samples.
FourierCoeffs fourier_coeffs(const GFactorProfile& profile, int n_max);

/// delta^b(R) = b J1(bR) / (2 pi R), with the limit b^2 / (4 pi) at R = 0.
double delta_b(double R, double b);

struct KnQuadrature {
    double value = 0.0;
    double error = 0.0;
    bool converged = false;
};

/// K_n(R, mu; b) = int_mu^b [(mu + eta)^n + (mu - eta)^n] / eta~^n J_n(R eta~) eta deta
/// with eta~ = sqrt(eta^2 - mu^2), integrated in eta~ on [0, sqrt(b^2 - mu^2)]
/// where the integrand is eta~ [r^n + (-1)^n r^-n] J_n(R eta~), r = (mu + eta) / eta~.
/// n = 0 is accepted as well (the integrand is then 2 eta~ J_0).
KnQuadrature kn_quadrature(int n, double R, double mu, double b, double rel_tol = 1e-7);

/// Exact closed-form coefficient sums; 1 <= k <= m-1 for c1 and 0 <= k <= m-1 for c2, m <= 16.
double c1_coefficient(int m, int k);
double c2_coefficient(int m, int k);

struct KnClosed {
    double K1;
    double K2;
};

/// b-independent parts K_m^(1), K_m^(2) for R > 0.
KnClosed kn_closed_form(int m, double R, double mu);

/// |exp(-mu R sin t + i eta R cos t) - sum_{|n| <= n_max} i^n r^n J_n(R eta~) e^{int}|
/// with t = theta - phi, eta = sqrt(eta~^2 + mu^2), r = sqrt((eta + mu)/(eta - mu)).
double jacobi_anger_check(double mu, double R, double theta_minus_phi, double eta_tilde, int n_max);

/// Truncated point-source prediction. theta is measured so that x_rel = R(-sin theta, cos theta),
/// i.e. theta = atan2(x_rel) - pi/2, and the K-terms carry the factor I/(2pi);
/// see the README for why. At R = 0 only the delta^b term contributes.
double predicted_reconstruction(const FourierCoeffs& coeffs, double intensity, double mu_star,
                                double b, Point x_rel, int m_max = 16);

/// Contribution of the m = 1 K^(2) term alone, (I/2pi) K_1^(2) |G_2|.
double first_k_term_magnitude(const FourierCoeffs& coeffs, double intensity, double mu_star,
                              double R);

/// Angle-dependent peak coefficient (1/2)[G(theta) + G(theta + pi)] from the
/// even coefficients: G_0 + 2 sum_m Re(exp(i 2m theta) G_2m).
double predicted_peak_profile(const FourierCoeffs& coeffs, double theta);

}  // namespace tomo
