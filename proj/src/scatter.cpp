#include "tomo/scatter.hpp"

#include <cmath>
#include <numbers>

#include "tomo/error.hpp"
#include "tomo/parallel.hpp"

namespace tomo {

double AngularKernel::operator()(double c) const {
    if (kind == Kind::Isotropic) return w0;
    const double c2 = c * c;
    double sum = 0.0;
    for (std::size_t k = coeffs.size(); k-- > 0;) sum = sum * c2 + coeffs[k];
    return sum;
}

AngularKernel AngularKernel::scaled(double factor) const {
    AngularKernel out = *this;
    out.w0 *= factor;
    for (double& c : out.coeffs) c *= factor;
    return out;
}

void AngularKernel::validate() const {
    for (int i = 0; i <= 200; ++i) {
        const double v = (*this)(-1.0 + 0.01 * i);
        if (!std::isfinite(v) || v < 0.0) throw InvalidArgument("scatter kernel must be >= 0 on [-1, 1]");
    }
}

namespace {

// Nodes from the domain entry of the line through x up to x itself.
bool upstream_segment(const Domain& domain, Point x, double phi, double step, Ray& ray,
                      double& s0, double& s1, std::size_t& n) {
    ray = Ray{phi, dot(x, Ray{phi, 0.0}.perp())};
    if (chord_length(domain, ray) <= 0.0) return false;
    s0 = entry_parameter(domain, ray);
    s1 = dot(x, ray.dir());
    if (s1 <= s0) return false;
    n = interval_count(s1 - s0, step);
    return true;
}

}  // namespace

double unscattered_intensity(const Phantom& phantom, const Grid2D& mu, Point x, double phi,
                             double step) {
    Ray ray;
    double s0 = 0.0;
    double s1 = 0.0;
    std::size_t n = 0;
    if (!upstream_segment(phantom.domain, x, phi, step, ray, s0, s1, n)) return 0.0;
    const auto f = sample_along(phantom.emission, ray, s0, s1, n);
    const auto m = sample_along(mu, ray, s0, s1, n);
    return attenuated_integral(f, m, (s1 - s0) / static_cast<double>(n));
}

double first_order_scatter(const Phantom& phantom, const Grid2D& mu, const ScatterKernel& kernel,
                           Point x, double phi, double step, std::size_t n_angles) {
    if (n_angles < 8) throw InvalidArgument("first_order_scatter needs n_angles >= 8");
    Ray ray;
    double s0 = 0.0;
    double s1 = 0.0;
    std::size_t n = 0;
    if (!upstream_segment(phantom.domain, x, phi, step, ray, s0, s1, n)) return 0.0;
    const double h = (s1 - s0) / static_cast<double>(n);
    const double wq = 2.0 * std::numbers::pi / static_cast<double>(n_angles);

    std::vector<double> beta(n_angles);
    for (std::size_t q = 0; q < n_angles; ++q)
        beta[q] = kernel.angular(std::cos(wq * static_cast<double>(q)));

    std::vector<double> source(n + 1, 0.0);
    parallel_for(n + 1, [&](std::size_t k) {
        const Point xp = ray.at(s0 + static_cast<double>(k) * h);
        const double ns = kernel.density.sample(xp);
        if (ns == 0.0) return;
        double sum = 0.0;
        for (std::size_t q = 0; q < n_angles; ++q) {
            if (beta[q] == 0.0) continue;
            // beta depends on w . w' = cos of the angle between the two directions.
            sum += wq * beta[q] *
                   unscattered_intensity(phantom, mu, xp, phi + wq * static_cast<double>(q), step);
        }
        source[k] = ns * sum;
    });
    const auto m = sample_along(mu, ray, s0, s1, n);
    return attenuated_integral(source, m, h);
}

double scattered_projection(const Phantom& phantom, const Grid2D& mu, const ScatterKernel& kernel,
                            const Ray& ray, double step, std::size_t n_angles) {
    Phantom mean = phantom;
    mean.attenuation_mean = mu;
    mean.sources.clear();
    const ChordSamples chord = sample_chord(mean, ray, step);
    const double direct = spect_projection(mean, ray, chord, Deposit{});
    if (chord.intervals() == 0) return direct;
    const Point exit = ray.at(chord.s_exit);
    return direct + first_order_scatter(phantom, mu, kernel, exit, ray.phi, step, n_angles);
}

}  // namespace tomo
