#include "tomo/transport.hpp"

#include <algorithm>
#include <cmath>

#include "tomo/error.hpp"
#include "tomo/kernels.hpp"
#include "tomo/parallel.hpp"

namespace tomo {

namespace {

struct LineResult {
    std::vector<double> intensity;
    std::vector<double> residual;
};

// All line integrals have the form
//   int_{-r}^{x} f(y) exp(-(M(x) - M(y))) W(x - y) dy
// with M the running integral of mubar. On the uniform fine lattice the kernel
// depends on the index difference only, so each node is one dot product.
LineResult solve_line(const Field& f, const Field& mubar, const Ray& ray, double radius,
                      const ColoredNoise& noise, double step, std::size_t nodes,
                      std::size_t substeps, Closure closure) {
    const std::size_t sub = substeps % 2 ? substeps + 1 : substeps;
    const std::size_t n_fine = (nodes - 1) * sub + 1;
    const double hf = step / static_cast<double>(sub);
    const double h = noise.h;
    const double a = noise.alpha;

    std::vector<double> fv(n_fine);
    std::vector<double> mv(n_fine);
    for (std::size_t i = 0; i < n_fine; ++i) {
        const Point p = ray.at(-radius + static_cast<double>(i) * hf);
        fv[i] = f(p);
        mv[i] = mubar(p);
        if (!std::isfinite(fv[i]) || !std::isfinite(mv[i]))
            throw NonFiniteValue("non-finite field in transport residual");
    }
    std::vector<double> big_m(n_fine, 0.0);
    for (std::size_t i = 1; i < n_fine; ++i) big_m[i] = big_m[i - 1] + 0.5 * hf * (mv[i - 1] + mv[i]);

    // Kernels indexed by lag: K(D) = exp(hD + (h/a)(e^{-aD} - 1)) and its
    // derivative K(D) h (1 - e^{-aD}). The reversed copies let one dot product
    // evaluate a convolution sum.
    std::vector<double> k_rev(n_fine);
    std::vector<double> dk_rev(n_fine);
    for (std::size_t d = 0; d < n_fine; ++d) {
        const double lag = static_cast<double>(d) * hf;
        const double kval = std::exp(h * lag + g_exponent(noise, lag));
        k_rev[n_fine - 1 - d] = kval;
        dk_rev[n_fine - 1 - d] = kval * h * -std::expm1(-a * lag);
    }
    // Simpson weights anchored at the inflow point; the weight of the upper
    // endpoint is corrected per node.
    std::vector<double> src(n_fine);
    for (std::size_t i = 0; i < n_fine; ++i) {
        const double w = (i == 0) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        src[i] = w * hf / 3.0 * fv[i] * std::exp(big_m[i]);
    }

    const auto& kern = kernels::active();
    LineResult out;
    out.intensity.assign(nodes, 0.0);
    std::vector<double> memory(nodes, 0.0);
    for (std::size_t k = 1; k < nodes; ++k) {
        const std::size_t top = k * sub;
        const double* kr = k_rev.data() + (n_fine - 1 - top);
        const double* dkr = dk_rev.data() + (n_fine - 1 - top);
        // top is even, so src[top] carries weight 2 where the endpoint needs 1.
        const double fix = -0.5 * src[top];
        const double scale = std::exp(-big_m[top]);
        out.intensity[k] = scale * (kern.dot(src.data(), kr, top + 1) + fix * kr[top]);
        memory[k] = scale * (kern.dot(src.data(), dkr, top + 1) + fix * dkr[top]);
    }

    if (closure == Closure::Literal) {
        // int_{-r}^{x} h a e^{-a(x - x')} <I(x')> dx' by trapezoid recursion on the nodes.
        const double decay = std::exp(-a * step);
        double acc = 0.0;
        for (std::size_t k = 1; k < nodes; ++k) {
            acc = decay * acc + 0.5 * step * h * a * (decay * out.intensity[k - 1] + out.intensity[k]);
            memory[k] = acc;
        }
    }

    out.residual.assign(nodes, 0.0);
    for (std::size_t k = 1; k < nodes; ++k) {
        const std::size_t i = k * sub;
        out.residual[k] = (out.intensity[k] - out.intensity[k - 1]) / step + mv[i] * out.intensity[k] -
                          fv[i] - memory[k];
    }
    return out;
}

}  // namespace

TransportResult transport_residual(const Field& f, const Field& mubar, const Domain& domain,
                                   const ColoredNoise& noise, double phi, double step,
                                   const TransportOptions& options) {
    domain.validate();
    noise.validate();
    if (!(step > 0.0)) throw InvalidArgument("transport step must be positive");
    if (options.lateral_lines < 1) throw InvalidArgument("need at least one lateral line");
    const double r = domain.radius;
    const std::size_t intervals = static_cast<std::size_t>(std::llround(2.0 * r / step));
    if (intervals < 2) throw InvalidArgument("transport step too coarse for the domain");
    const double h = 2.0 * r / static_cast<double>(intervals);
    const std::size_t nodes = intervals + 1;
    const std::size_t lines = options.lateral_lines;
    const double du = 2.0 * r / static_cast<double>(lines);

    TransportResult res;
    res.residual = Grid2D(nodes, lines, h, du, {-r, -r + 0.5 * du});
    res.mean_intensity = res.residual;
    parallel_for(lines, [&](std::size_t j) {
        const double u = -r + (static_cast<double>(j) + 0.5) * du;
        const Ray ray{phi, u};
        // Lines are laid out relative to the domain centre.
        const Point shift = domain.center;
        auto fs = [&](Point p) { return f(p + shift); };
        auto ms = [&](Point p) { return mubar(p + shift); };
        const LineResult line =
            solve_line(fs, ms, ray, r, noise, h, nodes, options.substeps, options.closure);
        for (std::size_t k = 0; k < nodes; ++k) {
            res.residual.at(k, j) = line.residual[k];
            res.mean_intensity.at(k, j) = line.intensity[k];
        }
    });
    for (double v : res.residual.values) res.max_norm = std::max(res.max_norm, std::abs(v));
    return res;
}

TransportResult transport_residual(const Phantom& phantom, const ColoredNoise& noise, double phi,
                                   double step, const TransportOptions& options) {
    phantom.validate();
    auto f = [&](Point p) { return phantom.emission.sample(p); };
    auto m = [&](Point p) { return phantom.attenuation_mean.sample(p); };
    return transport_residual(f, m, phantom.domain, noise, phi, step, options);
}

}  // namespace tomo
