#include "tomo/recon.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tomo/error.hpp"
#include "tomo/kernels.hpp"
#include "tomo/parallel.hpp"
#include "tomo/quadrature.hpp"

namespace tomo {

namespace {

constexpr double kPi = std::numbers::pi;
const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * kPi);

void check_views(const Sinogram& sino) {
    const std::size_t n = sino.n_views();
    const double dphi = 2.0 * kPi / static_cast<double>(n);
    const double first = sino.phis.front();
    if (first < -1e-9 || first >= dphi)
        throw InvalidArgument("view angles must start in [0, 2pi / n_views)");
    for (std::size_t v = 0; v < n; ++v)
        if (std::abs(sino.phis[v] - (first + static_cast<double>(v) * dphi)) > 1e-6 * dphi)
            throw InvalidArgument(
                "exponential FBP needs uniformly spaced views covering [0, 2pi)");
}

}  // namespace

double FilterSpec::phi(double eta) const {
    const double a = std::abs(eta);
    return a <= b ? a * kInvSqrt2Pi : 0.0;
}

SpectralProfile view_transform(std::span<const double> profile, std::span<const double> us,
                               std::span<const double> eta) {
    if (profile.size() != us.size()) throw InvalidArgument("profile and offsets differ in size");
    if (us.size() < 2) throw InvalidArgument("view_transform needs at least two bins");
    const double du = (us.back() - us.front()) / static_cast<double>(us.size() - 1);
    SpectralProfile out;
    out.eta.assign(eta.begin(), eta.end());
    out.re.resize(eta.size());
    out.im.resize(eta.size());
    std::vector<double> c(us.size());
    std::vector<double> s(us.size());
    const auto& kern = kernels::active();
    for (std::size_t e = 0; e < eta.size(); ++e) {
        for (std::size_t j = 0; j < us.size(); ++j) {
            c[j] = std::cos(eta[e] * us[j]);
            s[j] = std::sin(eta[e] * us[j]);
        }
        double re = 0.0;
        double im = 0.0;
        kern.dot_pair(c.data(), s.data(), profile.data(), us.size(), &re, &im);
        out.re[e] = du * kInvSqrt2Pi * re;
        out.im[e] = -du * kInvSqrt2Pi * im;
    }
    return out;
}

std::size_t default_eta_nodes(double b, double r_max) {
    auto n = static_cast<std::size_t>(std::ceil(4.0 * b * r_max / kPi));
    n = std::max<std::size_t>(n, 65);
    return n % 2 ? n : n + 1;
}

double grid_radius(const Grid2D& grid) {
    double r = 0.0;
    for (std::size_t i : {std::size_t{0}, grid.nx - 1})
        for (std::size_t j : {std::size_t{0}, grid.ny - 1}) r = std::max(r, norm(grid.position(i, j)));
    return r;
}

FilteredViews::FilteredViews(const Sinogram& sino, double mu_star, const Domain& domain,
                             const FilterSpec& filter, double r_max, std::size_t n_eta)
    : mu_star_(mu_star), phis_(sino.phis) {
    sino.validate();
    domain.validate();
    check_views(sino);
    if (!(mu_star >= 0.0)) throw InvalidArgument("mu* must be >= 0");
    if (!(filter.b > mu_star)) throw InvalidArgument("filter cutoff b must exceed mu*");
    if (n_eta == 0) n_eta = default_eta_nodes(filter.b, r_max);
    if (n_eta < 64) throw InvalidArgument("n_eta must be >= 64");
    if (n_eta % 2 == 0) ++n_eta;

    const std::size_t nv = sino.n_views();
    const std::size_t nb = sino.n_bins();
    dphi_ = 2.0 * kPi / static_cast<double>(nv);

    eta_.resize(n_eta);
    const auto w = simpson_weights(n_eta, mu_star, filter.b);
    std::vector<double> wphi(n_eta);
    for (std::size_t e = 0; e < n_eta; ++e) {
        eta_[e] = mu_star + (filter.b - mu_star) * static_cast<double>(e) / static_cast<double>(n_eta - 1);
        wphi[e] = 2.0 * w[e] * filter.phi(eta_[e]);
    }

    std::vector<double> cos_eu(n_eta * nb);
    std::vector<double> sin_eu(n_eta * nb);
    for (std::size_t e = 0; e < n_eta; ++e)
        for (std::size_t j = 0; j < nb; ++j) {
            cos_eu[e * nb + j] = std::cos(eta_[e] * sino.us[j]);
            sin_eu[e * nb + j] = std::sin(eta_[e] * sino.us[j]);
        }

    dt_ = std::max(std::min(0.5 * sino.du, 0.125 / filter.b), 0.125 * sino.du);
    const double t_max = r_max + 2.0 * dt_;
    n_t_ = static_cast<std::size_t>(std::ceil(2.0 * t_max / dt_)) + 1;
    t0_ = -t_max;
    std::vector<double> cos_te(n_t_ * n_eta);
    std::vector<double> sin_te(n_t_ * n_eta);
    for (std::size_t m = 0; m < n_t_; ++m) {
        const double t = t0_ + static_cast<double>(m) * dt_;
        for (std::size_t e = 0; e < n_eta; ++e) {
            cos_te[m * n_eta + e] = std::cos(eta_[e] * t);
            sin_te[m * n_eta + e] = std::sin(eta_[e] * t);
        }
    }

    ar_.assign(nv * n_eta, 0.0);
    ai_.assign(nv * n_eta, 0.0);
    q_.assign(nv * n_t_, 0.0);
    const auto& kern = kernels::active();
    parallel_for(nv, [&](std::size_t v) {
        std::vector<double> pre(nb);
        for (std::size_t j = 0; j < nb; ++j) {
            const Ray ray{sino.phis[v], sino.us[j]};
            const double tau = chord_length(domain, ray) > 0.0 ? exit_parameter(domain, ray) : 0.0;
            pre[j] = sino.at(v, j) * std::exp(mu_star * tau);
        }
        double* ar = ar_.data() + v * n_eta;
        double* ai = ai_.data() + v * n_eta;
        for (std::size_t e = 0; e < n_eta; ++e) {
            double re = 0.0;
            double im = 0.0;
            kern.dot_pair(cos_eu.data() + e * nb, sin_eu.data() + e * nb, pre.data(), nb, &re, &im);
            ar[e] = wphi[e] * sino.du * kInvSqrt2Pi * re;
            ai[e] = -wphi[e] * sino.du * kInvSqrt2Pi * im;
        }
        double* q = q_.data() + v * n_t_;
        for (std::size_t m = 0; m < n_t_; ++m)
            q[m] = kern.dot_diff(cos_te.data() + m * n_eta, ar, sin_te.data() + m * n_eta, ai, n_eta);
    });
}

double FilteredViews::evaluate(Point x) const {
    const double weight = dphi_ / (4.0 * kPi);
    double sum = 0.0;
    for (std::size_t v = 0; v < phis_.size(); ++v) {
        const Ray axis{phis_[v], 0.0};
        const double t = dot(x, axis.perp());
        double pos = std::clamp((t - t0_) / dt_, 0.0, static_cast<double>(n_t_ - 1));
        const auto k = std::min(static_cast<std::size_t>(pos), n_t_ - 2);
        const double frac = pos - static_cast<double>(k);
        const double* q = q_.data() + v * n_t_;
        sum += weight * std::exp(-mu_star_ * dot(x, axis.dir())) * (q[k] + frac * (q[k + 1] - q[k]));
    }
    return sum;
}

double FilteredViews::evaluate_exact(Point x) const {
    const double weight = dphi_ / (4.0 * kPi);
    const std::size_t ne = eta_.size();
    double sum = 0.0;
    for (std::size_t v = 0; v < phis_.size(); ++v) {
        const Ray axis{phis_[v], 0.0};
        const double t = dot(x, axis.perp());
        double q = 0.0;
        for (std::size_t e = 0; e < ne; ++e)
            q += std::cos(eta_[e] * t) * ar_[v * ne + e] - std::sin(eta_[e] * t) * ai_[v * ne + e];
        sum += weight * std::exp(-mu_star_ * dot(x, axis.dir())) * q;
    }
    return sum;
}

void FilteredViews::backproject(Grid2D& grid) const {
    const auto& kern = kernels::active();
    const double weight = dphi_ / (4.0 * kPi);
    parallel_for(grid.ny, [&](std::size_t j) {
        double* row = grid.values.data() + j * grid.nx;
        std::fill(row, row + grid.nx, 0.0);
        const Point start = grid.position(0, j);
        for (std::size_t v = 0; v < phis_.size(); ++v) {
            const Ray axis{phis_[v], 0.0};
            const Point d = axis.dir();
            const Point p = axis.perp();
            kernels::BackprojectLine line;
            line.profile = std::span<const double>(q_.data() + v * n_t_, n_t_);
            line.t0 = t0_;
            line.dt = dt_;
            line.along0 = dot(start, d);
            line.along_step = grid.dx * d.x;
            line.across0 = dot(start, p);
            line.across_step = grid.dx * p.x;
            line.decay = mu_star_;
            line.weight = weight;
            kern.backproject(line, row, grid.nx);
        }
    });
}

ReconImage exponential_fbp(const Sinogram& sino, double mu_star, const Domain& domain,
                           const Grid2D& grid, const FilterSpec& filter, std::size_t n_eta) {
    const FilteredViews views(sino, mu_star, domain, filter, grid_radius(grid), n_eta);
    ReconImage img{grid, filter.b, mu_star};
    views.backproject(img.grid);
    return img;
}

ReconImage classical_fbp(const Sinogram& sino, const Domain& domain, const Grid2D& grid,
                         const FilterSpec& filter, std::size_t n_eta) {
    return exponential_fbp(sino, 0.0, domain, grid, filter, n_eta);
}

}  // namespace tomo
