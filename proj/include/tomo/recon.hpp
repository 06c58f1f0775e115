#pragma once

#include <span>
#include <vector>

#include "tomo/forward.hpp"

namespace tomo {

/// Ramp filter Phi(eta) = |eta| / sqrt(2 pi) on |eta| <= b, zero above.
struct FilterSpec {
    double b = 0.0;

    double phi(double eta) const;
};

struct ReconImage {
    Grid2D grid;
    double b = 0.0;
    double mu_star = 0.0;
};

struct SpectralProfile {
    std::vector<double> eta;
    std::vector<double> re;
    std::vector<double> im;
};

/// ghat(eta) = du / sqrt(2 pi) * sum_j exp(-i eta u_j) g_j at the given eta.
SpectralProfile view_transform(std::span<const double> profile, std::span<const double> us,
                               std::span<const double> eta);

/// Node count used when n_eta = 0: the smallest odd count >= max(65, 4 b R / pi).
std::size_t default_eta_nodes(double b, double r_max);

/// Filtered views of an exponential FBP. Each view is premultiplied by
/// exp(mu* tau(w, u)), transformed, weighted by Phi(eta) with composite
/// Simpson on [mu*, b], and kept as q_v(t) on a fine t lattice:
///   q_v(t) = 2 int_{mu*}^{b} Re(exp(i eta t) ghat_v(eta)) Phi(eta) deta
/// so that d(x) = (1/4pi) sum_v dphi exp(-mu* x.w_v) q_v(x.w_v_perp).
class FilteredViews {
public:
    FilteredViews(const Sinogram& sino, double mu_star, const Domain& domain,
                  const FilterSpec& filter, double r_max, std::size_t n_eta = 0);

    /// Back projection of the tabulated q_v with linear interpolation in t.
    double evaluate(Point x) const;
    /// Back projection with q_v(t) summed directly over the eta nodes.
    double evaluate_exact(Point x) const;
    /// Whole-grid back projection through the SIMD row kernel.
    void backproject(Grid2D& grid) const;

    std::size_t n_eta() const { return eta_.size(); }
    double t_step() const { return dt_; }

private:
    double mu_star_;
    double dphi_;
    std::vector<double> phis_;
    std::vector<double> eta_;
    // Per view, the Simpson- and Phi-weighted spectrum (2 w Phi Re, 2 w Phi Im).
    std::vector<double> ar_;
    std::vector<double> ai_;
    double t0_ = 0.0;
    double dt_ = 0.0;
    std::size_t n_t_ = 0;
    std::vector<double> q_;
};

/// Exponential-Radon FBP with constant attenuation mu*. The sinogram must have
/// uniformly spaced views covering [0, 2 pi). `grid` fixes the output lattice;
/// its values are ignored.
ReconImage exponential_fbp(const Sinogram& sino, double mu_star, const Domain& domain,
                           const Grid2D& grid, const FilterSpec& filter, std::size_t n_eta = 0);

/// exponential_fbp with mu* = 0.
ReconImage classical_fbp(const Sinogram& sino, const Domain& domain, const Grid2D& grid,
                         const FilterSpec& filter, std::size_t n_eta = 0);

/// Largest distance from the world origin to a grid sample.
double grid_radius(const Grid2D& grid);

}  // namespace tomo
