#pragma once

#include <vector>

#include "tomo/forward.hpp"

namespace tomo {

/// Angular factor beta(cos psi) of a separable scattering kernel.
struct AngularKernel {
    enum class Kind { Isotropic, Poly };
    Kind kind = Kind::Isotropic;
    double w0 = 0.0;
    /// Poly: beta(c) = sum_k coeffs[k] * c^(2k).
    std::vector<double> coeffs;

    static AngularKernel isotropic(double w0) { return {Kind::Isotropic, w0, {}}; }
    static AngularKernel poly(std::vector<double> coeffs) { return {Kind::Poly, 0.0, std::move(coeffs)}; }

    double operator()(double cos_psi) const;
    AngularKernel scaled(double factor) const;
    /// Throws InvalidArgument when beta is negative somewhere on [-1, 1].
    void validate() const;
};

/// W(x; w, w') = n_s(x) beta(w . w').
struct ScatterKernel {
    Grid2D density;
    AngularKernel angular;
};

/// I0_w(x): unscattered intensity arriving at x from direction w, integrated
/// from the domain entry of the line through x. Point sources are ignored.
double unscattered_intensity(const Phantom& phantom, const Grid2D& mu, Point x, double phi,
                             double step);

/// Single-scatter term at x for direction phi: the emission reaching each
/// upstream point x' along every direction w' (trapezoid rule, n_angles
/// uniform angles), redirected by the kernel and attenuated from x' to x.
double first_order_scatter(const Phantom& phantom, const Grid2D& mu, const ScatterKernel& kernel,
                           Point x, double phi, double step, std::size_t n_angles);

/// spect_projection on the mean attenuation plus the single-scatter term at
/// the chord exit.
double scattered_projection(const Phantom& phantom, const Grid2D& mu, const ScatterKernel& kernel,
                            const Ray& ray, double step, std::size_t n_angles);

}  // namespace tomo
