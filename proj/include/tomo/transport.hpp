#pragma once

#include <functional>

#include "tomo/forward.hpp"

namespace tomo {

using Field = std::function<double(Point)>;

/// Memory term used in the averaged transport equation.
/// Exact: the Gaussian (Furutsu-Novikov) closure, for which the averaged
/// intensity satisfies the equation with zero continuum residual.
/// Literal: the memory integral over the averaged intensity <I(x')> itself.
enum class Closure { Exact, Literal };

struct TransportOptions {
    Closure closure = Closure::Exact;
    std::size_t lateral_lines = 21;
    /// Simpson sub-intervals per residual step used for <I> and the memory term.
    std::size_t substeps = 8;
};

struct TransportResult {
    /// Ray coordinates: column k is s = -radius + k*step, row j is the lateral
    /// offset. Column 0 is the inflow boundary and holds zero.
    Grid2D residual;
    Grid2D mean_intensity;
    double max_norm = 0.0;
};

/// Averaged intensity <I_w> along lines parallel to w through the domain,
/// starting at s = -radius with zero inflow, and the upwind residual
///   (<I>_k - <I>_{k-1})/step + mubar <I>_k - f_k - memory_k.
TransportResult transport_residual(const Field& f, const Field& mubar, const Domain& domain,
                                   const ColoredNoise& noise, double phi, double step,
                                   const TransportOptions& options = {});

/// Grid-sampled variant using the phantom's emission and mean attenuation.
TransportResult transport_residual(const Phantom& phantom, const ColoredNoise& noise, double phi,
                                   double step, const TransportOptions& options = {});

}  // namespace tomo
