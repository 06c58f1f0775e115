#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace tomo {

/// Composite Simpson weights for n_nodes (odd, >= 3) equispaced nodes on [a, b].
std::vector<double> simpson_weights(std::size_t n_nodes, double a, double b);

struct QuadResult {
    double value = 0.0;
    /// Richardson estimate |S_2n - S_n| / 15 from the last refinement.
    double error = 0.0;
    std::size_t evaluations = 0;
    bool converged = false;
};

/// Composite Simpson on [a, b] starting from `intervals` (rounded up to even)
/// and halving the spacing, reusing previous nodes, until the estimated error
/// is below abs_tol + rel_tol * |value| or max_intervals is reached.
QuadResult simpson_refine(const std::function<double(double)>& f, double a, double b,
                          std::size_t intervals, double rel_tol, double abs_tol,
                          std::size_t max_intervals = std::size_t{1} << 22);

}  // namespace tomo
