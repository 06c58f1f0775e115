#pragma once

#include <vector>

namespace tomo {

/// J_n(x) for integer n >= 0 and x >= 0.
///   x <= 1          ascending series
///   x > 25, n < x   Hankel asymptotic J0, J1 then upward recurrence
///   otherwise       Miller downward recurrence normalized by J0 + 2 sum J_2k = 1
/// Absolute error <= 1e-10 for n <= 64, x <= 1e3.
double bessel_j(int n, double x);

/// J_0(x) .. J_{n_max}(x) in one pass.
std::vector<double> bessel_j_all(int n_max, double x);

/// J_n(x) / ((x/2)^n / n!), the ascending series normalized by its leading
/// term. Well conditioned for small x where J_n itself underflows.
double bessel_j_scaled_series(int n, double x);

}  // namespace tomo
