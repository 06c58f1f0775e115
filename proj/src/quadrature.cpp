#include "tomo/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "tomo/error.hpp"

namespace tomo {

std::vector<double> simpson_weights(std::size_t n_nodes, double a, double b) {
    if (n_nodes < 3 || n_nodes % 2 == 0) throw InvalidArgument("Simpson needs an odd node count >= 3");
    const double h = (b - a) / static_cast<double>(n_nodes - 1);
    std::vector<double> w(n_nodes);
    for (std::size_t i = 0; i < n_nodes; ++i)
        w[i] = (i == 0 || i + 1 == n_nodes) ? h / 3.0 : (i % 2 ? 4.0 * h / 3.0 : 2.0 * h / 3.0);
    return w;
}

QuadResult simpson_refine(const std::function<double(double)>& f, double a, double b,
                          std::size_t intervals, double rel_tol, double abs_tol,
                          std::size_t max_intervals) {
    QuadResult r;
    if (b == a) {
        r.converged = true;
        return r;
    }
    std::size_t n = std::max<std::size_t>(2, intervals + intervals % 2);
    double h = (b - a) / static_cast<double>(n);
    // Simpson = h/3 (ends + 4 odd + 2 even); on refinement all old nodes become even.
    const double ends = f(a) + f(b);
    double even = 0.0;
    double odd = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        const double v = f(a + static_cast<double>(i) * h);
        (i % 2 ? odd : even) += v;
    }
    r.evaluations = n + 1;
    double s = h / 3.0 * (ends + 4.0 * odd + 2.0 * even);
    while (2 * n <= max_intervals) {
        even += odd;
        odd = 0.0;
        n *= 2;
        h *= 0.5;
        for (std::size_t i = 1; i < n; i += 2) odd += f(a + static_cast<double>(i) * h);
        r.evaluations += n / 2;
        const double s_new = h / 3.0 * (ends + 4.0 * odd + 2.0 * even);
        r.error = std::abs(s_new - s) / 15.0;
        s = s_new;
        if (r.error <= abs_tol + rel_tol * std::abs(s)) {
            r.converged = true;
            break;
        }
    }
    r.value = s;
    return r;
}

}  // namespace tomo
