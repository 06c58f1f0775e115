#include "tomo/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace tomo::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
    return sum;
}

double dot_diff_scalar(const double* a, const double* x, const double* b, const double* y,
                       std::size_t n) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += a[i] * x[i] - b[i] * y[i];
    return sum;
}

void dot_pair_scalar(const double* c, const double* s, const double* v, std::size_t n,
                     double* re, double* im) {
    double sr = 0.0;
    double si = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sr += c[i] * v[i];
        si += s[i] * v[i];
    }
    *re = sr;
    *im = si;
}

void backproject_scalar(const BackprojectLine& line, double* out, std::size_t n) {
    const auto& q = line.profile;
    if (q.size() < 2) return;
    const double last = static_cast<double>(q.size() - 2);
    const double inv_dt = 1.0 / line.dt;
    for (std::size_t i = 0; i < n; ++i) {
        const double k = static_cast<double>(i);
        double pos = (line.across0 + k * line.across_step - line.t0) * inv_dt;
        pos = std::clamp(pos, 0.0, last + 1.0);
        double cell = std::floor(pos);
        if (cell > last) cell = last;
        const double frac = pos - cell;
        const auto j = static_cast<std::size_t>(cell);
        const double value = q[j] + frac * (q[j + 1] - q[j]);
        const double atten = std::exp(-line.decay * (line.along0 + k * line.along_step));
        out[i] += line.weight * atten * value;
    }
}

}  // namespace

const KernelTable& scalar() {
    static const KernelTable table{"scalar", dot_scalar, dot_diff_scalar, dot_pair_scalar,
                                   backproject_scalar};
    return table;
}

}  // namespace tomo::kernels
