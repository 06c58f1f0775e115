#pragma once

// Data-parallel inner loops shared by the projectors and the reconstruction.
//
// Every kernel has a scalar reference implementation. An AVX2+FMA variant is
// compiled in a separate translation unit and picked at runtime when the CPU
// supports it. The environment variable TOMO_SIMD=scalar|avx2|auto overrides
// the choice (auto is the default).

#include <cstddef>
#include <span>
#include <string_view>

namespace tomo::kernels {

/// One row of back projection: points x_i = start + i * step for
/// i in [0, out.size()), accumulating
///   out[i] += weight * exp(-decay * (along0 + i * along_step))
///             * lerp(profile, (across0 + i * across_step - t0) / dt).
/// Positions falling outside the profile are clamped to its end samples.
struct BackprojectLine {
    std::span<const double> profile;
    double t0 = 0.0;
    double dt = 1.0;
    double along0 = 0.0;
    double along_step = 0.0;
    double across0 = 0.0;
    double across_step = 0.0;
    double decay = 0.0;
    double weight = 1.0;
};

struct KernelTable {
    std::string_view name;
    /// sum_i a[i] * b[i]
    double (*dot)(const double* a, const double* b, std::size_t n);
    /// sum_i a[i] * x[i] - b[i] * y[i]
    double (*dot_diff)(const double* a, const double* x, const double* b, const double* y,
                       std::size_t n);
    /// re = sum_i c[i] * v[i], im = sum_i s[i] * v[i]
    void (*dot_pair)(const double* c, const double* s, const double* v, std::size_t n,
                     double* re, double* im);
    void (*backproject)(const BackprojectLine& line, double* out, std::size_t n);
};

const KernelTable& scalar();

/// nullptr when the AVX2 variant is not compiled in or the CPU lacks AVX2/FMA.
const KernelTable* avx2();

/// The table selected for this process (honours TOMO_SIMD).
const KernelTable& active();

inline double dot(std::span<const double> a, std::span<const double> b) {
    return active().dot(a.data(), b.data(), a.size());
}

}  // namespace tomo::kernels
