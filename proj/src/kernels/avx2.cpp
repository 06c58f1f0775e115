#include "tomo/kernels.hpp"

#include <immintrin.h>

#include <cmath>

namespace tomo::kernels {
namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    double sum = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) sum += a[i] * b[i];
    return sum;
}

double dot_diff_avx2(const double* a, const double* x, const double* b, const double* y,
                     std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(x + i), acc);
        acc = _mm256_fnmadd_pd(_mm256_loadu_pd(b + i), _mm256_loadu_pd(y + i), acc);
    }
    double sum = hsum(acc);
    for (; i < n; ++i) sum += a[i] * x[i] - b[i] * y[i];
    return sum;
}

void dot_pair_avx2(const double* c, const double* s, const double* v, std::size_t n, double* re,
                   double* im) {
    __m256d ar = _mm256_setzero_pd();
    __m256d ai = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vv = _mm256_loadu_pd(v + i);
        ar = _mm256_fmadd_pd(_mm256_loadu_pd(c + i), vv, ar);
        ai = _mm256_fmadd_pd(_mm256_loadu_pd(s + i), vv, ai);
    }
    double sr = hsum(ar);
    double si = hsum(ai);
    for (; i < n; ++i) {
        sr += c[i] * v[i];
        si += s[i] * v[i];
    }
    *re = sr;
    *im = si;
}

// Attenuation along the row is a geometric sequence; it is re-anchored with
// std::exp every block to keep the drift from repeated products negligible.
constexpr std::size_t kResync = 64;

void backproject_avx2(const BackprojectLine& line, double* out, std::size_t n) {
    const auto& q = line.profile;
    if (q.size() < 2) return;
    const double last = static_cast<double>(q.size() - 2);
    const double inv_dt = 1.0 / line.dt;
    const double* qd = q.data();

    const __m256d lane = _mm256_set_pd(3.0, 2.0, 1.0, 0.0);
    const __m256d vzero = _mm256_setzero_pd();
    const __m256d vmax = _mm256_set1_pd(last + 1.0);
    const __m256d vlast = _mm256_set1_pd(last);
    const __m256d vweight = _mm256_set1_pd(line.weight);
    const double ratio = std::exp(-line.decay * line.along_step);
    const __m256d vratio4 = _mm256_set1_pd(ratio * ratio * ratio * ratio);
    const __m256d lane_ratio = _mm256_set_pd(ratio * ratio * ratio, ratio * ratio, ratio, 1.0);

    std::size_t i = 0;
    __m256d atten = vzero;
    for (; i + 4 <= n; i += 4) {
        if (i % kResync == 0) {
            const double a0 =
                std::exp(-line.decay * (line.along0 + static_cast<double>(i) * line.along_step));
            atten = _mm256_mul_pd(_mm256_set1_pd(a0), lane_ratio);
        }
        const __m256d k = _mm256_add_pd(_mm256_set1_pd(static_cast<double>(i)), lane);
        __m256d pos = _mm256_fmadd_pd(k, _mm256_set1_pd(line.across_step),
                                      _mm256_set1_pd(line.across0 - line.t0));
        pos = _mm256_mul_pd(pos, _mm256_set1_pd(inv_dt));
        pos = _mm256_min_pd(_mm256_max_pd(pos, vzero), vmax);
        const __m256d cell = _mm256_min_pd(_mm256_floor_pd(pos), vlast);
        const __m256d frac = _mm256_sub_pd(pos, cell);
        const __m128i idx = _mm256_cvttpd_epi32(cell);
        const __m256d q0 = _mm256_i32gather_pd(qd, idx, 8);
        const __m256d q1 = _mm256_i32gather_pd(qd + 1, idx, 8);
        const __m256d value = _mm256_fmadd_pd(frac, _mm256_sub_pd(q1, q0), q0);
        const __m256d contrib = _mm256_mul_pd(_mm256_mul_pd(vweight, atten), value);
        _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(out + i), contrib));
        atten = _mm256_mul_pd(atten, vratio4);
    }
    for (; i < n; ++i) {
        const double k = static_cast<double>(i);
        double pos = (line.across0 + k * line.across_step - line.t0) * inv_dt;
        pos = pos < 0.0 ? 0.0 : (pos > last + 1.0 ? last + 1.0 : pos);
        double cell = std::floor(pos);
        if (cell > last) cell = last;
        const double frac = pos - cell;
        const auto j = static_cast<std::size_t>(cell);
        const double value = qd[j] + frac * (qd[j + 1] - qd[j]);
        out[i] += line.weight * std::exp(-line.decay * (line.along0 + k * line.along_step)) * value;
    }
}

}  // namespace

const KernelTable& avx2_table() {
    static const KernelTable table{"avx2", dot_avx2, dot_diff_avx2, dot_pair_avx2,
                                   backproject_avx2};
    return table;
}

}  // namespace tomo::kernels
