#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "tomo/kernels.hpp"

using namespace tomo::kernels;

namespace {

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    std::vector<double> v(n);
    for (double& x : v) x = d(rng);
    return v;
}

}  // namespace

TEST_CASE("active table honours the environment") {
    const KernelTable& t = active();
    CHECK((t.name == "scalar" || t.name == "avx2"));
    CHECK(scalar().name == "scalar");
}

TEST_CASE("AVX2 kernels match the scalar reference") {
    const KernelTable* simd = avx2();
    if (!simd) {
        MESSAGE("AVX2 kernels unavailable on this machine; equivalence not exercised");
        return;
    }
    const KernelTable& ref = scalar();
    std::mt19937_64 rng(17);
    for (std::size_t n : {0, 1, 3, 4, 7, 8, 9, 31, 64, 65, 257, 1000}) {
        const auto a = random_vector(n, rng), b = random_vector(n, rng), c = random_vector(n, rng),
                   d = random_vector(n, rng);
        double bound = 0.0;
        for (std::size_t i = 0; i < n; ++i) bound += std::abs(a[i] * b[i]) + std::abs(c[i] * d[i]);
        const double tol = 1e-15 * (bound + 1.0) * 4.0;

        CHECK(std::abs(simd->dot(a.data(), b.data(), n) - ref.dot(a.data(), b.data(), n)) <= tol);
        CHECK(std::abs(simd->dot_diff(a.data(), b.data(), c.data(), d.data(), n) -
                       ref.dot_diff(a.data(), b.data(), c.data(), d.data(), n)) <= tol);
        double r1 = 0, i1 = 0, r2 = 0, i2 = 0;
        simd->dot_pair(a.data(), c.data(), b.data(), n, &r1, &i1);
        ref.dot_pair(a.data(), c.data(), b.data(), n, &r2, &i2);
        CHECK(std::abs(r1 - r2) <= tol);
        CHECK(std::abs(i1 - i2) <= tol);
    }
}

TEST_CASE("AVX2 back projection matches the scalar reference") {
    const KernelTable* simd = avx2();
    if (!simd) return;
    const KernelTable& ref = scalar();
    std::mt19937_64 rng(5);
    const auto profile = random_vector(500, rng);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        for (std::size_t n : {1, 5, 63, 64, 130, 256}) {
            BackprojectLine line;
            line.profile = profile;
            line.t0 = -1.2;
            line.dt = 0.005;
            line.along0 = u(rng);
            line.along_step = 0.01 * u(rng);
            line.across0 = 1.3 * u(rng);  // some rows run off both ends of the profile
            line.across_step = 0.02 * u(rng);
            line.decay = 0.5 * (u(rng) + 1.0);
            line.weight = 0.3;
            std::vector<double> out1 = random_vector(n, rng);
            std::vector<double> out2 = out1;
            simd->backproject(line, out1.data(), n);
            ref.backproject(line, out2.data(), n);
            for (std::size_t i = 0; i < n; ++i) CHECK(out1[i] == doctest::Approx(out2[i]).epsilon(1e-13).scale(1.0));
        }
    }
}

TEST_CASE("scalar back projection against a direct formula") {
    const std::vector<double> profile{0.0, 1.0, 4.0, 9.0};
    BackprojectLine line;
    line.profile = profile;
    line.t0 = 0.0;
    line.dt = 1.0;
    line.across0 = 0.5;
    line.across_step = 1.0;
    line.along0 = 0.2;
    line.along_step = 0.1;
    line.decay = 0.7;
    line.weight = 2.0;
    std::vector<double> out(5, 1.0);
    scalar().backproject(line, out.data(), out.size());
    const double lerp[5] = {0.5, 2.5, 6.5, 9.0, 9.0};
    for (std::size_t i = 0; i < 5; ++i)
        CHECK(out[i] == doctest::Approx(1.0 + 2.0 * std::exp(-0.7 * (0.2 + 0.1 * i)) * lerp[i]));
}
