#include <doctest.h>

#include <cmath>

#include "tomo/bessel.hpp"

using namespace tomo;

TEST_CASE("values at zero") {
    CHECK(bessel_j(0, 0.0) == 1.0);
    for (int n = 1; n < 10; ++n) CHECK(bessel_j(n, 0.0) == 0.0);
}

TEST_CASE("small-argument behaviour of J1") {
    for (double x : {1e-1, 1e-2, 1e-3}) {
        const double d = bessel_j(1, x) - 0.5 * x;
        CHECK(std::abs(d) <= x * x * x / 16.0 * 1.01);
    }
}

TEST_CASE("agreement with the standard library over a lattice") {
    double worst = 0.0;
    for (int n = 0; n <= 64; n += 1)
        for (double x = 0.0; x <= 200.0; x += (x < 30.0 ? 0.137 : 1.731)) {
            const double ref = std::cyl_bessel_j(static_cast<double>(n), x);
            worst = std::max(worst, std::abs(bessel_j(n, x) - ref));
        }
    CHECK(worst < 1e-10);
}

TEST_CASE("large arguments") {
    for (double x : {250.0, 511.3, 999.9})
        for (int n : {0, 1, 2, 7, 30}) CHECK(std::abs(bessel_j(n, x) - std::cyl_bessel_j(n, x)) < 1e-10);
}

TEST_CASE("three-term recurrence holds") {
    double worst = 0.0;
    for (int n = 1; n < 40; ++n)
        for (double x = 0.5; x < 80.0; x += 0.77)
            worst = std::max(worst, std::abs(bessel_j(n - 1, x) + bessel_j(n + 1, x) - 2.0 * n / x * bessel_j(n, x)));
    CHECK(worst < 1e-9);
}

TEST_CASE("all orders in one pass") {
    for (double x : {0.3, 4.2, 31.0, 120.0}) {
        const auto all = bessel_j_all(40, x);
        REQUIRE(all.size() == 41);
        for (int n = 0; n <= 40; ++n) CHECK(std::abs(all[n] - bessel_j(n, x)) < 1e-12);
    }
}

TEST_CASE("normalized ascending series") {
    for (int n : {0, 3, 20, 60}) {
        CHECK(bessel_j_scaled_series(n, 0.0) == 1.0);
        const double x = 0.7;
        double lead = 1.0;
        for (int k = 1; k <= n; ++k) lead *= 0.5 * x / k;
        CHECK(bessel_j_scaled_series(n, x) * lead == doctest::Approx(std::cyl_bessel_j(n, x)).epsilon(1e-13));
    }
}
