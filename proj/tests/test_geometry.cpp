#include <doctest.h>

#include <cmath>
#include <random>

#include "tomo/error.hpp"
#include "tomo/geometry.hpp"

using namespace tomo;

namespace {

Grid2D field(std::size_t n, double half, double (*f)(Point)) {
    Grid2D g = Grid2D::centered(n, half);
    for (std::size_t j = 0; j < g.ny; ++j)
        for (std::size_t i = 0; i < g.nx; ++i) g.at(i, j) = f(g.position(i, j));
    return g;
}

}  // namespace

TEST_CASE("exit parameter of the unit disk") {
    const Domain d{{0, 0}, 1.0};
    CHECK(exit_parameter(d, {0.0, 0.0}) == doctest::Approx(1.0));
    CHECK(exit_parameter(d, {0.3, 0.6}) == doctest::Approx(0.8));
    CHECK(entry_parameter(d, {0.3, 0.6}) == doctest::Approx(-0.8));
    CHECK_THROWS_AS(exit_parameter(d, {0.0, 1.2}), NoIntersection);
}

TEST_CASE("chord length") {
    const Domain d{{0, 0}, 1.0};
    CHECK(chord_length(d, {1.0, 0.0}) == doctest::Approx(2.0));
    CHECK(chord_length(d, {1.0, 0.6}) == doctest::Approx(1.6));
    CHECK(chord_length(d, {1.0, 1.0}) == 0.0);
    CHECK(chord_length(d, {1.0, -1.5}) == 0.0);
}

TEST_CASE("off-centre disk") {
    const Domain d{{0.3, -0.2}, 0.5};
    const Ray r{0.0, -0.2};  // horizontal line through the centre
    CHECK(exit_parameter(d, r) == doctest::Approx(0.8));
    CHECK(entry_parameter(d, r) == doctest::Approx(-0.2));
}

TEST_CASE("chord is twice the exit parameter for a centred disk") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> phi(0.0, 6.283), u(-0.999, 0.999);
    const Domain d{{0, 0}, 1.0};
    for (int k = 0; k < 200; ++k) {
        const Ray r{phi(rng), u(rng)};
        CHECK(chord_length(d, r) == doctest::Approx(2.0 * exit_parameter(d, r)).epsilon(1e-14));
        CHECK(norm(r.at(exit_parameter(d, r))) == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("line integral of constant and zero grids") {
    Grid2D c = Grid2D::centered(32, 2.0);
    for (double& v : c.values) v = 0.7;
    CHECK(std::abs(line_integral(c, {0.4, 0.3}, -1.1, 0.9, 0.05) - 0.7 * 2.0) < 1e-12);
    const Grid2D z = Grid2D::centered(32, 2.0);
    CHECK(line_integral(z, {0.4, 0.3}, -1.1, 0.9, 0.05) == 0.0);
}

TEST_CASE("line integral of a linear field along x") {
    const Grid2D g = field(64, 2.0, [](Point p) { return 3.0 * p.x; });
    CHECK(line_integral(g, {0.0, 0.0}, 0.0, 1.0, 0.01) == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("bilinear sampling is exact for bilinear fields and zero outside") {
    const Grid2D g = field(16, 1.0, [](Point p) { return 1.0 + 2.0 * p.x - p.y + 0.5 * p.x * p.y; });
    const Point q{0.123, -0.456};
    CHECK(g.sample(q) == doctest::Approx(1.0 + 2.0 * q.x - q.y + 0.5 * q.x * q.y).epsilon(1e-13));
    CHECK(g.sample({5.0, 0.0}) == 0.0);
}

TEST_CASE("line integral is additive over concatenated segments") {
    const Grid2D g = field(128, 1.5, [](Point p) { return std::exp(-p.x * p.x - 2 * p.y * p.y); });
    const Ray r{0.9, 0.2};
    // Steps chosen so each piece has a whole number of intervals.
    const double whole = line_integral(g, r, -1.0, 1.0, 0.01);
    const double parts = line_integral(g, r, -1.0, 0.25, 0.01) + line_integral(g, r, 0.25, 1.0, 0.01);
    CHECK(parts == doctest::Approx(whole).epsilon(1e-10));
}

TEST_CASE("trapezoid error drops four-fold per halving on a quadratic") {
    // Sampling a quadratic exactly (fine grid, bilinear error controlled by
    // evaluating along a grid line).
    const Grid2D g = field(1601, 2.0, [](Point p) { return p.x * p.x; });
    const Ray r{0.0, 0.0};
    const double exact = 2.0 / 3.0;
    const double e1 = std::abs(line_integral(g, r, -1.0, 1.0, 0.2) - exact);
    const double e2 = std::abs(line_integral(g, r, -1.0, 1.0, 0.1) - exact);
    const double e3 = std::abs(line_integral(g, r, -1.0, 1.0, 0.05) - exact);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
    CHECK(e2 / e3 == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("grid validation") {
    CHECK_THROWS_AS(Grid2D(0, 4, 1.0, 1.0, {}), InvalidArgument);
    CHECK_THROWS_AS(Grid2D(4, 4, -1.0, 1.0, {}), InvalidArgument);
    Grid2D g(4, 4, 1.0, 1.0, {});
    g.at(1, 2) = NAN;
    CHECK_THROWS_AS(g.validate(), NonFiniteValue);
    const Ray r{0.0, 1.5};
    CHECK_THROWS_AS(line_integral(g, r, 0.0, 3.0, 0.1), NonFiniteValue);
}

TEST_CASE("centred grid has the centre on a sample") {
    const Grid2D g = Grid2D::centered(8, 1.0, {0.5, -0.5});
    CHECK(g.position(4, 4).x == doctest::Approx(0.5));
    CHECK(g.position(4, 4).y == doctest::Approx(-0.5));
    CHECK(g.dx == doctest::Approx(0.25));
}

TEST_CASE("interval count never exceeds the step") {
    CHECK(interval_count(1.0, 0.1) == 10);
    CHECK(interval_count(1.0, 0.3) == 4);
    CHECK(interval_count(0.0, 0.1) == 0);
}
