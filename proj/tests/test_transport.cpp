#include <doctest.h>

#include <cmath>

#include "tomo/transport.hpp"

using namespace tomo;

namespace {

const Field gaussian = [](Point p) {
    const double dx = p.x - 0.1, dy = p.y + 0.05;
    return std::exp(-0.5 * (dx * dx + dy * dy) / (0.25 * 0.25));
};
const Field half = [](Point) { return 0.5; };
const Domain unit{{0, 0}, 1.0};

}  // namespace

TEST_CASE("zero source gives zero intensity and residual") {
    const Field zero = [](Point) { return 0.0; };
    const auto r = transport_residual(zero, half, unit, {0.2, 1.0}, 0.3, 0.02);
    CHECK(r.max_norm == 0.0);
    for (double v : r.mean_intensity.values) CHECK(v == 0.0);
}

TEST_CASE("noise-free residual is first order") {
    const double a = transport_residual(gaussian, half, unit, {0.0, 1.0}, 0.4, 0.02).max_norm;
    const double b = transport_residual(gaussian, half, unit, {0.0, 1.0}, 0.4, 0.01).max_norm;
    CHECK(a / b == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("averaged residual halves with the step") {
    const ColoredNoise noise{0.2, 1.0};
    double prev = transport_residual(gaussian, half, unit, noise, 0.4, 0.04).max_norm;
    for (double step : {0.02, 0.01, 0.005}) {
        const double cur = transport_residual(gaussian, half, unit, noise, 0.4, step).max_norm;
        CHECK(prev / cur >= 1.8);
        CHECK(prev / cur <= 2.2);
        prev = cur;
    }
}

TEST_CASE("literal closure leaves a floor above the exact closure") {
    const ColoredNoise noise{0.2, 1.0};
    TransportOptions lit;
    lit.closure = Closure::Literal;
    const double exact = transport_residual(gaussian, half, unit, noise, 0.4, 0.0025).max_norm;
    const double literal = transport_residual(gaussian, half, unit, noise, 0.4, 0.0025, lit).max_norm;
    CHECK(literal > 2.0 * exact);
}

TEST_CASE("mean intensity is direction covariant for a radial setup") {
    const Field radial = [](Point p) { return std::exp(-4.0 * (p.x * p.x + p.y * p.y)); };
    const ColoredNoise noise{0.1, 2.0};
    const auto a = transport_residual(radial, half, unit, noise, 0.0, 0.02);
    const auto b = transport_residual(radial, half, unit, noise, 1.3, 0.02);
    CHECK(a.max_norm == doctest::Approx(b.max_norm).epsilon(1e-9));
}

TEST_CASE("phantom overload matches the field version on smooth grids") {
    Phantom p;
    p.domain = unit;
    // The lines sweep the square [-1, 1]^2, so the grids must reach its corners.
    p.emission = Grid2D::centered(512, 1.5);
    p.attenuation_mean = Grid2D::centered(512, 1.5);
    for (std::size_t j = 0; j < 512; ++j)
        for (std::size_t i = 0; i < 512; ++i) {
            p.emission.at(i, j) = gaussian(p.emission.position(i, j));
            p.attenuation_mean.at(i, j) = 0.5;
        }
    const ColoredNoise noise{0.2, 1.0};
    const auto g = transport_residual(p, noise, 0.4, 0.02);
    const auto f = transport_residual(gaussian, half, unit, noise, 0.4, 0.02);
    double worst = 0.0;
    for (std::size_t k = 0; k < g.mean_intensity.values.size(); ++k)
        worst = std::max(worst, std::abs(g.mean_intensity.values[k] - f.mean_intensity.values[k]));
    CHECK(worst < 1e-3);
}
