#include <doctest.h>

#include <cmath>

#include "tomo/error.hpp"
#include "tomo/scatter.hpp"

using namespace tomo;

namespace {

Phantom disk_phantom(double mu) {
    Phantom p;
    p.domain = {{0, 0}, 1.0};
    p.emission = Grid2D::centered(64, 1.1);
    p.attenuation_mean = Grid2D::centered(64, 1.1);
    for (std::size_t j = 0; j < 64; ++j)
        for (std::size_t i = 0; i < 64; ++i) {
            const Point x = p.emission.position(i, j);
            p.emission.at(i, j) = norm(x) < 0.5 ? 1.0 : 0.0;
            p.attenuation_mean.at(i, j) = norm(x) < 1.0 ? mu : 0.0;
        }
    return p;
}

}  // namespace

TEST_CASE("angular kernels") {
    CHECK(AngularKernel::isotropic(0.3)(0.7) == 0.3);
    const AngularKernel k = AngularKernel::poly({1.0, 0.5});
    CHECK(k(0.6) == doctest::Approx(1.0 + 0.5 * 0.36));
    CHECK(k.scaled(2.0)(0.6) == doctest::Approx(2.0 * k(0.6)));
    CHECK_NOTHROW(k.validate());
    CHECK_THROWS_AS(AngularKernel::poly({0.2, -1.0}).validate(), InvalidArgument);
}

TEST_CASE("unscattered intensity") {
    const Phantom p = disk_phantom(0.2);
    const Grid2D zero = Grid2D::centered(64, 1.1);
    Phantom empty = p;
    for (double& v : empty.emission.values) v = 0.0;
    CHECK(unscattered_intensity(empty, p.attenuation_mean, {0.3, 0.1}, 0.4, 0.01) == 0.0);

    // Without attenuation the intensity is the partial line integral of f;
    // on the boundary it equals the projection.
    const Point exit{std::cos(0.4), std::sin(0.4)};
    const ChordSamples chord = sample_chord(p, {0.4, 0.0}, 0.01);
    const double at_exit = unscattered_intensity(p, p.attenuation_mean, exit, 0.4, 0.01);
    CHECK(at_exit == doctest::Approx(spect_projection(p, {0.4, 0.0}, chord, {})).epsilon(1e-10));
    const double plain = unscattered_intensity(p, zero, exit, 0.4, 0.01);
    CHECK(plain == doctest::Approx(trapezoid(chord.f, chord.h)).epsilon(1e-10));
}

TEST_CASE("first-order scatter is linear in the kernel amplitude") {
    const Phantom p = disk_phantom(0.2);
    const ScatterKernel k{p.attenuation_mean, AngularKernel::poly({0.05, 0.02})};
    const Point x{0.6, 0.2};
    const double a = first_order_scatter(p, p.attenuation_mean, k, x, 0.3, 0.02, 16);
    const double b = first_order_scatter(p, p.attenuation_mean, {k.density, k.angular.scaled(3.0)}, x, 0.3, 0.02, 16);
    CHECK(b == doctest::Approx(3.0 * a).epsilon(1e-13));
    CHECK(first_order_scatter(p, p.attenuation_mean, {k.density, k.angular.scaled(0.0)}, x, 0.3, 0.02, 16) == 0.0);
    CHECK_THROWS_AS(first_order_scatter(p, p.attenuation_mean, k, x, 0.3, 0.02, 4), InvalidArgument);
}

TEST_CASE("scattered projection") {
    const Phantom p = disk_phantom(0.2);
    const Ray r{0.3, 0.2};
    const ChordSamples chord = sample_chord(p, r, 0.02);
    const double direct = spect_projection(p, r, chord, {});
    const ScatterKernel zero{p.attenuation_mean, AngularKernel::isotropic(0.0)};
    CHECK(scattered_projection(p, p.attenuation_mean, zero, r, 0.02, 16) == direct);
    const ScatterKernel k{p.attenuation_mean, AngularKernel::isotropic(0.05)};
    CHECK(scattered_projection(p, p.attenuation_mean, k, r, 0.02, 16) > direct);
}

TEST_CASE("scatter is invariant under a joint rotation of a radial setup") {
    const Phantom p = disk_phantom(0.2);
    const ScatterKernel k{p.attenuation_mean, AngularKernel::isotropic(0.05)};
    const double phi = 0.3;
    const Point x{0.5 * std::cos(phi) - 0.1 * std::sin(phi), 0.5 * std::sin(phi) + 0.1 * std::cos(phi)};
    const double a = first_order_scatter(p, p.attenuation_mean, k, x, phi, 0.02, 32);
    const double rot = 1.7;
    const Point y{std::cos(rot) * x.x - std::sin(rot) * x.y, std::sin(rot) * x.x + std::cos(rot) * x.y};
    const double b = first_order_scatter(p, p.attenuation_mean, k, y, phi + rot, 0.02, 32);
    CHECK(b == doctest::Approx(a).epsilon(0.01));
}
