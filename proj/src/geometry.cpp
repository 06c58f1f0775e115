#include "tomo/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tomo/error.hpp"

namespace tomo {

void Domain::validate() const {
    if (!(radius > 0.0) || !std::isfinite(radius))
        throw InvalidArgument("domain radius must be positive, got " + std::to_string(radius));
}

Grid2D::Grid2D(std::size_t nx_, std::size_t ny_, double dx_, double dy_, Point origin_, double fill)
    : nx(nx_), ny(ny_), dx(dx_), dy(dy_), origin(origin_), values(nx_ * ny_, fill) {
    validate();
}

Grid2D Grid2D::centered(std::size_t n, double half_width, Point center) {
    if (n == 0 || !(half_width > 0.0)) throw InvalidArgument("centered grid needs n >= 1 and width > 0");
    const double d = 2.0 * half_width / static_cast<double>(n);
    const double offset = static_cast<double>(n / 2) * d;
    return Grid2D(n, n, d, d, {center.x - offset, center.y - offset});
}

void Grid2D::validate() const {
    if (nx < 1 || ny < 1) throw InvalidArgument("grid needs nx, ny >= 1");
    if (!(dx > 0.0) || !(dy > 0.0)) throw InvalidArgument("grid spacing must be positive");
    if (values.size() != nx * ny) throw InvalidArgument("grid value count does not match nx*ny");
    for (double v : values)
        if (!std::isfinite(v)) throw NonFiniteValue("grid contains a non-finite value");
}

double Grid2D::sample(Point p) const {
    const double fx = (p.x - origin.x) / dx;
    const double fy = (p.y - origin.y) / dy;
    const double cx = std::floor(fx);
    const double cy = std::floor(fy);
    if (cx < -1.0 || cy < -1.0 || cx > static_cast<double>(nx) - 1.0 ||
        cy > static_cast<double>(ny) - 1.0)
        return 0.0;
    const auto i0 = static_cast<long>(cx);
    const auto j0 = static_cast<long>(cy);
    const double tx = fx - cx;
    const double ty = fy - cy;
    auto v = [&](long i, long j) -> double {
        if (i < 0 || j < 0 || i >= static_cast<long>(nx) || j >= static_cast<long>(ny)) return 0.0;
        return values[static_cast<std::size_t>(j) * nx + static_cast<std::size_t>(i)];
    };
    return (1.0 - ty) * ((1.0 - tx) * v(i0, j0) + tx * v(i0 + 1, j0)) +
           ty * ((1.0 - tx) * v(i0, j0 + 1) + tx * v(i0 + 1, j0 + 1));
}

namespace {

// Half chord and the s-coordinate of the chord midpoint; half < 0 on a miss.
void chord(const Domain& domain, const Ray& ray, double& mid, double& half) {
    const double u_rel = ray.u - dot(domain.center, ray.perp());
    mid = dot(domain.center, ray.dir());
    const double d2 = domain.radius * domain.radius - u_rel * u_rel;
    half = d2 >= 0.0 ? std::sqrt(d2) : -1.0;
}

}  // namespace

double exit_parameter(const Domain& domain, const Ray& ray) {
    double mid = 0.0;
    double half = 0.0;
    chord(domain, ray, mid, half);
    if (half < 0.0)
        throw NoIntersection("ray with offset " + std::to_string(ray.u) + " misses the domain");
    return mid + half;
}

double entry_parameter(const Domain& domain, const Ray& ray) {
    double mid = 0.0;
    double half = 0.0;
    chord(domain, ray, mid, half);
    if (half < 0.0)
        throw NoIntersection("ray with offset " + std::to_string(ray.u) + " misses the domain");
    return mid - half;
}

double chord_length(const Domain& domain, const Ray& ray) {
    double mid = 0.0;
    double half = 0.0;
    chord(domain, ray, mid, half);
    return half > 0.0 ? 2.0 * half : 0.0;
}

std::size_t interval_count(double length, double step) {
    if (!(step > 0.0)) throw InvalidArgument("quadrature step must be positive");
    if (length <= 0.0) return 0;
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(length / step - 1e-9)));
}

std::vector<double> sample_along(const Grid2D& grid, const Ray& ray, double s0, double s1,
                                 std::size_t intervals) {
    std::vector<double> out(intervals + 1);
    const double h = intervals ? (s1 - s0) / static_cast<double>(intervals) : 0.0;
    for (std::size_t k = 0; k <= intervals; ++k) {
        const double v = grid.sample(ray.at(s0 + static_cast<double>(k) * h));
        if (!std::isfinite(v)) throw NonFiniteValue("non-finite field sample on ray");
        out[k] = v;
    }
    return out;
}

double trapezoid(const std::vector<double>& samples, double h) {
    if (samples.size() < 2) return 0.0;
    double sum = 0.5 * (samples.front() + samples.back());
    for (std::size_t k = 1; k + 1 < samples.size(); ++k) sum += samples[k];
    return sum * h;
}

double line_integral(const Grid2D& grid, const Ray& ray, double s0, double s1, double step) {
    if (s1 < s0) throw InvalidArgument("line_integral needs s0 <= s1");
    const std::size_t n = interval_count(s1 - s0, step);
    if (n == 0) return 0.0;
    return trapezoid(sample_along(grid, ray, s0, s1, n), (s1 - s0) / static_cast<double>(n));
}

double default_step(const Grid2D& grid) { return 0.5 * std::min(grid.dx, grid.dy); }

}  // namespace tomo
