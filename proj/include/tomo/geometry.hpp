#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace tomo {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double k, Point a) { return {k * a.x, k * a.y}; }
inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }

/// Disk region. Rays are parametrized relative to the world origin; a
/// centered disk (the usual case) makes u and s the disk-relative offsets.
struct Domain {
    Point center;
    double radius = 1.0;

    /// Throws InvalidArgument unless radius > 0 and finite.
    void validate() const;
    bool contains(Point p) const { return norm(p - center) < radius; }
};

/// x(s) = u * perp + s * dir with dir = (cos phi, sin phi), perp = (-sin phi, cos phi).
struct Ray {
    double phi = 0.0;
    double u = 0.0;

    Point dir() const { return {std::cos(phi), std::sin(phi)}; }
    Point perp() const { return {-std::sin(phi), std::cos(phi)}; }
    Point at(double s) const { return u * perp() + s * dir(); }
};

/// Regular sample lattice. Sample (i, j) sits at origin + (i*dx, j*dy) and is
/// stored at values[j*nx + i].
struct Grid2D {
    std::size_t nx = 0;
    std::size_t ny = 0;
    double dx = 1.0;
    double dy = 1.0;
    Point origin;
    std::vector<double> values;

    Grid2D() = default;
    Grid2D(std::size_t nx, std::size_t ny, double dx, double dy, Point origin, double fill = 0.0);

    /// Square grid of n*n samples covering [c - r, c + r]^2 with pixel centres
    /// at c + (i - n/2) * (2r/n); for even n the centre c is itself a sample.
    static Grid2D centered(std::size_t n, double half_width, Point center = {});

    double& at(std::size_t i, std::size_t j) { return values[j * nx + i]; }
    double at(std::size_t i, std::size_t j) const { return values[j * nx + i]; }
    Point position(std::size_t i, std::size_t j) const {
        return {origin.x + static_cast<double>(i) * dx, origin.y + static_cast<double>(j) * dy};
    }

    /// Throws InvalidArgument on bad shape, NonFiniteValue on NaN/inf values.
    void validate() const;

    /// Bilinear interpolation; the lattice is extended by zeros outside.
    double sample(Point p) const;
};

/// Exit coordinate s of the ray leaving the disk. For a centred disk this is
/// sqrt(r^2 - u^2). Throws NoIntersection when the ray misses.
double exit_parameter(const Domain& domain, const Ray& ray);

/// Entry coordinate (the other chord end).
double entry_parameter(const Domain& domain, const Ray& ray);

/// Chord length 2*sqrt(r^2 - u^2); zero when the ray misses or is tangent.
double chord_length(const Domain& domain, const Ray& ray);

/// Composite trapezoid integral of grid along the ray for s in [s0, s1].
/// The node count is ceil((s1 - s0) / step) + 1 so the effective step never
/// exceeds `step`.
double line_integral(const Grid2D& grid, const Ray& ray, double s0, double s1, double step);

/// Uniform samples of the grid on the nodes of [s0, s1] used by line_integral.
std::vector<double> sample_along(const Grid2D& grid, const Ray& ray, double s0, double s1,
                                 std::size_t intervals);

/// Number of trapezoid intervals for a segment of the given length.
std::size_t interval_count(double length, double step);

/// Trapezoid rule on uniformly spaced samples.
double trapezoid(const std::vector<double>& samples, double h);

/// Default quadrature step, min(dx, dy) / 2.
double default_step(const Grid2D& grid);

}  // namespace tomo
