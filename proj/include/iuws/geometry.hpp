#pragma once

// Model surfaces: the Euclidean plane and the hyperbolic plane of curvature -1
// in the Poincare disk chart. Everything here is pure and reentrant.

#include <complex>
#include <string>

namespace iuws {

enum class SurfaceKind { euclidean, hyperbolic };

struct ModelSurface {
    SurfaceKind kind = SurfaceKind::euclidean;

    static ModelSurface euclidean() { return {SurfaceKind::euclidean}; }
    static ModelSurface hyperbolic() { return {SurfaceKind::hyperbolic}; }

    /// Sectional curvature: exactly 0 or exactly -1.
    double curvature() const { return kind == SurfaceKind::hyperbolic ? -1.0 : 0.0; }
    bool is_hyperbolic() const { return kind == SurfaceKind::hyperbolic; }

    bool operator==(const ModelSurface&) const = default;
};

const char* to_string(SurfaceKind kind);
SurfaceKind surface_kind_from_string(const std::string& name);

/// Chart coordinates.
struct Point {
    double u = 0.0;
    double v = 0.0;

    bool operator==(const Point&) const = default;
};

inline std::complex<double> to_complex(Point p) { return {p.u, p.v}; }
inline Point to_point(std::complex<double> z) { return {z.real(), z.imag()}; }

/// True when p is a legal chart point for s (always on the plane, |p| < 1 on the disk).
bool in_chart(const ModelSurface& s, Point p);

/// Throws ErrorKind::invalid_point when p is not a chart point.
void require_chart_point(const ModelSurface& s, Point p);

/// Geodesic distance.
double dist(const ModelSurface& s, Point p, Point q);

/// Area density of the Riemannian measure with respect to chart Lebesgue measure.
double conformal_weight(const ModelSurface& s, Point p);

/// Unchecked variant of conformal_weight for inner loops.
inline double conformal_weight_unchecked(const ModelSurface& s, double u, double v)
{
    if (!s.is_hyperbolic()) return 1.0;
    const double a = 1.0 - (u * u + v * v);
    return 4.0 / (a * a);
}

/// Area of a geodesic ball of radius r.
double ball_volume(const ModelSurface& s, double r);

/// Chart radius of the geodesic ball of radius r centred at the chart origin.
double geodesic_to_chart_radius(const ModelSurface& s, double r);

/// Inverse of geodesic_to_chart_radius.
double chart_to_geodesic_radius(const ModelSurface& s, double rho);

/// Disk automorphism z -> (z - a) / (1 - conj(a) z); sends a to the origin.
Point mobius_to_origin(Point a, Point z);

/// Inverse of mobius_to_origin(a, .): sends the origin back to a.
Point mobius_from_origin(Point a, Point w);

/// Rotation of the chart by angle theta (an isometry of both surfaces).
Point rotate(Point p, double theta);

/// Euclidean image of a geodesic ball in the chart: a chart disk.
struct ChartDisk {
    Point center;
    double radius = 0.0;
};

/// Chart disk occupied by the geodesic ball B(c, r). For the hyperbolic surface
/// the ball is moved to the origin, converted to a chart radius and mapped back.
ChartDisk chart_disk(const ModelSurface& s, Point c, double r);

}  // namespace iuws
