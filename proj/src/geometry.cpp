#include "iuws/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "iuws/error.hpp"

namespace iuws {

const char* to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::invalid_point: return "invalid-point";
    case ErrorKind::domain_error: return "domain-error";
    case ErrorKind::empty_domain: return "empty-domain";
    case ErrorKind::geometry_overflow: return "geometry-overflow";
    case ErrorKind::invalid_pole: return "invalid-pole";
    case ErrorKind::degenerate_target: return "degenerate-target";
    case ErrorKind::degenerate_input: return "degenerate-input";
    case ErrorKind::invalid_start: return "invalid-start";
    case ErrorKind::validation: return "validation";
    case ErrorKind::no_convergence: return "no-convergence";
    }
    return "unknown";
}

const char* to_string(SurfaceKind kind)
{
    return kind == SurfaceKind::hyperbolic ? "hyperbolic" : "euclidean";
}

SurfaceKind surface_kind_from_string(const std::string& name)
{
    if (name == "euclidean") return SurfaceKind::euclidean;
    if (name == "hyperbolic") return SurfaceKind::hyperbolic;
    throw Error(ErrorKind::validation, "unknown surface '" + name + "'");
}

bool in_chart(const ModelSurface& s, Point p)
{
    if (!std::isfinite(p.u) || !std::isfinite(p.v)) return false;
    if (!s.is_hyperbolic()) return true;
    return p.u * p.u + p.v * p.v < 1.0;
}

void require_chart_point(const ModelSurface& s, Point p)
{
    if (!in_chart(s, p)) {
        throw Error(ErrorKind::invalid_point,
                    "point (" + std::to_string(p.u) + ", " + std::to_string(p.v) +
                        ") is outside the " + to_string(s.kind) + " chart");
    }
}

double dist(const ModelSurface& s, Point p, Point q)
{
    require_chart_point(s, p);
    require_chart_point(s, q);
    const double du = p.u - q.u;
    const double dv = p.v - q.v;
    const double chord = std::hypot(du, dv);
    if (!s.is_hyperbolic()) return chord;
    if (chord == 0.0) return 0.0;
    // |1 - p conj(q)|
    const double re = 1.0 - (p.u * q.u + p.v * q.v);
    const double im = -(p.v * q.u - p.u * q.v);
    const double ratio = chord / std::hypot(re, im);
    return 2.0 * std::atanh(std::min(ratio, 1.0 - 1e-16));
}

double conformal_weight(const ModelSurface& s, Point p)
{
    require_chart_point(s, p);
    return conformal_weight_unchecked(s, p.u, p.v);
}

double ball_volume(const ModelSurface& s, double r)
{
    if (!(r >= 0.0)) throw Error(ErrorKind::domain_error, "ball radius must be nonnegative");
    if (!s.is_hyperbolic()) return std::numbers::pi * r * r;
    // 2 pi (cosh r - 1) written as 4 pi sinh^2(r/2) to keep small radii accurate
    const double sh = std::sinh(0.5 * r);
    return 4.0 * std::numbers::pi * sh * sh;
}

double geodesic_to_chart_radius(const ModelSurface& s, double r)
{
    if (!(r >= 0.0)) throw Error(ErrorKind::domain_error, "geodesic radius must be nonnegative");
    return s.is_hyperbolic() ? std::tanh(0.5 * r) : r;
}

double chart_to_geodesic_radius(const ModelSurface& s, double rho)
{
    if (!(rho >= 0.0)) throw Error(ErrorKind::domain_error, "chart radius must be nonnegative");
    if (!s.is_hyperbolic()) return rho;
    if (rho >= 1.0) throw Error(ErrorKind::invalid_point, "chart radius must be below 1");
    return 2.0 * std::atanh(rho);
}

Point mobius_to_origin(Point a, Point z)
{
    const std::complex<double> ca = to_complex(a);
    const std::complex<double> cz = to_complex(z);
    return to_point((cz - ca) / (1.0 - std::conj(ca) * cz));
}

Point mobius_from_origin(Point a, Point w)
{
    const std::complex<double> ca = to_complex(a);
    const std::complex<double> cw = to_complex(w);
    return to_point((cw + ca) / (1.0 + std::conj(ca) * cw));
}

Point rotate(Point p, double theta)
{
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return {c * p.u - s * p.v, s * p.u + c * p.v};
}

ChartDisk chart_disk(const ModelSurface& s, Point c, double r)
{
    require_chart_point(s, c);
    if (!(r >= 0.0)) throw Error(ErrorKind::domain_error, "geodesic radius must be nonnegative");
    if (!s.is_hyperbolic()) return {c, r};
    // The ball about the origin is the chart disk |w| < t. Its image under the
    // automorphism taking 0 to c is again a disk, symmetric about the ray
    // through c; the two points on that ray fix centre and radius.
    const double t = std::tanh(0.5 * r);
    const double sc = std::hypot(c.u, c.v);
    const double denom = 1.0 - sc * sc * t * t;
    const double scale = (1.0 - t * t) / denom;
    return {{c.u * scale, c.v * scale}, t * (1.0 - sc * sc) / denom};
}

}  // namespace iuws
