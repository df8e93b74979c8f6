#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"

#include "iuws/error.hpp"
#include "iuws/geometry.hpp"

using namespace iuws;
using doctest::Approx;

namespace {
const ModelSurface E = ModelSurface::euclidean();
const ModelSurface H = ModelSurface::hyperbolic();
constexpr double pi = std::numbers::pi;
}  // namespace

TEST_SUITE("geometry")
{
    TEST_CASE("surfaces carry their curvature")
    {
        CHECK(E.curvature() == 0.0);
        CHECK(H.curvature() == -1.0);
        CHECK(surface_kind_from_string("hyperbolic") == SurfaceKind::hyperbolic);
        CHECK_THROWS_AS(surface_kind_from_string("sphere"), Error);
    }

    TEST_CASE("distance examples")
    {
        CHECK(dist(E, {0, 0}, {3, 4}) == Approx(5.0));
        CHECK(dist(H, {0.3, -0.2}, {0.3, -0.2}) == 0.0);
        CHECK(dist(H, {0, 0}, {std::tanh(0.5), 0}) == Approx(1.0).epsilon(1e-12));
    }

    TEST_CASE("chart points off the disk are rejected")
    {
        CHECK_FALSE(in_chart(H, {1.0, 0.0}));
        CHECK(in_chart(E, {5.0, 7.0}));
        try {
            dist(H, {0, 0}, {0.8, 0.8});
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::invalid_point);
        }
        CHECK_THROWS_AS(conformal_weight(H, {0.0, 1.0}), Error);
    }

    TEST_CASE("conformal weight")
    {
        CHECK(conformal_weight(E, {12, -3}) == 1.0);
        CHECK(conformal_weight(H, {0, 0}) == 4.0);
        CHECK(conformal_weight(H, {0.5, 0}) == Approx(4.0 / (0.75 * 0.75)));
        CHECK(conformal_weight_unchecked(H, 0.5, 0.0) == conformal_weight(H, {0.5, 0}));
    }

    TEST_CASE("ball volume")
    {
        CHECK(ball_volume(E, 1.0) == Approx(pi));
        CHECK(ball_volume(H, 0.0) == 0.0);
        // 2 pi int_0^1 sinh by Simpson
        double s = 0.0;
        const int n = 1000;
        for (int k = 0; k <= n; ++k) {
            const double w = (k == 0 || k == n) ? 1 : (k % 2 ? 4 : 2);
            s += w * std::sinh(static_cast<double>(k) / n);
        }
        s *= 2 * pi / (3.0 * n);
        CHECK(ball_volume(H, 1.0) == Approx(s).epsilon(1e-10));
        CHECK(ball_volume(H, 1.0) == Approx(3.41229).epsilon(1e-5));
        CHECK_THROWS_AS(ball_volume(H, -1.0), Error);
    }

    TEST_CASE("chart radius of geodesic balls")
    {
        CHECK(geodesic_to_chart_radius(E, 0.7) == 0.7);
        CHECK(geodesic_to_chart_radius(H, 0.0) == 0.0);
        CHECK(geodesic_to_chart_radius(H, 2.0) == Approx(0.76159).epsilon(1e-5));
        CHECK(geodesic_to_chart_radius(H, 30.0) < 1.0);
        for (double r : {0.1, 1.0, 3.0}) {
            CHECK(chart_to_geodesic_radius(H, geodesic_to_chart_radius(H, r)) == Approx(r));
        }
        CHECK_THROWS_AS(geodesic_to_chart_radius(H, -0.1), Error);
    }

    TEST_CASE("off-centre balls map to chart disks with the right boundary")
    {
        const Point c{0.4, -0.3};
        const ChartDisk d = chart_disk(H, c, 0.8);
        for (int k = 0; k < 16; ++k) {
            const double a = 2 * pi * k / 16;
            const Point p{d.center.u + d.radius * std::cos(a), d.center.v + d.radius * std::sin(a)};
            CHECK(dist(H, c, p) == Approx(0.8).epsilon(1e-9));
        }
        const ChartDisk e = chart_disk(E, c, 0.8);
        CHECK(e.center == c);
        CHECK(e.radius == 0.8);
    }

    TEST_CASE("property: triangle inequality and automorphism invariance")
    {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> U(-0.65, 0.65);
        for (int k = 0; k < 300; ++k) {
            const Point p{U(rng), U(rng)}, q{U(rng), U(rng)}, x{U(rng), U(rng)};
            for (const ModelSurface& s : {E, H}) {
                CHECK(dist(s, p, q) <= dist(s, p, x) + dist(s, x, q) + 1e-12);
            }
            const Point pa = mobius_to_origin(x, p), qa = mobius_to_origin(x, q);
            CHECK(dist(H, pa, qa) == Approx(dist(H, p, q)).epsilon(1e-9));
            CHECK(dist(H, {0, 0}, pa) == Approx(dist(H, x, p)).epsilon(1e-9));
            const Point back = mobius_from_origin(x, pa);
            CHECK(back.u == Approx(p.u).epsilon(1e-12));
            CHECK(back.v == Approx(p.v).epsilon(1e-12));
            const Point rp = rotate(p, 0.7), rq = rotate(q, 0.7);
            CHECK(dist(H, rp, rq) == Approx(dist(H, p, q)).epsilon(1e-12));
        }
    }

    TEST_CASE("property: volume doubling and small-ball limit")
    {
        for (int k = 1; k < 100; ++k) {
            const double r = 2.0 * k / 100.0;
            CHECK(ball_volume(E, 2 * r) <= 4.0 * ball_volume(E, r) * (1 + 1e-12));
            CHECK(ball_volume(H, 2 * r) <= 4.0 * std::exp(2.0) * ball_volume(H, r));
        }
        CHECK(ball_volume(H, 1e-3) / (pi * 1e-6) == Approx(1.0).epsilon(1e-5));
    }
}
