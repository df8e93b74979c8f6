#include <cmath>
#include <vector>

#include "doctest.h"

#include "iuws/capwidth.hpp"
#include "iuws/error.hpp"
#include "oracles.hpp"

using namespace iuws;
using doctest::Approx;

namespace {
const ModelSurface E = ModelSurface::euclidean();

SystemPtr disk(double rho, double h)
{
    const double R = 3 * rho + 0.3;
    return build_system(E, make_window(-R, R, -R, R, h), {GeodesicBall{rho}, {0, 0}});
}

SystemPtr strip(double a)
{
    const double h = a / 10.0;
    return build_system(E, make_window(-7 * a, 7 * a, -4 * a, 4 * a, h), {Strip{a, 8 * a}, {0, 0}});
}
}  // namespace

TEST_SUITE("capwidth")
{
    TEST_CASE("trivial capacity ratios")
    {
        const SystemPtr d = build_system(E, make_window(-2.5, 2.5, -2.5, 2.5, 0.05), {GeodesicBall{0.4}, {-1.5, 0}});
        CHECK(capacity_ratio(*d, {1.0, 0.0}, 0.5) == Approx(1.0));
        const SystemPtr big = build_system(E, make_window(-2.5, 2.5, -2.5, 2.5, 0.05), {GeodesicBall{2.0}, {0, 0}});
        CHECK(capacity_ratio(*big, {0.0, 0.0}, 0.5) == 0.0);
    }

    TEST_CASE("half-plane ratio against a dense brute force")
    {
        const double h = 0.1, r = 1.0;
        const Point x{0.0, 0.5};
        const Window w = make_window(-2.1, 2.1, -1.6, 2.6, h);
        const SystemPtr half = build_system(E, w, {Rectangle{4.2, 2.6}, {0.0, 1.3}});
        const double ratio = capacity_ratio(*half, x, r, 1e-12);

        const int n = w.cells_u() + 1;
        REQUIRE(n == w.cells_v() + 1);
        const auto at = [&](int i, int j) {
            return Point{lattice_coord(w.umin, i, h), lattice_coord(w.vmin, j, h)};
        };
        const auto open = [&](int i, int j) { return dist(E, x, at(i, j)) < 2 * r; };
        const auto ball = [&](int i, int j) { return dist(E, x, at(i, j)) <= r; };
        const double full = oracle::dense_condenser(n, open, ball);
        const double part = oracle::dense_condenser(
            n, open, [&](int i, int j) { return ball(i, j) && at(i, j).v <= 0.0; });
        CHECK(ratio == Approx(part / full).epsilon(1e-8));
        CHECK(ratio > 0.0);
        CHECK(ratio < 1.0);
    }

    TEST_CASE("width of a disk lies in the monotone sandwich")
    {
        const SystemPtr d = disk(0.3, 0.01);
        CapWidthOptions o;
        o.rmax = 0.4;
        const CapWidthResult b = cap_width(*d, o);
        CHECK_FALSE(b.infinite);
        CHECK(b.w >= 0.15);
        CHECK(b.w <= 0.3 + 0.01);
        o.search = WidthSearch::linear;
        const CapWidthResult l = cap_width(*d, o);
        CHECK(l.w == Approx(b.w));
    }

    TEST_CASE("empty domain has width zero")
    {
        const SystemPtr d = disk(0.3, 0.02);
        const SystemPtr none = sublevel_domain(*d, ScalarField(d), -1.0);
        const CapWidthResult r = cap_width(*none);
        CHECK(r.empty_domain);
        CHECK(r.w == 0.0);
    }

    TEST_CASE("property: strip widths scale with the half width")
    {
        CapWidthOptions o;
        o.rmax = 0.5;
        const double w1 = cap_width(*strip(0.1), o).w;
        const double w2 = cap_width(*strip(0.2), o).w;
        CHECK(w1 / 0.1 == Approx(w2 / 0.2).epsilon(0.1));
    }

    TEST_CASE("eta robustness")
    {
        const SystemPtr d = disk(0.3, 0.02);
        const EtaRobustness same = eta_robustness(*d, 0.5, 0.5);
        CHECK(same.ratio == Approx(1.0));
        const EtaRobustness r = eta_robustness(*d, 0.7, 0.3);
        CHECK(r.ratio >= 1.0);
        CHECK(r.ratio <= 10.0);
        CHECK_THROWS_AS(eta_robustness(*d, 0.3, 0.7), Error);
    }

    TEST_CASE("property: the width does not decrease with eta")
    {
        JohnComb comb;
        comb.wall_thickness = 0.1;
        const SystemPtr d = build_system(E, make_window(-1.6, 1.6, -1.6, 1.6, 0.04), {comb, {-0.5, -0.5}});
        double prev = 0.0;
        for (double eta : {0.2, 0.4, 0.6, 0.8}) {
            CapWidthOptions o;
            o.eta = eta;
            o.rmax = 0.5;
            const CapWidthResult r = cap_width(*d, o);
            if (eta < 0.5) REQUIRE_FALSE(r.infinite);
            const double w = r.w;
            CHECK(w >= prev - 1e-12);
            prev = w;
        }
    }
}
