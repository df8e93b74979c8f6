#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"

#include "iuws/elliptic.hpp"
#include "iuws/error.hpp"
#include "iuws/heat.hpp"

using namespace iuws;
using doctest::Approx;

namespace {
const ModelSurface E = ModelSurface::euclidean();
const ModelSurface H = ModelSurface::hyperbolic();

SystemPtr disk(double rho, double h)
{
    const double R = rho + 0.1;
    return build_system(E, make_window(-R, R, -R, R, h), {GeodesicBall{rho}, {0, 0}});
}
}  // namespace

TEST_SUITE("heat")
{
    TEST_CASE("survival starts at one and decays at the principal rate")
    {
        const SystemPtr d = disk(1.0, 0.02);
        const HeatRun run = survival(d, {0.0, 1.0, 2.0}, 0.005);
        for (double x : run.states[0].values) CHECK(x == 1.0);
        CHECK(run.sup[0] == 1.0);
        const double lambda = principal_eigenpair(d).lambda;
        const double slope = std::log(run.states[2].at({0, 0})) - std::log(run.states[1].at({0, 0}));
        CHECK(-slope == Approx(lambda).epsilon(0.03));
        CHECK_THROWS_AS(survival(d, {0.01, 1.0}, 0.005), Error);
    }

    TEST_CASE("schemes agree on smooth data")
    {
        const SystemPtr d = disk(1.0, 0.04);
        const std::vector<double> times{0.1, 0.3};
        const HeatRun a = survival(d, times, 0.002, HeatScheme::tr_bdf2);
        const HeatRun b = survival(d, times, 0.002, HeatScheme::crank_nicolson);
        CHECK(a.scheme == HeatScheme::tr_bdf2);
        CHECK(b.scheme == HeatScheme::crank_nicolson);
        for (std::size_t k = 0; k < times.size(); ++k) CHECK(a.sup[k] == Approx(b.sup[k]).epsilon(1e-3));
        CHECK(heat_scheme_from_string("crank_nicolson") == HeatScheme::crank_nicolson);
        CHECK(std::string(to_string(HeatScheme::tr_bdf2)) == "tr_bdf2");
        CHECK_THROWS_AS(heat_scheme_from_string("euler"), Error);
    }

    TEST_CASE("property: positivity, mass loss and comparison")
    {
        const Window w = make_window(-1.1, 1.1, -1.1, 1.1, 0.04);
        const SystemPtr small = build_system(E, w, {GeodesicBall{0.6}, {0, 0}});
        const SystemPtr big = build_system(E, w, {GeodesicBall{1.0}, {0, 0}});
        const std::vector<double> times{0.0, 0.02, 0.05, 0.1, 0.2};
        const HeatRun a = survival(small, times, 0.002);
        const HeatRun b = survival(big, times, 0.002);
        for (std::size_t k = 0; k < times.size(); ++k) {
            for (double x : a.states[k].values) CHECK(x >= -1e-12);
            if (k > 0) CHECK(a.integral[k] < a.integral[k - 1]);
            for (std::size_t i = 0; i < small->size(); ++i) {
                CHECK(a.states[k].values[i] <= b.states[k].at_node(small->node_of(i)) + 1e-12);
            }
        }
    }

    TEST_CASE("survival bounds")
    {
        const SystemPtr d = disk(1.0, 0.02);
        const double v = torsion(d).sup;
        const HeatRun run = survival(d, {0.01, 0.1, 1.0}, 1e-3);
        const auto upper = survival_upper_bound_check(run, 2.0, v);
        CHECK(upper[0].bound >= 1.0);
        CHECK(upper[0].bound >= upper[0].measured);
        CHECK(upper[2].bound == Approx(2.0 * std::exp(-1.0 / (2.0 * v))));
        for (const BoundRow& r : upper) CHECK(r.pass);
        const double lambda = principal_eigenpair(d).lambda;
        for (const BoundRow& r : survival_lower_bound_check(run, lambda)) CHECK(r.pass);

        const SystemPtr b = build_system(H, make_window(-0.5, 0.5, -0.5, 0.5, 0.01), {GeodesicBall{1.0}, {0, 0}});
        const HeatRun hb = survival(b, {1.0}, 0.005);
        const auto hu = survival_upper_bound_check(hb, 2.0, torsion(b).sup);
        CHECK(hu[0].bound == Approx(0.2496).epsilon(0.01));
        CHECK(hu[0].pass);
    }

    TEST_CASE("width fit")
    {
        const SystemPtr d = disk(1.0, 0.04);
        const HeatRun run = survival(d, {0.5, 1.0, 1.5, 2.0}, 0.005);
        CHECK_FALSE(capwidth_survival_check(run, CapWidthResult::infinity).applicable);
        CHECK_FALSE(capwidth_survival_check(run, 0.0).applicable);
        const DecayFit f = capwidth_survival_check(run, 0.5);
        CHECK(f.applicable);
        CHECK(f.rate == Approx(principal_eigenpair(d).lambda).epsilon(0.03));
        CHECK(f.c2 == Approx(f.rate * 0.25));
    }

    TEST_CASE("heat kernel: symmetry, semigroup and total mass")
    {
        const SystemPtr d = disk(1.0, 0.05);
        const double t = 0.05;
        const Point x{0.3, 0.1}, y{-0.25, -0.35};
        const HeatRun px = heat_kernel_columns(d, x, {t, 2 * t}, 0.0005);
        const HeatRun py = heat_kernel_columns(d, y, {t}, 0.0005);
        CHECK(px.states[0].at(y) == Approx(py.states[0].at(x)).epsilon(0.02));
        const auto mass = d->mass();
        double ck = 0.0;
        for (std::size_t k = 0; k < d->size(); ++k) ck += px.states[0].values[k] * py.states[0].values[k] * mass[k];
        CHECK(ck == Approx(px.states[1].at(y)).epsilon(0.02));
        const HeatRun s = survival(d, {t}, 0.0005);
        CHECK(px.integral[0] == Approx(s.states[0].at(x)).epsilon(0.02));
        CHECK_THROWS_AS(heat_kernel_column(d, t, {2.0, 0.0}), Error);
    }

    TEST_CASE("IU ratio flattens at large times")
    {
        const SystemPtr d = disk(1.0, 0.05);
        const SpectralResult eig = principal_eigenpair(d, 1e-10);
        std::mt19937_64 rng(11);
        std::uniform_int_distribution<std::size_t> pick(0, d->size() - 1);
        std::vector<std::pair<std::int32_t, std::int32_t>> pairs;
        for (int k = 0; k < 40; ++k) pairs.emplace_back(static_cast<std::int32_t>(pick(rng)), static_cast<std::int32_t>(pick(rng)));
        const IuRatio late = iu_ratio(d, eig, 5.0 / eig.lambda, pairs);
        CHECK(late.used == pairs.size());
        CHECK(late.spread <= 1.1);
        CHECK(late.min == Approx(std::exp(-5.0)).epsilon(0.1));
        const IuRatio early = iu_ratio(d, eig, 0.5, pairs);
        CHECK(early.spread >= late.spread);
        CHECK(early.spread <= 10.0);
    }

    TEST_CASE("IU integral with one sample")
    {
        const SystemPtr d = build_system(E, make_window(-2, 2, -2, 2, 0.04), {GeodesicBall{1.0}, {0, 0}});
        const ScalarField g = green(d, {0, 0}, 1e-10);
        const double tau = std::log(2.0) / (2 * std::numbers::pi);
        CapWidthOptions o;
        o.rmax = 0.5;
        const IuIntegral one = iu_integral(d, g, tau, 1, o);
        REQUIRE(one.widths.size() == 1);
        CHECK_FALSE(one.infinite);
        CHECK(one.value == Approx(one.widths[0] * one.widths[0] * std::log(2.0)));
        CHECK(one.partials.back() == Approx(one.value));
    }
}
