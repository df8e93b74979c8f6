#include <cmath>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>

#include "doctest.h"

#include "iuws/elliptic.hpp"
#include "iuws/error.hpp"
#include "iuws/mesh.hpp"

using namespace iuws;
using doctest::Approx;

namespace {
const ModelSurface E = ModelSurface::euclidean();
const ModelSurface H = ModelSurface::hyperbolic();
constexpr double pi = std::numbers::pi;

SystemPtr unit_disk(double h)
{
    return build_system(E, make_window(-1.2, 1.2, -1.2, 1.2, h), {GeodesicBall{1.0}, {0, 0}});
}

ErrorKind kind_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error raised");
    return ErrorKind::validation;
}
}  // namespace

TEST_SUITE("mesh")
{
    TEST_CASE("windows snap onto the lattice")
    {
        const Window w = make_window(-1.0, 1.01, 0.0, 0.5, 0.1);
        CHECK(w.cells_u() == 21);
        CHECK(w.cells_v() == 5);
        CHECK(w.umax == Approx(1.1));
        CHECK(make_window(0, 1, 0, 1, 0.1).cells_u() == 10);
        CHECK_THROWS_AS(make_window(0, 1, 0, 1, 0.0), Error);
        CHECK_THROWS_AS(make_window(1, 0, 0, 1, 0.1), Error);
    }

    TEST_CASE("build_system examples")
    {
        const SystemPtr d = build_system(E, make_window(-1.2, 1.2, -1.2, 1.2, 0.05),
                                         {GeodesicBall{1.0}, {0, 0}});
        CHECK(static_cast<double>(d->size()) == Approx(pi / (0.05 * 0.05)).epsilon(0.03));

        CHECK(kind_of([] {
                  build_system(E, make_window(-1, 1, -1, 1, 0.1), {GeodesicBall{0.0}, {0, 0}});
              }) == ErrorKind::empty_domain);
        CHECK(kind_of([] {
                  build_system(E, make_window(-1, 1, -1, 1, 0.1), {GeodesicBall{0.95}, {0, 0}});
              }) == ErrorKind::geometry_overflow);

        const double h = 0.01;
        const SystemPtr b = build_system(H, make_window(-0.6, 0.6, -0.6, 0.6, h),
                                         {GeodesicBall{1.0}, {0, 0}});
        const double rho = std::tanh(0.5);
        for (std::size_t k = 0; k < b->node_count(); ++k) {
            const auto id = static_cast<std::int32_t>(k);
            const Point p = b->node_point(id);
            const double r = std::hypot(p.u, p.v);
            if (std::abs(r - rho) > 1e-9) CHECK(b->is_interior(id) == (r < rho));
        }
    }

    TEST_CASE("shape parameters are validated")
    {
        const Window w = make_window(-1, 1, -1, 1, 0.05);
        CHECK(kind_of([&] { build_system(E, w, {Annulus{0.5, 0.4}, {0, 0}}); }) == ErrorKind::validation);
        CHECK(kind_of([&] { build_system(E, w, {Rectangle{-1, 1}, {0, 0}}); }) == ErrorKind::validation);
        CHECK(kind_of([&] { build_system(E, w, {Cusp{1.0, 1.0}, {0, 0}}); }) == ErrorKind::validation);
        JohnComb c;
        c.beta = 1.5;
        CHECK(kind_of([&] { build_system(E, w, {c, {0, 0}}); }) == ErrorKind::validation);
        CHECK(kind_of([&] { build_system(E, w, {Sublevel{0.1}, {0, 0}}); }) == ErrorKind::validation);
    }

    TEST_CASE("domain_measure examples")
    {
        CHECK(domain_measure(*unit_disk(0.02)) == Approx(pi).epsilon(0.01));
        const SystemPtr b = build_system(H, make_window(-0.6, 0.6, -0.6, 0.6, 0.01),
                                         {GeodesicBall{1.0}, {0, 0}});
        CHECK(domain_measure(*b) == Approx(2 * pi * (std::cosh(1.0) - 1)).epsilon(0.02));
        const SystemPtr r = build_system(E, make_window(-0.1, 1.1, -0.1, 2.1, 0.005),
                                         {Rectangle{1.0, 2.0}, {0.5, 1.0}});
        CHECK(domain_measure(*r) == Approx(2.0).epsilon(0.01));
    }

    TEST_CASE("system structure: mass, stencil symmetry and M-matrix rows")
    {
        const SystemPtr s = build_system(H, make_window(-0.7, 0.7, -0.7, 0.7, 0.05),
                                         {Annulus{0.3, 1.2}, {0.05, 0}});
        const auto mass = s->mass();
        for (std::size_t k = 0; k < s->size(); ++k) {
            CHECK(mass[k] == Approx(conformal_weight(H, s->point(k)) * 0.05 * 0.05));
            CHECK(mass[k] > 0.0);
            for (int e = 0; e < 4; ++e) {
                const std::int32_t nb = s->stencil().nbr[k][e];
                if (nb < 0) continue;
                // neighbour relation is symmetric and pairs opposite directions
                CHECK(s->stencil().nbr[static_cast<std::size_t>(nb)][e ^ 1] == static_cast<std::int32_t>(k));
            }
        }
        // S applied to the constant: zero at nodes away from the Dirichlet set
        std::vector<double> one(s->size(), 1.0), y(s->size());
        kernels::stiffness_apply(s->stencil(), one, y);
        for (std::size_t k = 0; k < s->size(); ++k) {
            int missing = 0;
            for (int e = 0; e < 4; ++e) missing += s->stencil().nbr[k][e] < 0;
            CHECK(y[k] == Approx(static_cast<double>(missing)));
        }
    }

    TEST_CASE("sublevel_domain examples")
    {
        const SystemPtr d = unit_disk(0.02);
        ScalarField f(d);
        for (std::size_t k = 0; k < d->size(); ++k) f.values[k] = 1.0 + d->point(k).u;
        CHECK(sublevel_domain(*d, f, 10.0)->size() == d->size());
        CHECK(sublevel_domain(*d, f, 0.0)->empty());

        const ScalarField g = green(d, {0, 0}, 1e-10);
        const double t = std::log(2.0) / (2 * pi);
        const SystemPtr ann = sublevel_domain(*d, g, t);
        // {G < t} is the annulus 1/2 < |x| < 1 up to a cell
        for (std::size_t k = 0; k < d->size(); ++k) {
            const Point p = d->point(k);
            const double r = std::hypot(p.u, p.v);
            if (r > 0.5 + 0.02) CHECK(ann->is_interior(d->node_of(k)));
            if (r < 0.5 - 0.02) CHECK_FALSE(ann->is_interior(d->node_of(k)));
        }
    }

    TEST_CASE("components, largest component and ball removal")
    {
        const Window w = make_window(-1.5, 1.5, -1.5, 1.5, 0.05);
        std::vector<std::uint8_t> mask(static_cast<std::size_t>(w.cells_u() + 1) * (w.cells_v() + 1), 0);
        const int nu = w.cells_u() + 1;
        for (int j = 0; j <= w.cells_v(); ++j) {
            for (int i = 0; i < nu; ++i) {
                const double u = lattice_coord(w.umin, i, w.h), v = lattice_coord(w.vmin, j, w.h);
                const bool big = std::hypot(u + 0.6, v) < 0.5;
                const bool small = std::hypot(u - 0.8, v) < 0.3;
                mask[static_cast<std::size_t>(j) * nu + i] = big || small;
            }
        }
        const SystemPtr s = DomainSystem::from_mask(E, w, mask, {MaskFile{"inline"}, {0, 0}});
        int count = 0;
        component_labels(*s, &count);
        CHECK(count == 2);
        bool split = false;
        const SystemPtr big = largest_component(s, &split);
        CHECK(split);
        CHECK(big->point(0).u < 0.0);
        const SystemPtr holed = remove_ball(*big, {-0.6, 0.0}, 0.2);
        for (std::size_t k = 0; k < holed->size(); ++k) {
            CHECK(dist(E, holed->point(k), {-0.6, 0.0}) > 0.2);
        }
    }

    TEST_CASE("depth map")
    {
        const SystemPtr d = unit_disk(0.02);
        const std::vector<double> depth = depth_map(*d);
        for (std::size_t k = 0; k < d->size(); ++k) {
            const Point p = d->point(k);
            CHECK(std::abs(depth[k] - (1.0 - std::hypot(p.u, p.v))) <= 0.03);
        }
    }

    TEST_CASE("mask files round-trip")
    {
        const SystemPtr d = build_system(E, make_window(-1, 1, -1, 1, 0.1), {Cusp{2.0, 0.9}, {-0.5, -0.5}});
        const auto path = (std::filesystem::temp_directory_path() / "iuws_mesh_mask.pbm").string();
        write_mask_file(path, *d);
        const SystemPtr back = build_system(E, d->window(), {MaskFile{path}, {0, 0}});
        CHECK(back->size() == d->size());
        for (std::size_t k = 0; k < d->size(); ++k) CHECK(back->node_of(k) == d->node_of(k));
        CHECK_THROWS_AS(build_system(E, make_window(-1, 1, -1, 1, 0.05), {MaskFile{path}, {0, 0}}), Error);
        std::filesystem::remove(path);
    }

    TEST_CASE("property: stiffness is positive semidefinite")
    {
        const SystemPtr d = build_system(E, make_window(-1, 1, -1, 1, 0.05), {JohnComb{}, {-0.5, -0.5}});
        std::mt19937_64 rng(3);
        std::normal_distribution<double> N;
        for (int k = 0; k < 20; ++k) {
            std::vector<double> u(d->size());
            for (double& x : u) x = N(rng);
            CHECK(d->dirichlet_energy(u) >= 0.0);
        }
    }

    TEST_CASE("property: measure refinement is O(h)")
    {
        for (const ModelSurface& s : {E, H}) {
            double prev = 0.0, prev_h = 0.0;
            for (double h : {0.04, 0.02, 0.01}) {
                const double R = s.is_hyperbolic() ? 0.6 : 1.1;
                const double m = domain_measure(*build_system(s, make_window(-R, R, -R, R, h),
                                                              {GeodesicBall{1.0}, {0, 0}}));
                if (prev_h > 0.0) CHECK(std::abs(m - prev) / m <= 5.0 * prev_h);
                prev = m;
                prev_h = h;
            }
        }
    }
}
