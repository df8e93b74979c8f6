#include "iuws/elliptic.hpp"

#include <algorithm>
#include <cmath>

#include "iuws/error.hpp"

namespace iuws {

namespace {

double weighted_norm(std::span<const double> v, std::span<const double> weight)
{
    return std::sqrt(weight.empty() ? kernels::dot(v, v)
                                    : kernels::inverse_weighted_norm2(v, weight));
}

}  // namespace

CgReport conjugate_gradient(const Stencil& st, std::span<const double> mass, double alpha,
                            double beta, std::span<const double> rhs, std::span<double> x,
                            std::span<const double> norm_weight, double tol, long max_iter)
{
    const std::size_t n = st.size();
    if (rhs.size() != n || x.size() != n) {
        throw Error(ErrorKind::validation, "conjugate_gradient: size mismatch");
    }
    if (!(tol > 0.0)) throw Error(ErrorKind::validation, "solver tolerance must be positive");
    if (max_iter <= 0) {
        max_iter = std::max<long>(100, static_cast<long>(50.0 * std::sqrt(double(n))));
    }
    CgReport report;
    const double bnorm = weighted_norm(rhs, norm_weight);
    if (n == 0 || bnorm == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        return report;
    }

    std::vector<double> diag(n);
    for (std::size_t i = 0; i < n; ++i) diag[i] = (alpha != 0.0 ? alpha * mass[i] : 0.0) + 4.0 * beta;

    std::vector<double> r(n), z(n), p(n), ap(n);
    kernels::shifted_apply(st, mass.empty() ? std::span<const double>(diag) : mass,
                           mass.empty() ? 0.0 : alpha, beta, x, ap);
    for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - ap[i];
    double res = weighted_norm(r, norm_weight);
    if (res <= tol * bnorm) {
        report.residual = res / bnorm;
        return report;
    }
    kernels::divide(r, diag, z);
    p = z;
    double rz = kernels::dot(r, z);

    for (long it = 1; it <= max_iter; ++it) {
        kernels::shifted_apply(st, mass.empty() ? std::span<const double>(diag) : mass,
                               mass.empty() ? 0.0 : alpha, beta, p, ap);
        const double pap = kernels::dot(p, ap);
        if (!(pap > 0.0)) {
            throw NoConvergence("conjugate gradient broke down: p^T A p is not positive",
                                res / bnorm, it);
        }
        const double step = rz / pap;
        kernels::axpy(step, p, x);
        kernels::axpy(-step, ap, r);
        res = weighted_norm(r, norm_weight);
        if (res <= tol * bnorm) {
            report.iterations = it;
            report.residual = res / bnorm;
            return report;
        }
        kernels::divide(r, diag, z);
        const double rz_next = kernels::dot(r, z);
        kernels::xpay(z, rz_next / rz, p);
        rz = rz_next;
    }
    throw NoConvergence("conjugate gradient did not converge in " + std::to_string(max_iter) +
                            " iterations (relative residual " + std::to_string(res / bnorm) + ")",
                        res / bnorm, max_iter);
}

ScalarField solve_dirichlet(const SystemPtr& sys, std::span<const double> rhs, double tol)
{
    if (sys->empty()) throw Error(ErrorKind::empty_domain, "solve_dirichlet on an empty domain");
    if (rhs.size() != sys->size()) throw Error(ErrorKind::validation, "rhs size mismatch");
    ScalarField u(sys);
    conjugate_gradient(sys->stencil(), {}, 0.0, 1.0, rhs, u.values, sys->mass(), tol);
    return u;
}

TorsionResult torsion(const SystemPtr& sys, double tol)
{
    TorsionResult out;
    out.field = solve_dirichlet(sys, sys->mass(), tol);
    out.sup = out.field.sup();
    return out;
}

ScalarField green(const SystemPtr& sys, Point pole, double tol)
{
    const auto node = sys->nearest_node(pole);
    if (!node || !sys->is_interior(*node)) {
        throw Error(ErrorKind::invalid_pole, "Green pole (" + std::to_string(pole.u) + ", " +
                                                 std::to_string(pole.v) +
                                                 ") does not snap to an interior node");
    }
    std::vector<double> rhs(sys->size(), 0.0);
    rhs[sys->unknown(*node)] = 1.0;
    return solve_dirichlet(sys, rhs, tol);
}

ScalarField harmonic_measure(const SystemPtr& sys, std::span<const std::int32_t> target, double tol)
{
    if (target.empty()) throw Error(ErrorKind::degenerate_target, "harmonic measure target is empty");
    if (sys->empty()) throw Error(ErrorKind::empty_domain, "harmonic measure on an empty domain");
    std::vector<std::uint8_t> on_target(sys->node_count(), 0);
    for (std::int32_t id : target) {
        if (id < 0 || static_cast<std::size_t>(id) >= sys->node_count() || sys->is_interior(id)) {
            throw Error(ErrorKind::validation, "harmonic measure target must be boundary nodes");
        }
        on_target[id] = 1;
    }
    const int nu = sys->nodes_u();
    std::vector<double> rhs(sys->size(), 0.0);
    bool touched = false;
    for (std::size_t k = 0; k < sys->size(); ++k) {
        const std::int32_t id = sys->node_of(k);
        for (std::int32_t nb : {id + 1, id - 1, id + nu, id - nu}) {
            if (on_target[nb]) {
                rhs[k] += 1.0;
                touched = true;
            }
        }
    }
    if (!touched) {
        throw Error(ErrorKind::validation, "harmonic measure target must be boundary nodes");
    }
    return solve_dirichlet(sys, rhs, tol);
}

bool ball_fits(const ModelSurface& s, const Window& w, Point x, double radius)
{
    if (!in_chart(s, x)) return false;
    const ChartDisk d = chart_disk(s, x, radius);
    return d.center.u - d.radius >= w.umin && d.center.u + d.radius <= w.umax &&
           d.center.v - d.radius >= w.vmin && d.center.v + d.radius <= w.vmax;
}

Condenser solve_condenser(const ModelSurface& s, const Window& w, Point x, double r,
                          const std::function<bool(int, int)>& in_e, double tol, bool* fits,
                          std::vector<double>* potential, std::vector<std::uint8_t>* region)
{
    Condenser out;
    if (!ball_fits(s, w, x, 2.0 * r)) {
        *fits = false;
        return out;
    }
    *fits = true;
    const int nu = w.cells_u() + 1;
    const int nv = w.cells_v() + 1;
    const ChartDisk d = chart_disk(s, x, 2.0 * r);
    const double h = w.h;
    const int i0 = std::max(0, static_cast<int>(std::floor((d.center.u - d.radius - w.umin) / h)) - 1);
    const int i1 = std::min(nu - 1, static_cast<int>(std::ceil((d.center.u + d.radius - w.umin) / h)) + 1);
    const int j0 = std::max(0, static_cast<int>(std::floor((d.center.v - d.radius - w.vmin) / h)) - 1);
    const int j1 = std::min(nv - 1, static_cast<int>(std::ceil((d.center.v + d.radius - w.vmin) / h)) + 1);
    const int bw = i1 - i0 + 1;
    const int bh = j1 - j0 + 1;

    // 0: outside the condenser, 1: free, 2: plate E
    std::vector<std::uint8_t> status(static_cast<std::size_t>(bw) * bh, 0);
    for (int j = 0; j < bh; ++j) {
        for (int i = 0; i < bw; ++i) {
            const Point p{lattice_coord(w.umin, i0 + i, h), lattice_coord(w.vmin, j0 + j, h)};
            if (!in_chart(s, p)) continue;
            const double dd = dist(s, x, p);
            if (!(dd < 2.0 * r)) continue;
            std::uint8_t st = 1;
            if (dd <= r && in_e(i0 + i, j0 + j)) {
                st = 2;
                ++out.e_nodes;
            }
            status[static_cast<std::size_t>(j) * bw + i] = st;
        }
    }

    std::vector<double> local(status.size(), 0.0);
    for (std::size_t k = 0; k < status.size(); ++k) {
        if (status[k] == 2) local[k] = 1.0;
    }

    if (out.e_nodes > 0) {
        std::vector<std::int32_t> index(status.size(), -1);
        std::vector<std::int32_t> free;
        for (std::size_t k = 0; k < status.size(); ++k) {
            if (status[k] == 1) {
                index[k] = static_cast<std::int32_t>(free.size());
                free.push_back(static_cast<std::int32_t>(k));
            }
        }
        out.free_nodes = free.size();
        if (!free.empty()) {
            Stencil st;
            st.nbr.resize(free.size());
            std::vector<double> rhs(free.size(), 0.0);
            for (std::size_t f = 0; f < free.size(); ++f) {
                const int k = free[f];
                const int i = k % bw;
                const int j = k / bw;
                const int nbk[4] = {i + 1 < bw ? k + 1 : -1, i > 0 ? k - 1 : -1,
                                    j + 1 < bh ? k + bw : -1, j > 0 ? k - bw : -1};
                for (int q = 0; q < 4; ++q) {
                    st.nbr[f][q] = -1;
                    if (nbk[q] < 0) continue;
                    if (status[nbk[q]] == 1) st.nbr[f][q] = index[nbk[q]];
                    if (status[nbk[q]] == 2) rhs[f] += 1.0;
                }
            }
            std::vector<double> u(free.size(), 0.0);
            const CgReport rep = conjugate_gradient(st, {}, 0.0, 1.0, rhs, u, {}, tol);
            out.iterations = rep.iterations;
            for (std::size_t f = 0; f < free.size(); ++f) local[free[f]] = u[f];
        }
        double energy = 0.0;
        for (int j = 0; j < bh; ++j) {
            for (int i = 0; i < bw; ++i) {
                const std::size_t k = static_cast<std::size_t>(j) * bw + i;
                const double a = local[k];
                const double east = i + 1 < bw ? local[k + 1] : 0.0;
                const double north = j + 1 < bh ? local[k + bw] : 0.0;
                energy += (a - east) * (a - east) + (a - north) * (a - north);
                if (i == 0) energy += a * a;
                if (j == 0) energy += a * a;
            }
        }
        out.energy = energy;
    }

    if (potential || region) {
        const std::size_t total = static_cast<std::size_t>(nu) * nv;
        if (potential) potential->assign(total, 0.0);
        if (region) region->assign(total, 0);
        for (int j = 0; j < bh; ++j) {
            for (int i = 0; i < bw; ++i) {
                const std::size_t k = static_cast<std::size_t>(j) * bw + i;
                const std::size_t id = static_cast<std::size_t>(j0 + j) * nu + (i0 + i);
                if (potential) (*potential)[id] = local[k];
                if (region) (*region)[id] = status[k] != 0;
            }
        }
    }
    return out;
}

CapacityResult capacity(const ModelSurface& s, const Window& w, Point x, double r,
                        std::span<const std::int32_t> E, double tol)
{
    require_chart_point(s, x);
    if (!(r > 0.0)) throw Error(ErrorKind::domain_error, "capacity radius must be positive");
    const int nu = w.cells_u() + 1;
    const int nv = w.cells_v() + 1;
    std::vector<std::uint8_t> in_e(static_cast<std::size_t>(nu) * nv, 0);
    for (std::int32_t id : E) {
        if (id < 0 || static_cast<std::size_t>(id) >= in_e.size()) {
            throw Error(ErrorKind::validation, "capacity set contains a node outside the window");
        }
        const Point p{lattice_coord(w.umin, id % nu, w.h), lattice_coord(w.vmin, id / nu, w.h)};
        if (!in_chart(s, p) || dist(s, x, p) > r * (1.0 + 1e-12)) {
            throw Error(ErrorKind::validation, "capacity set must lie in the closed ball B(x, r)");
        }
        in_e[id] = 1;
    }
    bool fits = true;
    std::vector<double> pot;
    std::vector<std::uint8_t> region;
    const Condenser c = solve_condenser(
        s, w, x, r, [&](int i, int j) { return in_e[static_cast<std::size_t>(j) * nu + i] != 0; },
        tol, &fits, &pot, &region);
    if (!fits) {
        throw Error(ErrorKind::geometry_overflow, "ball B(x, 2r) does not fit in the window");
    }
    CapacityResult out;
    out.value = c.energy;
    auto sys = DomainSystem::from_mask(s, w, region, DomainSpec{GeodesicBall{2.0 * r}, x});
    std::vector<double> values(sys->size());
    for (std::size_t k = 0; k < sys->size(); ++k) values[k] = pot[sys->node_of(k)];
    out.potential = ScalarField(sys, std::move(values));
    return out;
}

}  // namespace iuws
