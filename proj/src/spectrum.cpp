#include "iuws/spectrum.hpp"

#include <cmath>

#include "iuws/elliptic.hpp"
#include "iuws/error.hpp"

namespace iuws {

SpectralResult principal_eigenpair(const SystemPtr& sys, double tol, long max_iter)
{
    if (sys->empty()) throw Error(ErrorKind::empty_domain, "eigenproblem on an empty domain");
    if (!(tol > 0.0)) throw Error(ErrorKind::validation, "eigen tolerance must be positive");

    SpectralResult out;
    const SystemPtr comp = largest_component(sys, &out.largest_component_only);
    const Stencil& st = comp->stencil();
    const auto mass = comp->mass();
    const std::size_t n = comp->size();
    const double inner_tol = std::min(1e-10, tol * 1e-3);

    // the torsion function is already close to the ground state
    std::vector<double> phi = torsion(comp, inner_tol).field.values;
    std::vector<double> y(n), rhs(n), sphi(n);

    const auto normalize = [&](std::vector<double>& v) {
        const double norm = std::sqrt(kernels::weighted_dot(v, v, mass));
        for (double& x : v) x /= norm;
    };
    normalize(phi);

    double lambda = 0.0;
    double residual = 0.0;
    for (long it = 1; it <= max_iter; ++it) {
        kernels::stiffness_apply(st, phi, sphi);
        lambda = kernels::dot(phi, sphi);
        for (std::size_t i = 0; i < n; ++i) rhs[i] = sphi[i] - lambda * mass[i] * phi[i];
        residual = std::sqrt(kernels::inverse_weighted_norm2(rhs, mass)) / lambda;
        out.iterations = it - 1;
        if (residual <= tol) break;
        if (it == max_iter) {
            throw NoConvergence("inverse iteration did not converge (residual " +
                                    std::to_string(residual) + ")",
                                residual, it);
        }
        for (std::size_t i = 0; i < n; ++i) {
            rhs[i] = mass[i] * phi[i];
            y[i] = phi[i] / lambda;
        }
        conjugate_gradient(st, {}, 0.0, 1.0, rhs, y, mass, inner_tol);
        phi.swap(y);
        normalize(phi);
    }

    double total = 0.0;
    for (double v : phi) total += v;
    if (total < 0.0) {
        for (double& v : phi) v = -v;
    }
    for (double& v : phi) v = std::max(v, 0.0);

    out.lambda = lambda;
    out.residual = residual;
    if (comp == sys) {
        out.phi = ScalarField(sys, std::move(phi));
    } else {
        out.phi = ScalarField(sys);
        for (std::size_t k = 0; k < n; ++k) {
            out.phi.values[sys->unknown(comp->node_of(k))] = phi[k];
        }
    }
    return out;
}

double rayleigh_quotient(const DomainSystem& sys, const ScalarField& f)
{
    if (f.values.size() != sys.size()) throw Error(ErrorKind::validation, "field size mismatch");
    const double denom = kernels::weighted_dot(f.values, f.values, sys.mass());
    if (!(denom > 0.0)) throw Error(ErrorKind::degenerate_input, "Rayleigh quotient of a zero field");
    return sys.dirichlet_energy(f.values) / denom;
}

std::vector<TailWidth> tail_width_probe(const SystemPtr& sys, Point o,
                                        const std::vector<double>& radii,
                                        const CapWidthOptions& opts)
{
    for (std::size_t i = 1; i < radii.size(); ++i) {
        if (!(radii[i] > radii[i - 1])) {
            throw Error(ErrorKind::validation, "tail radii must be increasing");
        }
    }
    std::vector<TailWidth> out;
    for (double R : radii) {
        if (!(R >= 0.0)) throw Error(ErrorKind::validation, "tail radius must be nonnegative");
        const SystemPtr tail = remove_ball(*sys, o, R);
        out.push_back({R, cap_width(*tail, opts)});
    }
    return out;
}

}  // namespace iuws
