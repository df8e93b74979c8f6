#pragma once

// Bottom of the Dirichlet spectrum: smallest eigenpair of S phi = lambda M phi
// by inverse power iteration, with the conjugate gradient as inner solver.

#include <vector>

#include "iuws/capwidth.hpp"
#include "iuws/mesh.hpp"

namespace iuws {

inline constexpr double default_eigen_tol = 1e-6;

struct SpectralResult {
    double lambda = 0.0;
    /// Mass-normalized, nonnegative; zero off the component it was computed on.
    ScalarField phi;
    /// ||S phi - lambda M phi||_{M^-1} / lambda
    double residual = 0.0;
    long iterations = 0;
    /// The interior was disconnected and only the largest component was used.
    bool largest_component_only = false;
};

SpectralResult principal_eigenpair(const SystemPtr& sys, double tol = default_eigen_tol,
                                   long max_iter = 1000);

/// (f^T S f) / (f^T M f)
double rayleigh_quotient(const DomainSystem& sys, const ScalarField& f);

struct TailWidth {
    double radius = 0.0;
    CapWidthResult width;
};

/// Capacitary width of D \ closed B(o, R) for each R.
std::vector<TailWidth> tail_width_probe(const SystemPtr& sys, Point o,
                                        const std::vector<double>& radii,
                                        const CapWidthOptions& opts = {});

}  // namespace iuws
