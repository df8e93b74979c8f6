#pragma once

// Discrete Dirichlet problems: torsion, Green function, harmonic measure and
// condenser capacity, all through a Jacobi-preconditioned conjugate gradient.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "iuws/mesh.hpp"

namespace iuws {

inline constexpr double default_solver_tol = 1e-8;

struct CgReport {
    long iterations = 0;
    double residual = 0.0;  // relative, in the chosen norm
};

/// Solves (alpha diag(mass) + beta S) x = rhs by preconditioned CG.
///
/// `x` holds the initial guess on entry. The residual is measured in the
/// diag(norm_weight)^{-1} norm when norm_weight is nonempty, otherwise in the
/// Euclidean norm, relative to the norm of rhs. `max_iter` <= 0 selects the
/// default cap of 50 sqrt(n). Throws NoConvergence carrying the residual.
CgReport conjugate_gradient(const Stencil& st, std::span<const double> mass, double alpha,
                            double beta, std::span<const double> rhs, std::span<double> x,
                            std::span<const double> norm_weight, double tol, long max_iter = 0);

/// u with S u = rhs on the interior, zero Dirichlet data.
ScalarField solve_dirichlet(const SystemPtr& sys, std::span<const double> rhs,
                            double tol = default_solver_tol);

struct TorsionResult {
    ScalarField field;
    double sup = 0.0;
};

/// Solution of the discrete de Saint-Venant problem S u = mass.
TorsionResult torsion(const SystemPtr& sys, double tol = default_solver_tol);

/// Green function with a unit nodal source at the node nearest to `pole`.
ScalarField green(const SystemPtr& sys, Point pole, double tol = default_solver_tol);

/// Discrete harmonic function equal to 1 on `target` (boundary node ids) and
/// 0 on the remaining boundary nodes.
ScalarField harmonic_measure(const SystemPtr& sys, std::span<const std::int32_t> target,
                             double tol = default_solver_tol);

/// Capacitary potential and its energy.
struct CapacityResult {
    double value = 0.0;
    /// Defined on the system B(x, 2r); equals 1 on E.
    ScalarField potential;
};

/// Relative capacity Cap_{B(x,2r)}(E) for a node set E inside the closed
/// geodesic ball B(x, r). The value is the flat chart Dirichlet energy of the
/// potential. Throws geometry_overflow when B(x, 2r) leaves the window.
CapacityResult capacity(const ModelSurface& s, const Window& w, Point x, double r,
                        std::span<const std::int32_t> E, double tol = default_solver_tol);

/// Lattice-local condenser solve shared by capacity and the width scans.
struct Condenser {
    double energy = 0.0;
    std::size_t e_nodes = 0;
    std::size_t free_nodes = 0;
    long iterations = 0;
};

/// Condenser B(x, 2r) with E = {nodes p of the closed ball B(x, r) where
/// in_e(i, j) holds}. Node (i, j) refers to the window lattice. Returns
/// nullopt-like overflow through `fits`: when the ball's chart disk is not
/// inside the window, `fits` is set false and nothing is solved.
Condenser solve_condenser(const ModelSurface& s, const Window& w, Point x, double r,
                          const std::function<bool(int, int)>& in_e, double tol, bool* fits,
                          std::vector<double>* potential = nullptr,
                          std::vector<std::uint8_t>* region = nullptr);

/// True when the chart disk of B(x, radius) lies inside the window.
bool ball_fits(const ModelSurface& s, const Window& w, Point x, double radius);

}  // namespace iuws
