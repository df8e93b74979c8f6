#pragma once

// Reference values computed independently of the library: radial ODE
// shooting, 1-D quadrature and dense condenser solves on coarse lattices.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

namespace oracle {

inline constexpr double pi = std::numbers::pi;

/// First zero of the solution of u'' + a(rho) u' + lambda u = 0 with u(0) = 1,
/// u'(0) = 0, or +inf when none occurs before rho_max. RK4 from a series start.
inline double first_zero(const std::function<double(double)>& a, double lambda, double rho_max,
                         double step = 2e-4)
{
    double rho = 1e-6;
    double u = 1.0 - lambda * rho * rho / 4.0;
    double du = -lambda * rho / 2.0;
    const auto f = [&](double r, double y, double dy, double& ry, double& rdy) {
        ry = dy;
        rdy = -a(r) * dy - lambda * y;
    };
    while (rho < rho_max) {
        double k1y, k1d, k2y, k2d, k3y, k3d, k4y, k4d;
        f(rho, u, du, k1y, k1d);
        f(rho + step / 2, u + step / 2 * k1y, du + step / 2 * k1d, k2y, k2d);
        f(rho + step / 2, u + step / 2 * k2y, du + step / 2 * k2d, k3y, k3d);
        f(rho + step, u + step * k3y, du + step * k3d, k4y, k4d);
        const double un = u + step / 6 * (k1y + 2 * k2y + 2 * k3y + k4y);
        const double dn = du + step / 6 * (k1d + 2 * k2d + 2 * k3d + k4d);
        if (un <= 0.0) {
            // cubic Hermite root on [rho, rho + step]
            double lo = 0.0, hi = 1.0;
            for (int it = 0; it < 60; ++it) {
                const double s = 0.5 * (lo + hi);
                const double h00 = 2 * s * s * s - 3 * s * s + 1, h10 = s * s * s - 2 * s * s + s;
                const double h01 = -2 * s * s * s + 3 * s * s, h11 = s * s * s - s * s;
                const double v = h00 * u + h10 * step * du + h01 * un + h11 * step * dn;
                (v > 0.0 ? lo : hi) = s;
            }
            return rho + 0.5 * (lo + hi) * step;
        }
        u = un;
        du = dn;
        rho += step;
    }
    return std::numeric_limits<double>::infinity();
}

/// First positive zero of J0.
inline double bessel_j01()
{
    return first_zero([](double r) { return 1.0 / r; }, 1.0, 10.0, 1e-4);
}

/// Principal Dirichlet eigenvalue of the geodesic ball of radius r in the
/// hyperbolic plane: bisection on lambda for the first radial zero.
inline double hyperbolic_ball_lambda(double r)
{
    const auto coth = [](double x) { return 1.0 / std::tanh(x); };
    double lo = 0.25, hi = 0.25 + 40.0 / (r * r) + 10.0;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (first_zero(coth, mid, r + 1.0, std::min(2e-3, r / 2000.0)) > r ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Composite Simpson rule.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 2000)
{
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
    return s * h / 3.0;
}

/// Sup of the torsion function of the hyperbolic geodesic ball of radius r:
/// v(0) = int_0^r (int_0^rho sinh) / sinh(rho) d rho.
inline double hyperbolic_torsion_sup(double r)
{
    return simpson(
        [](double rho) {
            if (rho == 0.0) return 0.0;
            const double inner = simpson([](double s) { return std::sinh(s); }, 0.0, rho, 200);
            return inner / std::sinh(rho);
        },
        0.0, r, 800);
}

/// Condenser energy on a square lattice: nodes with fixed(i, j) = 1 hold 1,
/// nodes outside open(i, j) hold 0, the rest are harmonic for the 5-point
/// Laplacian. Dense Gaussian elimination; meant for lattices of a few
/// hundred free nodes.
inline double dense_condenser(int n, const std::function<bool(int, int)>& open,
                              const std::function<bool(int, int)>& fixed)
{
    std::vector<int> index(static_cast<std::size_t>(n * n), -1);
    int m = 0;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            if (open(i, j) && !fixed(i, j)) index[j * n + i] = m++;
        }
    }
    std::vector<double> A(static_cast<std::size_t>(m) * m, 0.0), b(m, 0.0);
    const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const int row = index[j * n + i];
            if (row < 0) continue;
            A[static_cast<std::size_t>(row) * m + row] = 4.0;
            for (int e = 0; e < 4; ++e) {
                const int ii = i + di[e], jj = j + dj[e];
                if (ii < 0 || jj < 0 || ii >= n || jj >= n) continue;
                const int col = index[jj * n + ii];
                if (col >= 0) A[static_cast<std::size_t>(row) * m + col] -= 1.0;
                else if (open(ii, jj) && fixed(ii, jj)) b[row] += 1.0;
            }
        }
    }
    for (int k = 0; k < m; ++k) {
        const double p = A[static_cast<std::size_t>(k) * m + k];
        for (int r = k + 1; r < m; ++r) {
            const double f = A[static_cast<std::size_t>(r) * m + k] / p;
            if (f == 0.0) continue;
            for (int c = k; c < m; ++c) {
                A[static_cast<std::size_t>(r) * m + c] -= f * A[static_cast<std::size_t>(k) * m + c];
            }
            b[r] -= f * b[k];
        }
    }
    std::vector<double> x(m);
    for (int k = m - 1; k >= 0; --k) {
        double s = b[k];
        for (int c = k + 1; c < m; ++c) s -= A[static_cast<std::size_t>(k) * m + c] * x[c];
        x[k] = s / A[static_cast<std::size_t>(k) * m + k];
    }
    const auto value = [&](int i, int j) {
        if (i < 0 || j < 0 || i >= n || j >= n || !open(i, j)) return 0.0;
        if (fixed(i, j)) return 1.0;
        return x[index[j * n + i]];
    };
    double energy = 0.0;
    for (int j = -1; j < n; ++j) {
        for (int i = -1; i < n; ++i) {
            const double d1 = value(i + 1, j) - value(i, j);
            const double d2 = value(i, j + 1) - value(i, j);
            energy += (j >= 0 ? d1 * d1 : 0.0) + (i >= 0 ? d2 * d2 : 0.0);
        }
    }
    return energy;
}

}  // namespace oracle
