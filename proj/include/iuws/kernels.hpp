#pragma once

// Data-parallel kernels over interior-compressed 5-point grids. The functions
// in iuws::kernels are OpenMP-parallel; iuws::kernels::serial holds the plain
// loops they are tested and benchmarked against.
//
// Reductions are blocked with a fixed block size and summed in block order,
// so results do not depend on the number of threads.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace iuws {

/// Neighbour table of a 5-point stencil on compressed unknowns. Entry k of
/// nbr[i] is the unknown index of the east/west/north/south neighbour, or -1
/// when that neighbour carries Dirichlet data.
struct Stencil {
    std::vector<std::array<std::int32_t, 4>> nbr;

    std::size_t size() const { return nbr.size(); }
};

namespace kernels {

inline constexpr std::size_t reduction_block = 2048;

/// y = S x with S the unit-weight graph Laplacian (diagonal 4, -1 per edge).
void stiffness_apply(const Stencil& st, std::span<const double> x, std::span<double> y);

/// y = alpha * diag(mass) x + beta * S x
void shifted_apply(const Stencil& st, std::span<const double> mass, double alpha, double beta,
                   std::span<const double> x, std::span<double> y);

double dot(std::span<const double> x, std::span<const double> y);

/// sum_i x_i y_i w_i
double weighted_dot(std::span<const double> x, std::span<const double> y,
                    std::span<const double> w);

/// sum_i x_i^2 / w_i
double inverse_weighted_norm2(std::span<const double> x, std::span<const double> w);

/// y += a x
void axpy(double a, std::span<const double> x, std::span<double> y);

/// y = x + a y
void xpay(std::span<const double> x, double a, std::span<double> y);

/// z = x / d (elementwise)
void divide(std::span<const double> x, std::span<const double> d, std::span<double> z);

double max_value(std::span<const double> x);

namespace serial {

void stiffness_apply(const Stencil& st, std::span<const double> x, std::span<double> y);
void shifted_apply(const Stencil& st, std::span<const double> mass, double alpha, double beta,
                   std::span<const double> x, std::span<double> y);
double dot(std::span<const double> x, std::span<const double> y);
double weighted_dot(std::span<const double> x, std::span<const double> y,
                    std::span<const double> w);
double inverse_weighted_norm2(std::span<const double> x, std::span<const double> w);
void axpy(double a, std::span<const double> x, std::span<double> y);
void xpay(std::span<const double> x, double a, std::span<double> y);
void divide(std::span<const double> x, std::span<const double> d, std::span<double> z);
double max_value(std::span<const double> x);

}  // namespace serial

}  // namespace kernels
}  // namespace iuws
