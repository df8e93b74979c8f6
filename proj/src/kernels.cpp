#include "iuws/kernels.hpp"

#include <algorithm>
#include <cstddef>
#include <limits>

namespace iuws::kernels {

namespace {

inline double stencil_row(const std::array<std::int32_t, 4>& nb, const double* x, std::size_t i)
{
    double acc = 4.0 * x[i];
    for (std::int32_t j : nb) {
        if (j >= 0) acc -= x[j];
    }
    return acc;
}

template <class BlockFn>
double blocked_sum(std::size_t n, BlockFn&& block)
{
    const std::size_t nblocks = (n + reduction_block - 1) / reduction_block;
    if (nblocks <= 1) return n == 0 ? 0.0 : block(0, n);
    std::vector<double> partial(nblocks);
    const auto nb = static_cast<std::ptrdiff_t>(nblocks);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < nb; ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * reduction_block;
        const std::size_t hi = std::min(n, lo + reduction_block);
        partial[b] = block(lo, hi);
    }
    double s = 0.0;
    for (double p : partial) s += p;
    return s;
}

}  // namespace

void stiffness_apply(const Stencil& st, std::span<const double> x, std::span<double> y)
{
    const auto n = static_cast<std::ptrdiff_t>(st.size());
    const double* xp = x.data();
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) y[i] = stencil_row(st.nbr[i], xp, i);
}

void shifted_apply(const Stencil& st, std::span<const double> mass, double alpha, double beta,
                   std::span<const double> x, std::span<double> y)
{
    const auto n = static_cast<std::ptrdiff_t>(st.size());
    const double* xp = x.data();
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        y[i] = alpha * mass[i] * xp[i] + beta * stencil_row(st.nbr[i], xp, i);
    }
}

double dot(std::span<const double> x, std::span<const double> y)
{
    return blocked_sum(x.size(), [&](std::size_t lo, std::size_t hi) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += x[i] * y[i];
        return s;
    });
}

double weighted_dot(std::span<const double> x, std::span<const double> y,
                    std::span<const double> w)
{
    return blocked_sum(x.size(), [&](std::size_t lo, std::size_t hi) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += x[i] * y[i] * w[i];
        return s;
    });
}

double inverse_weighted_norm2(std::span<const double> x, std::span<const double> w)
{
    return blocked_sum(x.size(), [&](std::size_t lo, std::size_t hi) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += x[i] * x[i] / w[i];
        return s;
    });
}

void axpy(double a, std::span<const double> x, std::span<double> y)
{
    const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void xpay(std::span<const double> x, double a, std::span<double> y)
{
    const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) y[i] = x[i] + a * y[i];
}

void divide(std::span<const double> x, std::span<const double> d, std::span<double> z)
{
    const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) z[i] = x[i] / d[i];
}

double max_value(std::span<const double> x)
{
    double m = -std::numeric_limits<double>::infinity();
    const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for reduction(max : m) schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) m = std::max(m, x[i]);
    return m;
}

namespace serial {

void stiffness_apply(const Stencil& st, std::span<const double> x, std::span<double> y)
{
    for (std::size_t i = 0; i < st.size(); ++i) y[i] = stencil_row(st.nbr[i], x.data(), i);
}

void shifted_apply(const Stencil& st, std::span<const double> mass, double alpha, double beta,
                   std::span<const double> x, std::span<double> y)
{
    for (std::size_t i = 0; i < st.size(); ++i) {
        y[i] = alpha * mass[i] * x[i] + beta * stencil_row(st.nbr[i], x.data(), i);
    }
}

double dot(std::span<const double> x, std::span<const double> y)
{
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

double weighted_dot(std::span<const double> x, std::span<const double> y,
                    std::span<const double> w)
{
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i] * w[i];
    return s;
}

double inverse_weighted_norm2(std::span<const double> x, std::span<const double> w)
{
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * x[i] / w[i];
    return s;
}

void axpy(double a, std::span<const double> x, std::span<double> y)
{
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

void xpay(std::span<const double> x, double a, std::span<double> y)
{
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + a * y[i];
}

void divide(std::span<const double> x, std::span<const double> d, std::span<double> z)
{
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] / d[i];
}

double max_value(std::span<const double> x)
{
    double m = -std::numeric_limits<double>::infinity();
    for (double v : x) m = std::max(m, v);
    return m;
}

}  // namespace serial

}  // namespace iuws::kernels
