#pragma once

// Capacitary width: the smallest radius r at which, around every centre x of
// the domain, the complement fills at least an eta-fraction of the relative
// capacity of the closed ball B(x, r) inside B(x, 2r).

#include <cstddef>
#include <limits>

#include "iuws/elliptic.hpp"
#include "iuws/mesh.hpp"

namespace iuws {

enum class WidthSearch { bisection, linear };

const char* to_string(WidthSearch s);

struct CapWidthOptions {
    double eta = 0.5;
    double rmax = 1.0;
    /// Radius resolution; 0 selects the grid spacing h.
    double bisect_tol = 0.0;
    std::size_t max_centers = 2000;
    std::size_t deep_centers = 50;
    double solve_tol = 1e-6;
    WidthSearch search = WidthSearch::bisection;
    /// Centres evaluated together before the running maximum is updated.
    std::size_t batch = 32;

    bool operator==(const CapWidthOptions&) const = default;
};

struct CapWidthResult {
    static constexpr double infinity = std::numeric_limits<double>::infinity();

    double w = 0.0;
    double eta = 0.5;
    std::size_t tested_centers = 0;
    /// Centres whose radius had to be searched (the rest passed at the running maximum).
    std::size_t searched_centers = 0;
    Point worst_center{};
    double lo = 0.0;
    double hi = 0.0;
    bool infinite = false;
    /// Some centre could not reach rmax inside the window.
    bool window_limited = false;
    bool empty_domain = false;
    WidthSearch search = WidthSearch::bisection;
};

/// Cap(B(x,r) \ D) / Cap(B(x,r)), both relative to B(x, 2r).
double capacity_ratio(const DomainSystem& sys, Point x, double r, double tol = 1e-6);

CapWidthResult cap_width(const DomainSystem& sys, const CapWidthOptions& opts = {});

struct EtaRobustness {
    CapWidthResult w1;  // at eta1
    CapWidthResult w2;  // at eta2
    double ratio = 1.0; // w1 / w2
};

/// Widths at eta1 >= eta2 and their quotient.
EtaRobustness eta_robustness(const DomainSystem& sys, double eta1, double eta2,
                             CapWidthOptions opts = {});

}  // namespace iuws
