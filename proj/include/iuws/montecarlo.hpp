#pragma once

// Survival probabilities by time-changed random walks in the chart.

#include <cstdint>
#include <vector>

#include "iuws/geometry.hpp"
#include "iuws/mesh.hpp"

namespace iuws {

struct WalkConfig {
    /// chart step length
    double step = 0.01;
    std::int64_t paths = 100000;
    std::uint64_t seed = 1;
    double max_time = 1.0;
};

/// Throws ErrorKind::validation unless step > 0, paths >= 1000 and
/// max_time > 0. A positive h additionally requires step <= h.
void validate(const WalkConfig& cfg, double h = 0.0);

struct McEstimate {
    double t = 0.0;
    double estimate = 1.0;
    double stderr_ = 0.0;
    std::int64_t survivors = 0;
};

/// Survival at each time in `times` (sorted, within [0, max_time]), all from
/// one set of paths. Throws invalid_start when x is not in the domain and
/// validation for shapes without a closed-form predicate.
std::vector<McEstimate> mc_survival_curve(const ModelSurface& s, const DomainSpec& spec, Point x,
                                          const std::vector<double>& times, const WalkConfig& cfg);

McEstimate mc_survival(const ModelSurface& s, const DomainSpec& spec, Point x, double t,
                       const WalkConfig& cfg);

/// Intrinsic time of one chart step of length `step` at p: step^2 w(p) / 4,
/// so that the walk's generator approximates the Laplace-Beltrami operator.
double walk_time_step(const ModelSurface& s, Point p, double step);

}  // namespace iuws
