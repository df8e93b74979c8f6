#pragma once

// Dirichlet heat semigroup on a DomainSystem: M du/dt = -S u stepped by
// TR-BDF2 (default) or by Crank-Nicolson after a short implicit-Euler start
// (Rannacher smoothing), and the survival / kernel / intrinsic
// ultracontractivity diagnostics built on it.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "iuws/capwidth.hpp"
#include "iuws/mesh.hpp"
#include "iuws/spectrum.hpp"

namespace iuws {

/// TR-BDF2 damps stiff modes completely; Crank-Nicolson carries them with
/// amplification close to -1, which leaves a floor far above survival values
/// of order 1e-20 and below.
enum class HeatScheme { tr_bdf2, crank_nicolson };

const char* to_string(HeatScheme s);
HeatScheme heat_scheme_from_string(const std::string& name);

struct HeatRun {
    SystemPtr system;
    std::vector<double> times;
    std::vector<ScalarField> states;
    /// max over nodes of each state
    std::vector<double> sup;
    /// mass-weighted integral of each state
    std::vector<double> integral;
    HeatScheme scheme = HeatScheme::tr_bdf2;
    double dt = 0.0;
};

/// Default step: min(h, t / 100).
double default_heat_dt(const DomainSystem& sys, double t_min);

/// Step that also resolves the decay rate lambda over many e-folds:
/// min(h, t / 100, 0.02 / lambda).
double decay_resolving_dt(const DomainSystem& sys, double t_min, double lambda);

/// Evolves u0 and records the state at each time in `times` (nondecreasing,
/// >= 0). dt <= 0 selects default_heat_dt.
HeatRun evolve(const SystemPtr& sys, std::vector<double> u0, const std::vector<double>& times,
               double dt = 0.0, HeatScheme scheme = HeatScheme::tr_bdf2);

/// Survival probability P_D(t, .) from u(0) = 1; sup[] holds pi_D(t).
/// Requires dt <= min positive time / 10.
HeatRun survival(const SystemPtr& sys, const std::vector<double>& times, double dt = 0.0,
                 HeatScheme scheme = HeatScheme::tr_bdf2);

/// Heat kernel column p_D(t, x, .) for each t, from the discrete delta
/// e_x / mass(x).
HeatRun heat_kernel_columns(const SystemPtr& sys, Point x, const std::vector<double>& times,
                            double dt = 0.0, HeatScheme scheme = HeatScheme::tr_bdf2);

ScalarField heat_kernel_column(const SystemPtr& sys, double t, Point x, double dt = 0.0);

struct BoundRow {
    double t = 0.0;
    double measured = 0.0;
    double bound = 0.0;
    bool pass = false;
};

/// pi_D(t) <= C / (C - 1) exp(-t / (C ||v_D||)) at every recorded time.
std::vector<BoundRow> survival_upper_bound_check(const HeatRun& run, double C, double torsion_sup);

/// exp(-lambda t) <= (1 + slack) pi_D(t) at every recorded time.
std::vector<BoundRow> survival_lower_bound_check(const HeatRun& run, double lambda,
                                                 double slack = 0.0);

struct DecayFit {
    bool applicable = false;
    double width = 0.0;
    /// slope of log pi_D against t / w^2
    double slope = 0.0;
    /// exp(intercept)
    double c1 = 0.0;
    /// -slope; the decay constant in units of w^-2
    double c2 = 0.0;
    /// -d log pi / dt
    double rate = 0.0;
};

/// Least-squares fit of log pi_D(t) against t / w^2 over the recorded times
/// t >= t_from. Not applicable for an infinite or zero width.
DecayFit capwidth_survival_check(const HeatRun& run, double width, double t_from = 0.0);

struct IuRatio {
    double min = 0.0;
    double max = 0.0;
    double spread = 0.0;
    std::size_t used = 0;
    std::size_t skipped = 0;
};

/// min / max of p(t, x, y) / (phi(x) phi(y)) over pairs of unknown indices.
IuRatio iu_ratio(const SystemPtr& sys, const SpectralResult& eig, double t,
                 const std::vector<std::pair<std::int32_t, std::int32_t>>& pairs, double dt = 0.0);

struct IuIntegral {
    double tau = 0.0;
    double value = 0.0;
    std::vector<double> thresholds;
    std::vector<double> widths;
    std::vector<double> partials;
    /// the sublevel set was thinner than four cells; width reported as h
    std::vector<bool> resolution_exhausted;
    bool infinite = false;
};

/// Riemann sum in log t of w_eta({G < t})^2 dt / t over t_j = tau 2^-j,
/// j = 0..samples-1, each term weighted by ln 2. tau <= 0 selects half the
/// maximum of G.
IuIntegral iu_integral(const SystemPtr& sys, const ScalarField& green_field, double tau,
                       int samples = 16, const CapWidthOptions& opts = {});

}  // namespace iuws
