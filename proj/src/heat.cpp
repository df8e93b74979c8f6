#include "iuws/heat.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>

#include "iuws/elliptic.hpp"
#include "iuws/error.hpp"

namespace iuws {

namespace {

constexpr double step_tol = 1e-10;
// implicit-Euler half steps taken before switching to Crank-Nicolson
constexpr int startup_half_steps = 4;

void check_times(const std::vector<double>& times)
{
    if (times.empty()) throw Error(ErrorKind::validation, "time grid is empty");
    double prev = 0.0;
    for (double t : times) {
        if (!(t >= prev) || !std::isfinite(t)) {
            throw Error(ErrorKind::validation, "time grid must be finite, nonnegative and sorted");
        }
        prev = t;
    }
}

double min_positive(const std::vector<double>& times)
{
    for (double t : times) {
        if (t > 0.0) return t;
    }
    return 0.0;
}

double resolve_dt(const DomainSystem& sys, const std::vector<double>& times, double dt)
{
    const double t_min = min_positive(times);
    if (t_min == 0.0) return dt > 0.0 ? dt : sys.window().h;
    if (dt <= 0.0) return default_heat_dt(sys, t_min);
    if (dt > t_min / 10.0 * (1.0 + 1e-12)) {
        throw Error(ErrorKind::validation, "dt must not exceed a tenth of the smallest time");
    }
    return dt;
}

}  // namespace

const char* to_string(HeatScheme s)
{
    return s == HeatScheme::crank_nicolson ? "crank_nicolson" : "tr_bdf2";
}

HeatScheme heat_scheme_from_string(const std::string& name)
{
    if (name == "tr_bdf2") return HeatScheme::tr_bdf2;
    if (name == "crank_nicolson") return HeatScheme::crank_nicolson;
    throw Error(ErrorKind::validation, "heat scheme must be 'tr_bdf2' or 'crank_nicolson'");
}

double default_heat_dt(const DomainSystem& sys, double t_min)
{
    return std::min(sys.window().h, t_min / 100.0);
}

double decay_resolving_dt(const DomainSystem& sys, double t_min, double lambda)
{
    const double dt = default_heat_dt(sys, t_min);
    return lambda > 0.0 ? std::min(dt, 0.02 / lambda) : dt;
}

HeatRun evolve(const SystemPtr& sys, std::vector<double> u0, const std::vector<double>& times,
               double dt, HeatScheme scheme)
{
    if (sys->empty()) throw Error(ErrorKind::empty_domain, "heat flow on an empty domain");
    if (u0.size() != sys->size()) throw Error(ErrorKind::validation, "initial data size mismatch");
    check_times(times);

    HeatRun run;
    run.system = sys;
    run.dt = resolve_dt(*sys, times, dt);
    run.scheme = scheme;

    const Stencil& st = sys->stencil();
    const auto mass = sys->mass();
    const std::size_t n = sys->size();
    std::vector<double> u = std::move(u0);
    std::vector<double> next(n), rhs(n), stage(n);
    int startup = scheme == HeatScheme::crank_nicolson ? startup_half_steps : 0;
    // TR-BDF2 with gamma = 2 - sqrt 2; both stages solve with M + gamma k / 2 S
    const double gamma = 2.0 - std::sqrt(2.0);
    const double w_stage = 1.0 / (gamma * (2.0 - gamma));
    const double w_old = (1.0 - gamma) * (1.0 - gamma) / (gamma * (2.0 - gamma));

    const auto record = [&](double t) {
        run.times.push_back(t);
        run.sup.push_back(kernels::max_value(u));
        run.integral.push_back(kernels::dot(u, mass));
        run.states.emplace_back(sys, u);
    };

    double now = 0.0;
    for (double t : times) {
        const double span = t - now;
        if (span > 0.0) {
            const long steps = std::max(1L, static_cast<long>(std::ceil(span / run.dt - 1e-9)));
            const double k = span / static_cast<double>(steps);
            for (long s = 0; s < steps; ++s) {
                if (startup > 0) {
                    for (int half = 0; half < 2; ++half) {
                        for (std::size_t i = 0; i < n; ++i) rhs[i] = mass[i] * u[i];
                        next = u;
                        conjugate_gradient(st, mass, 1.0, 0.5 * k, rhs, next, mass, step_tol);
                        u.swap(next);
                    }
                    startup -= 2;
                } else if (scheme == HeatScheme::tr_bdf2) {
                    const double c = 0.5 * gamma * k;
                    kernels::shifted_apply(st, mass, 1.0, -c, u, rhs);
                    stage = u;
                    conjugate_gradient(st, mass, 1.0, c, rhs, stage, mass, step_tol);
                    for (std::size_t i = 0; i < n; ++i) {
                        rhs[i] = mass[i] * (w_stage * stage[i] - w_old * u[i]);
                    }
                    next = stage;
                    conjugate_gradient(st, mass, 1.0, c, rhs, next, mass, step_tol);
                    u.swap(next);
                } else {
                    kernels::shifted_apply(st, mass, 1.0, -0.5 * k, u, rhs);
                    next = u;
                    conjugate_gradient(st, mass, 1.0, 0.5 * k, rhs, next, mass, step_tol);
                    u.swap(next);
                }
            }
            now = t;
        }
        record(t);
    }
    return run;
}

HeatRun survival(const SystemPtr& sys, const std::vector<double>& times, double dt,
                 HeatScheme scheme)
{
    return evolve(sys, std::vector<double>(sys->size(), 1.0), times, dt, scheme);
}

HeatRun heat_kernel_columns(const SystemPtr& sys, Point x, const std::vector<double>& times,
                            double dt, HeatScheme scheme)
{
    const auto node = sys->nearest_node(x);
    if (!node || !sys->is_interior(*node)) {
        throw Error(ErrorKind::invalid_start, "heat kernel source is not an interior point");
    }
    const auto k = static_cast<std::size_t>(sys->unknown(*node));
    std::vector<double> u0(sys->size(), 0.0);
    u0[k] = 1.0 / sys->mass()[k];
    return evolve(sys, std::move(u0), times, dt, scheme);
}

ScalarField heat_kernel_column(const SystemPtr& sys, double t, Point x, double dt)
{
    if (!(t > 0.0)) throw Error(ErrorKind::validation, "heat kernel time must be positive");
    return heat_kernel_columns(sys, x, {t}, dt).states.front();
}

std::vector<BoundRow> survival_upper_bound_check(const HeatRun& run, double C, double torsion_sup)
{
    if (!(C > 1.0)) throw Error(ErrorKind::validation, "C must exceed 1");
    std::vector<BoundRow> rows;
    for (std::size_t q = 0; q < run.times.size(); ++q) {
        BoundRow row;
        row.t = run.times[q];
        row.measured = run.sup[q];
        row.bound = C / (C - 1.0) * std::exp(-row.t / (C * torsion_sup));
        row.pass = row.measured <= row.bound;
        rows.push_back(row);
    }
    return rows;
}

std::vector<BoundRow> survival_lower_bound_check(const HeatRun& run, double lambda, double slack)
{
    std::vector<BoundRow> rows;
    for (std::size_t q = 0; q < run.times.size(); ++q) {
        BoundRow row;
        row.t = run.times[q];
        row.measured = run.sup[q];
        row.bound = std::exp(-lambda * row.t);
        row.pass = row.bound <= (1.0 + slack) * row.measured;
        rows.push_back(row);
    }
    return rows;
}

DecayFit capwidth_survival_check(const HeatRun& run, double width, double t_from)
{
    DecayFit fit;
    fit.width = width;
    if (!std::isfinite(width) || !(width > 0.0)) return fit;

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int m = 0;
    for (std::size_t q = 0; q < run.times.size(); ++q) {
        if (run.times[q] < t_from || !(run.sup[q] > 0.0)) continue;
        const double x = run.times[q] / (width * width);
        const double y = std::log(run.sup[q]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    const double det = m * sxx - sx * sx;
    if (m < 2 || !(det > 0.0)) {
        throw Error(ErrorKind::validation, "decay fit needs two distinct positive times");
    }
    fit.applicable = true;
    fit.slope = (m * sxy - sx * sy) / det;
    fit.c1 = std::exp((sy - fit.slope * sx) / m);
    fit.c2 = -fit.slope;
    fit.rate = fit.c2 / (width * width);
    return fit;
}

IuRatio iu_ratio(const SystemPtr& sys, const SpectralResult& eig, double t,
                 const std::vector<std::pair<std::int32_t, std::int32_t>>& pairs, double dt)
{
    if (!(t > 0.0)) throw Error(ErrorKind::validation, "IU ratio time must be positive");
    if (eig.phi.values.size() != sys->size()) {
        throw Error(ErrorKind::validation, "eigenfunction does not belong to this system");
    }
    const auto n = static_cast<std::int32_t>(sys->size());
    std::map<std::int32_t, std::vector<std::int32_t>> by_source;
    for (const auto& [x, y] : pairs) {
        if (x < 0 || y < 0 || x >= n || y >= n) {
            throw Error(ErrorKind::validation, "IU sample pair outside the interior");
        }
        by_source[x].push_back(y);
    }

    const auto& phi = eig.phi.values;
    IuRatio out;
    out.min = std::numeric_limits<double>::infinity();
    out.max = 0.0;
    for (const auto& [x, ys] : by_source) {
        const bool source_ok = phi[x] >= 1e-30;
        if (!source_ok) {
            out.skipped += ys.size();
            continue;
        }
        const ScalarField col = heat_kernel_column(sys, t, sys->point(x), dt);
        for (std::int32_t y : ys) {
            if (phi[y] < 1e-30) {
                ++out.skipped;
                continue;
            }
            const double r = std::max(col.values[y], 0.0) / (phi[x] * phi[y]);
            out.min = std::min(out.min, r);
            out.max = std::max(out.max, r);
            ++out.used;
        }
    }
    if (out.used == 0) {
        out.min = 0.0;
        out.spread = std::numeric_limits<double>::quiet_NaN();
    } else {
        out.spread = out.min > 0.0 ? out.max / out.min : std::numeric_limits<double>::infinity();
    }
    return out;
}

IuIntegral iu_integral(const SystemPtr& sys, const ScalarField& green_field, double tau,
                       int samples, const CapWidthOptions& opts)
{
    if (samples < 1) throw Error(ErrorKind::validation, "iu_integral needs at least one sample");
    if (green_field.system != sys) {
        throw Error(ErrorKind::validation, "Green field does not belong to this system");
    }
    const double gmax = green_field.sup();
    if (tau <= 0.0) tau = 0.5 * gmax;
    if (tau > gmax) throw Error(ErrorKind::validation, "tau exceeds the maximum of G");

    IuIntegral out;
    out.tau = tau;
    const auto count = static_cast<std::size_t>(samples);
    out.thresholds.resize(count);
    out.widths.assign(count, 0.0);
    out.partials.assign(count, 0.0);
    out.resolution_exhausted.assign(count, false);
    std::vector<std::exception_ptr> failure(count);

    const double h = sys->window().h;
    const ModelSurface flat = ModelSurface::euclidean();
    for (std::size_t j = 0; j < count; ++j) out.thresholds[j] = std::ldexp(tau, -static_cast<int>(j));

#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t q = 0; q < static_cast<std::ptrdiff_t>(count); ++q) {
        try {
            const SystemPtr level = sublevel_domain(*sys, green_field, out.thresholds[q]);
            if (level->empty()) continue;
            // thickness in chart cells, independent of the metric
            const SystemPtr chart = DomainSystem::from_mask(
                flat, level->window(), std::vector<std::uint8_t>(level->mask().begin(), level->mask().end()),
                level->spec());
            const std::vector<double> depth = depth_map(*chart);
            const double thickest = *std::max_element(depth.begin(), depth.end());
            if (2.0 * thickest < 4.0 * h) {
                out.widths[q] = h;
                out.resolution_exhausted[q] = true;
                continue;
            }
            out.widths[q] = cap_width(*level, opts).w;
        } catch (...) {
            failure[q] = std::current_exception();
        }
    }
    for (const auto& e : failure) {
        if (e) std::rethrow_exception(e);
    }

    const double ln2 = std::log(2.0);
    double total = 0.0;
    for (std::size_t j = 0; j < count; ++j) {
        total += out.widths[j] * out.widths[j] * ln2;
        out.partials[j] = total;
    }
    out.value = total;
    out.infinite = std::isinf(total);
    return out;
}

}  // namespace iuws
