#include "iuws/capwidth.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <optional>

#include <omp.h>

#include "iuws/error.hpp"

namespace iuws {

const char* to_string(WidthSearch s) { return s == WidthSearch::linear ? "linear" : "bisection"; }

namespace {

class RatioEvaluator {
public:
    RatioEvaluator(const DomainSystem& sys, double tol, std::size_t grid_size)
        : sys_(sys), tol_(tol), den_cache_(grid_size + 1)
    {
    }

    /// Ratio at radius r = k * delta around the lattice node `id`. Euclidean
    /// denominators are lattice-translation invariant and cached by k.
    double at_node(std::int32_t id, int k, double r, double depth)
    {
        const Point x = sys_.node_point(id);
        const bool flat = !sys_.surface().is_hyperbolic();
        if (flat && r < depth) return 0.0;
        const double num = numerator(x, r);
        if (num == 0.0) return 0.0;
        double den = 0.0;
        if (flat) {
            std::lock_guard<std::mutex> lock(mutex_);
            if (den_cache_[k]) den = *den_cache_[k];
        }
        if (den == 0.0) {
            den = denominator(x, r);
            if (flat) {
                std::lock_guard<std::mutex> lock(mutex_);
                den_cache_[k] = den;
            }
        }
        return std::clamp(num / den, 0.0, 1.0);
    }

    double at_point(Point x, double r)
    {
        const double num = numerator(x, r);
        if (num == 0.0) return 0.0;
        const double den = denominator(x, r);
        if (den == 0.0) {
            throw Error(ErrorKind::degenerate_input, "closed ball contains no grid node");
        }
        return std::clamp(num / den, 0.0, 1.0);
    }

private:
    double numerator(Point x, double r) const
    {
        bool fits = true;
        const Condenser c = solve_condenser(
            sys_.surface(), sys_.window(), x, r,
            [&](int i, int j) { return !sys_.is_interior(sys_.node_id(i, j)); }, tol_, &fits);
        if (!fits) throw Error(ErrorKind::geometry_overflow, "B(x, 2r) leaves the window");
        return c.energy;
    }

    double denominator(Point x, double r) const
    {
        bool fits = true;
        const Condenser c = solve_condenser(
            sys_.surface(), sys_.window(), x, r, [](int, int) { return true; }, tol_, &fits);
        if (!fits) throw Error(ErrorKind::geometry_overflow, "B(x, 2r) leaves the window");
        return c.energy;
    }

    const DomainSystem& sys_;
    double tol_;
    std::mutex mutex_;
    std::vector<std::optional<double>> den_cache_;
};

struct CenterOutcome {
    int k = 0;            // smallest qualifying grid index, 0 when pruned
    bool pruned = false;
    bool infinite = false;
    bool window_limited = false;
};

std::vector<std::size_t> sample_centers(const DomainSystem& sys, const std::vector<double>& depth,
                                        std::size_t max_centers, std::size_t deep)
{
    const std::size_t n = sys.size();
    int stride = 1;
    while (true) {
        std::size_t count = 0;
        for (std::size_t k = 0; k < n; ++k) {
            const std::int32_t id = sys.node_of(k);
            if (sys.node_i(id) % stride == 0 && sys.node_j(id) % stride == 0) ++count;
        }
        if (count <= max_centers) break;
        ++stride;
    }
    std::vector<std::uint8_t> chosen(n, 0);
    for (std::size_t k = 0; k < n; ++k) {
        const std::int32_t id = sys.node_of(k);
        if (sys.node_i(id) % stride == 0 && sys.node_j(id) % stride == 0) chosen[k] = 1;
    }
    std::vector<std::size_t> by_depth(n);
    std::iota(by_depth.begin(), by_depth.end(), 0);
    std::stable_sort(by_depth.begin(), by_depth.end(),
                     [&](std::size_t a, std::size_t b) { return depth[a] > depth[b]; });
    for (std::size_t q = 0; q < std::min(deep, n); ++q) chosen[by_depth[q]] = 1;

    std::vector<std::size_t> out;
    for (std::size_t k : by_depth) {
        if (chosen[k]) out.push_back(k);
    }
    return out;
}

}  // namespace

double capacity_ratio(const DomainSystem& sys, Point x, double r, double tol)
{
    require_chart_point(sys.surface(), x);
    if (!(r > 0.0)) throw Error(ErrorKind::domain_error, "capacity_ratio radius must be positive");
    if (!ball_fits(sys.surface(), sys.window(), x, 2.0 * r)) {
        throw Error(ErrorKind::geometry_overflow, "B(x, 2r) leaves the window");
    }
    RatioEvaluator eval(sys, tol, 0);
    return eval.at_point(x, r);
}

CapWidthResult cap_width(const DomainSystem& sys, const CapWidthOptions& opts)
{
    if (!(opts.eta > 0.0 && opts.eta < 1.0)) {
        throw Error(ErrorKind::validation, "eta must lie in (0, 1)");
    }
    if (!(opts.rmax > 0.0)) throw Error(ErrorKind::validation, "rmax must be positive");
    CapWidthResult res;
    res.eta = opts.eta;
    res.search = opts.search;
    if (sys.empty()) {
        res.empty_domain = true;
        return res;
    }

    const double delta = opts.bisect_tol > 0.0 ? opts.bisect_tol : sys.window().h;
    const int K = static_cast<int>(std::floor(opts.rmax / delta + 1e-9));
    if (K < 1) throw Error(ErrorKind::validation, "rmax is below the radius resolution");
    const auto radius = [&](int k) { return k * delta; };

    const std::vector<double> depth = depth_map(sys);
    const std::vector<std::size_t> centers =
        sample_centers(sys, depth, opts.max_centers, opts.deep_centers);
    res.tested_centers = centers.size();

    RatioEvaluator eval(sys, opts.solve_tol, static_cast<std::size_t>(K));

    // largest grid index whose doubled ball still fits in the window
    const auto fit_limit = [&](std::int32_t id) {
        const Point x = sys.node_point(id);
        if (ball_fits(sys.surface(), sys.window(), x, 2.0 * radius(K))) return K;
        int lo = 0;
        int hi = K;
        while (hi - lo > 1) {
            const int mid = (lo + hi) / 2;
            if (ball_fits(sys.surface(), sys.window(), x, 2.0 * radius(mid))) lo = mid;
            else hi = mid;
        }
        return lo;
    };

    const std::size_t batch = std::max<std::size_t>(1, opts.batch);

    if (opts.search == WidthSearch::linear) {
        // first grid radius at which every centre qualifies; the last blocker
        // is tried first at the next radius
        std::vector<std::size_t> order = centers;
        std::vector<int> k_fit(centers.size());
        for (std::size_t q = 0; q < centers.size(); ++q) k_fit[q] = fit_limit(sys.node_of(centers[q]));
        std::vector<std::size_t> slot(sys.size());
        for (std::size_t q = 0; q < centers.size(); ++q) slot[centers[q]] = q;
        const auto scan_batch = static_cast<std::size_t>(std::max(1, omp_get_max_threads()));
        std::vector<std::uint8_t> fails(scan_batch);
        std::size_t blocker = centers.front();
        bool blocked_by_window = false;
        for (int k = 1; k <= K; ++k) {
            std::optional<std::size_t> failed;
            for (std::size_t start = 0; start < order.size() && !failed; start += scan_batch) {
                const std::size_t stop = std::min(order.size(), start + scan_batch);
                const auto count = static_cast<std::ptrdiff_t>(stop - start);
#pragma omp parallel for schedule(dynamic, 1)
                for (std::ptrdiff_t q = 0; q < count; ++q) {
                    const std::size_t unknown = order[start + q];
                    if (k > k_fit[slot[unknown]]) {
                        fails[q] = 2;
                        continue;
                    }
                    const double r = radius(k);
                    fails[q] = eval.at_node(sys.node_of(unknown), k, r, depth[unknown]) >= opts.eta
                                   ? 0
                                   : 1;
                }
                for (std::size_t q = 0; q < stop - start; ++q) {
                    if (fails[q]) {
                        failed = start + q;
                        blocked_by_window = fails[q] == 2;
                        break;
                    }
                }
            }
            if (!failed) {
                res.w = radius(k);
                res.hi = radius(k);
                res.lo = radius(k - 1);
                res.worst_center = sys.point(blocker);
                res.searched_centers = centers.size();
                return res;
            }
            blocker = order[*failed];
            std::rotate(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(*failed),
                        order.begin() + static_cast<std::ptrdiff_t>(*failed) + 1);
        }
        res.infinite = true;
        res.window_limited = blocked_by_window;
        res.w = CapWidthResult::infinity;
        res.lo = opts.rmax;
        res.hi = CapWidthResult::infinity;
        res.worst_center = sys.point(blocker);
        res.searched_centers = centers.size();
        return res;
    }

    int k_cur = 0;
    std::size_t worst = centers.front();
    std::vector<CenterOutcome> outcome(batch);
    std::size_t searched = 0;

    for (std::size_t start = 0; start < centers.size(); start += batch) {
        const std::size_t stop = std::min(centers.size(), start + batch);
        const int k_floor = k_cur;
        const auto count = static_cast<std::ptrdiff_t>(stop - start);
#pragma omp parallel for schedule(dynamic, 1)
        for (std::ptrdiff_t q = 0; q < count; ++q) {
            const std::size_t unknown = centers[start + q];
            const std::int32_t id = sys.node_of(unknown);
            const double d = depth[unknown];
            CenterOutcome out;
            const int k_fit = fit_limit(id);
            const auto qualifies = [&](int k) {
                return eval.at_node(id, k, radius(k), d) >= opts.eta;
            };
            if (k_floor > 0 && k_floor <= k_fit && qualifies(k_floor)) {
                out.pruned = true;
                outcome[q] = out;
                continue;
            }
            const int top = std::min(K, k_fit);
            int lo = std::min(k_floor, top);
            if (top < 1 || !qualifies(top)) {
                out.infinite = true;
                out.window_limited = k_fit < K;
                outcome[q] = out;
                continue;
            }
            int hi = top;
            if (opts.search == WidthSearch::bisection) {
                while (hi - lo > 1) {
                    const int mid = lo + (hi - lo) / 2;
                    if (qualifies(mid)) hi = mid;
                    else lo = mid;
                }
            } else {
                for (int k = lo + 1; k < top; ++k) {
                    if (qualifies(k)) {
                        hi = k;
                        break;
                    }
                }
            }
            out.k = hi;
            outcome[q] = out;
        }

        for (std::size_t q = 0; q < stop - start; ++q) {
            const CenterOutcome& out = outcome[q];
            if (!out.pruned) ++searched;
            if (out.infinite) {
                res.infinite = true;
                res.window_limited = out.window_limited;
                res.w = CapWidthResult::infinity;
                res.lo = opts.rmax;
                res.hi = CapWidthResult::infinity;
                res.worst_center = sys.point(centers[start + q]);
                res.searched_centers = searched;
                return res;
            }
            if (!out.pruned && out.k > k_cur) {
                k_cur = out.k;
                worst = centers[start + q];
            }
        }
    }

    res.searched_centers = searched;
    res.w = radius(k_cur);
    res.hi = radius(k_cur);
    res.lo = radius(std::max(0, k_cur - 1));
    res.worst_center = sys.point(worst);
    return res;
}

EtaRobustness eta_robustness(const DomainSystem& sys, double eta1, double eta2,
                             CapWidthOptions opts)
{
    if (!(eta2 > 0.0 && eta2 <= eta1 && eta1 < 1.0)) {
        throw Error(ErrorKind::validation, "eta_robustness needs 0 < eta2 <= eta1 < 1");
    }
    EtaRobustness out;
    opts.eta = eta1;
    out.w1 = cap_width(sys, opts);
    if (eta2 == eta1) {
        out.w2 = out.w1;
        out.ratio = 1.0;
        return out;
    }
    opts.eta = eta2;
    out.w2 = cap_width(sys, opts);
    if (out.w1.infinite || out.w2.infinite) {
        out.ratio = out.w2.infinite ? std::numeric_limits<double>::quiet_NaN()
                                    : CapWidthResult::infinity;
    } else if (out.w2.w == 0.0) {
        out.ratio = out.w1.w == 0.0 ? 1.0 : CapWidthResult::infinity;
    } else {
        out.ratio = out.w1.w / out.w2.w;
    }
    return out;
}

}  // namespace iuws
