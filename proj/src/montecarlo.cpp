#include "iuws/montecarlo.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <variant>

#include "iuws/error.hpp"

namespace iuws {

namespace {

constexpr std::uint64_t golden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix(std::uint64_t z)
{
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// SplitMix64 in counter mode: draw k of stream p is mix(key_p + k * golden).
class Stream {
public:
    Stream(std::uint64_t seed, std::uint64_t path) : key_(mix(seed ^ mix(path + golden))) {}
    std::uint64_t next() { return mix(key_ + (++counter_) * golden); }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

struct Directions {
    std::array<double, 256> du{};
    std::array<double, 256> dv{};
    Directions()
    {
        for (int k = 0; k < 256; ++k) {
            const double a = 2.0 * std::numbers::pi * k / 256.0;
            du[k] = std::cos(a);
            dv[k] = std::sin(a);
        }
    }
};

const Directions& directions()
{
    static const Directions table;
    return table;
}

/// Membership test with balls and annuli reduced to their chart disks.
class Membership {
public:
    Membership(const ModelSurface& s, const DomainSpec& spec) : s_(s), spec_(spec)
    {
        if (const auto* b = std::get_if<GeodesicBall>(&spec.shape)) {
            outer_ = chart_disk(s, spec.center, b->radius);
            kind_ = Kind::disk;
        } else if (const auto* a = std::get_if<Annulus>(&spec.shape)) {
            outer_ = chart_disk(s, spec.center, a->outer);
            inner_ = chart_disk(s, spec.center, a->inner);
            kind_ = Kind::ring;
        } else if (std::holds_alternative<Sublevel>(spec.shape) ||
                   std::holds_alternative<MaskFile>(spec.shape)) {
            throw Error(ErrorKind::validation,
                        "random walks need a closed-form domain, not " + spec.kind());
        }
    }

    bool operator()(double u, double v) const
    {
        switch (kind_) {
        case Kind::disk:
            return inside(outer_, u, v);
        case Kind::ring:
            return inside(outer_, u, v) && !inside_closed(inner_, u, v);
        default:
            return contains(s_, spec_, Point{u, v});
        }
    }

private:
    enum class Kind { disk, ring, general };

    static bool inside(const ChartDisk& d, double u, double v)
    {
        const double a = u - d.center.u;
        const double b = v - d.center.v;
        return a * a + b * b < d.radius * d.radius;
    }
    static bool inside_closed(const ChartDisk& d, double u, double v)
    {
        const double a = u - d.center.u;
        const double b = v - d.center.v;
        return a * a + b * b <= d.radius * d.radius;
    }

    const ModelSurface& s_;
    const DomainSpec& spec_;
    Kind kind_ = Kind::general;
    ChartDisk outer_{};
    ChartDisk inner_{};
};

}  // namespace

void validate(const WalkConfig& cfg, double h)
{
    if (!(cfg.step > 0.0) || !std::isfinite(cfg.step)) {
        throw Error(ErrorKind::validation, "walk step must be positive");
    }
    if (cfg.paths < 1000) throw Error(ErrorKind::validation, "at least 1000 paths are required");
    if (!(cfg.max_time > 0.0)) throw Error(ErrorKind::validation, "max_time must be positive");
    if (h > 0.0 && cfg.step > h * (1.0 + 1e-12)) {
        throw Error(ErrorKind::validation, "walk step exceeds the reference grid spacing");
    }
}

double walk_time_step(const ModelSurface& s, Point p, double step)
{
    return 0.25 * step * step * conformal_weight_unchecked(s, p.u, p.v);
}

std::vector<McEstimate> mc_survival_curve(const ModelSurface& s, const DomainSpec& spec, Point x,
                                          const std::vector<double>& times, const WalkConfig& cfg)
{
    validate(cfg);
    validate(spec);
    double prev = 0.0;
    for (double t : times) {
        if (!(t >= prev) || t > cfg.max_time) {
            throw Error(ErrorKind::validation, "walk times must be sorted and within [0, max_time]");
        }
        prev = t;
    }
    const Membership inside(s, spec);
    if (!in_chart(s, x) || !inside(x.u, x.v)) {
        throw Error(ErrorKind::invalid_start, "walk start is not in the domain");
    }

    const auto nt = times.size();
    const Directions& dir = directions();
    std::vector<std::int64_t> alive(nt, 0);

#pragma omp parallel
    {
        std::vector<std::int64_t> local(nt, 0);
#pragma omp for schedule(dynamic, 256)
        for (std::int64_t p = 0; p < cfg.paths; ++p) {
            Stream rng(cfg.seed, static_cast<std::uint64_t>(p));
            double u = x.u;
            double v = x.v;
            double elapsed = 0.0;
            std::size_t q = 0;
            std::uint64_t bits = 0;
            int left = 0;
            while (q < nt) {
                const double tau = walk_time_step(s, Point{u, v}, cfg.step);
                // the path counts as alive at t when t falls before the step midpoint
                while (q < nt && times[q] < elapsed + 0.5 * tau) ++local[q++];
                if (q == nt) break;
                if (left == 0) {
                    bits = rng.next();
                    left = 8;
                }
                const auto k = static_cast<std::size_t>(bits & 0xFF);
                bits >>= 8;
                --left;
                u += cfg.step * dir.du[k];
                v += cfg.step * dir.dv[k];
                elapsed += tau;
                if (!inside(u, v)) break;
            }
        }
#pragma omp critical
        for (std::size_t q = 0; q < nt; ++q) alive[q] += local[q];
    }

    std::vector<McEstimate> out(nt);
    const auto n = static_cast<double>(cfg.paths);
    for (std::size_t q = 0; q < nt; ++q) {
        out[q].t = times[q];
        out[q].survivors = alive[q];
        out[q].estimate = static_cast<double>(alive[q]) / n;
        out[q].stderr_ = std::sqrt(out[q].estimate * (1.0 - out[q].estimate) / n);
    }
    return out;
}

McEstimate mc_survival(const ModelSurface& s, const DomainSpec& spec, Point x, double t,
                       const WalkConfig& cfg)
{
    return mc_survival_curve(s, spec, x, {t}, cfg).front();
}

}  // namespace iuws
