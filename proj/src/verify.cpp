#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

#include "iuws/capwidth.hpp"
#include "iuws/cli.hpp"
#include "iuws/elliptic.hpp"
#include "iuws/error.hpp"
#include "iuws/heat.hpp"
#include "iuws/montecarlo.hpp"
#include "iuws/report.hpp"
#include "iuws/spectrum.hpp"

namespace iuws {

using nlohmann::json;

namespace {

constexpr double pi = std::numbers::pi;

/// Lazily computed quantities of one corpus domain.
class Entry {
public:
    explicit Entry(RunConfig cfg) : cfg_(std::move(cfg)) {}

    const RunConfig& config() const { return cfg_; }
    const std::string& name() const { return cfg_.name; }
    const ModelSurface& surface() const { return cfg_.surface; }

    const SystemPtr& system()
    {
        if (!sys_) sys_ = build_system(cfg_);
        return sys_;
    }
    const TorsionResult& torsion_result()
    {
        if (!torsion_) torsion_ = torsion(system(), cfg_.tolerances.solver);
        return *torsion_;
    }
    const SpectralResult& eigen()
    {
        if (!eigen_) eigen_ = principal_eigenpair(system(), cfg_.tolerances.eigen);
        return *eigen_;
    }
    const CapWidthResult& width(double eta)
    {
        auto it = widths_.find(eta);
        if (it == widths_.end()) {
            CapWidthOptions o = cfg_.capwidth;
            o.eta = eta;
            it = widths_.emplace(eta, cap_width(*system(), o)).first;
        }
        return it->second;
    }
    Point deepest()
    {
        if (!deepest_) {
            const std::vector<double> depth = depth_map(*system());
            const auto k = std::max_element(depth.begin(), depth.end()) - depth.begin();
            deepest_ = system()->point(static_cast<std::size_t>(k));
        }
        return *deepest_;
    }

private:
    RunConfig cfg_;
    SystemPtr sys_;
    std::optional<TorsionResult> torsion_;
    std::optional<SpectralResult> eigen_;
    std::map<double, CapWidthResult> widths_;
    std::optional<Point> deepest_;
};

json pt(Point p) { return json::array({p.u, p.v}); }

bool finite_width(const CapWidthResult& w) { return !w.infinite && !w.empty_domain; }

class Suite {
public:
    explicit Suite(const VerifyOptions& opts) : opts_(opts), rng_(opts.seed)
    {
        for (RunConfig& cfg : load_corpus(opts.corpus, opts.h)) {
            cfg.seed = opts.seed;
            corpus_.push_back(std::make_unique<Entry>(std::move(cfg)));
        }
    }

    VerificationReport run()
    {
        VerificationReport report;
        report.h = opts_.h;
        report.corpus = opts_.corpus;
        report.seed = opts_.seed;
        const auto t0 = std::chrono::steady_clock::now();

        add("G1", "triangle inequality for the geodesic distance", &Suite::g1);
        add("G2", "volume doubling at finite scale", &Suite::g2);
        add("G3", "disk automorphisms preserve the distance", &Suite::g3);
        add("G4", "small hyperbolic balls are nearly Euclidean", &Suite::g4);
        add("M1", "Poincare inequality at finite scale", &Suite::m1);
        add("M2", "stiffness is positive semidefinite", &Suite::m2);
        add("M3", "measure refinement consistency", &Suite::m3);
        add("E1", "torsion is the integral of the Green function", &Suite::e1);
        add("E2", "maximum principle", &Suite::e2);
        add("E3", "capacity is monotone in the plate", &Suite::e3);
        add("E4", "domain monotonicity of the torsion function", &Suite::e4);
        add("E5", "measure is dominated by capacity in balls", &Suite::e5);
        add("W1", "width is monotone in eta", &Suite::w1);
        add("W2", "width is monotone in the domain", &Suite::w2);
        add("W3", "Euclidean width scales with the domain", &Suite::w3);
        add("W4", "capacity ratio is nondecreasing in the radius", &Suite::w4);
        add("S1", "Rayleigh quotient lower bound on small balls", &Suite::s1);
        add("S2", "domain monotonicity of the bottom of the spectrum", &Suite::s2);
        add("S3", "lambda times sup torsion is at least one", &Suite::s3);
        add("S4", "lambda times sup torsion is bounded on thin domains", &Suite::s4);
        add("S5", "width, torsion and bottom of spectrum are comparable", &Suite::s5);
        add("H1", "Dirichlet heat flow loses mass", &Suite::h1);
        add("H2", "comparison principle for survival", &Suite::h2);
        add("H3", "survival is dominated by the Green function", &Suite::h3);
        add("H4", "Gaussian upper bound for the heat kernel", &Suite::h4);
        add("MC1", "walk survival is nonincreasing in time", &Suite::mc1);
        add("MC2", "seeded walks are reproducible", &Suite::mc2);
        add("MC3", "walks agree with the heat solver", &Suite::mc3);
        add("C1", "configs round-trip", &Suite::c1);
        add("C2", "reports are deterministic", &Suite::c2);

        for (const auto& [id, anchor, fn] : checks_) {
            if (!selected(id)) continue;
            CheckRecord r;
            r.id = id;
            r.anchor = anchor;
            const auto c0 = std::chrono::steady_clock::now();
            try {
                (this->*fn)(r);
            } catch (const std::exception& e) {
                r.pass = false;
                r.measured["error"] = e.what();
            }
            r.runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - c0).count();
            if (opts_.progress) opts_.progress(r);
            report.checks.push_back(std::move(r));
        }
        report.runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return report;
    }

private:
    using Check = void (Suite::*)(CheckRecord&);

    void add(std::string id, std::string anchor, Check fn)
    {
        checks_.emplace_back(std::move(id), std::move(anchor), fn);
    }

    bool selected(const std::string& id) const
    {
        if (opts_.only.empty()) return true;
        return std::any_of(opts_.only.begin(), opts_.only.end(),
                           [&](const std::string& p) { return id.rfind(p, 0) == 0; });
    }

    double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }

    Point random_chart_point(const ModelSurface& s)
    {
        if (!s.is_hyperbolic()) return {uniform(-2.0, 2.0), uniform(-2.0, 2.0)};
        const double rho = 0.95 * std::sqrt(uniform(0.0, 1.0));
        const double a = uniform(0.0, 2.0 * pi);
        return {rho * std::cos(a), rho * std::sin(a)};
    }

    /// A ball-shaped system of geodesic radius r at the origin; the window
    /// leaves room for B(0, 2r).
    SystemPtr ball(const ModelSurface& s, double r, double h, double window_radius = 0.0)
    {
        double R = window_radius;
        if (R == 0.0) {
            R = s.is_hyperbolic() ? std::min(1.02, geodesic_to_chart_radius(s, 2.0 * r) + 4.0 * h)
                                  : 2.0 * r + 4.0 * h;
        }
        return build_system(s, make_window(-R, R, -R, R, h), DomainSpec{GeodesicBall{r}, {0, 0}});
    }

    Entry* find(const std::string& name)
    {
        for (auto& e : corpus_) {
            if (e->name() == name) return e.get();
        }
        return nullptr;
    }

    // geometry

    void g1(CheckRecord& r)
    {
        r.description = "dist(p, q) <= dist(p, x) + dist(x, q) on 1000 random triples per surface";
        double worst = -std::numeric_limits<double>::infinity();
        for (const ModelSurface& s : {ModelSurface::euclidean(), ModelSurface::hyperbolic()}) {
            for (int k = 0; k < 1000; ++k) {
                const Point p = random_chart_point(s), q = random_chart_point(s),
                            x = random_chart_point(s);
                const double lhs = dist(s, p, q);
                const double rhs = dist(s, p, x) + dist(s, x, q);
                worst = std::max(worst, (lhs - rhs) / std::max(1.0, rhs));
            }
        }
        r.measured["max_relative_excess"] = worst;
        r.pass = worst <= 1e-12;
    }

    void g2(CheckRecord& r)
    {
        r.description = "V(2r) <= 4 exp(sqrt(K) R0) V(r) for r in (0, R0), R0 = 2";
        const double R0 = 2.0;
        bool pass = true;
        for (const ModelSurface& s : {ModelSurface::euclidean(), ModelSurface::hyperbolic()}) {
            const double K = -s.curvature();
            const double bound = 4.0 * std::exp(std::sqrt(K) * R0);
            double worst = 0.0;
            for (int k = 1; k <= 200; ++k) {
                const double rad = R0 * k / 201.0;
                worst = std::max(worst, ball_volume(s, 2.0 * rad) / ball_volume(s, rad));
            }
            r.measured[to_string(s.kind)] = {{"max_ratio", worst}, {"bound", bound}};
            pass = pass && worst <= bound;
        }
        r.pass = pass;
    }

    void g3(CheckRecord& r)
    {
        r.description = "dist is unchanged by z -> (z - a)/(1 - conj(a) z) and its inverse";
        const ModelSurface H = ModelSurface::hyperbolic();
        double worst = 0.0;
        for (int k = 0; k < 500; ++k) {
            const Point a = random_chart_point(H), p = random_chart_point(H),
                        q = random_chart_point(H);
            const double d = dist(H, p, q);
            const Point pa = mobius_to_origin(a, p), qa = mobius_to_origin(a, q);
            worst = std::max(worst, std::abs(dist(H, pa, qa) - d) / std::max(1.0, d));
            const Point back = mobius_from_origin(a, pa);
            worst = std::max(worst, std::hypot(back.u - p.u, back.v - p.v));
        }
        r.measured["max_relative_error"] = worst;
        r.pass = worst <= 1e-9;
    }

    void g4(CheckRecord& r)
    {
        r.description = "V(r) / (pi r^2) at r = 1e-3 on the hyperbolic surface";
        const double rad = 1e-3;
        const double q = ball_volume(ModelSurface::hyperbolic(), rad) / (pi * rad * rad);
        r.measured["ratio"] = q;
        r.pass = std::abs(q - 1.0) <= 1e-5;
    }

    // mesh

    void m1(CheckRecord& r)
    {
        r.description =
            "max over 100 smooth random f of sum_B m (f - mean)^2 / (r^2 E_2B(f)), "
            "r = 0.5, at h = 0.04, 0.02, 0.01";
        const double rad = 0.5;
        struct Mode {
            double a, ku, kv, phase;
        };
        std::vector<std::vector<Mode>> fields(100);
        for (auto& f : fields) {
            for (int m = 0; m < 6; ++m) {
                f.push_back({uniform(-1, 1), uniform(-3, 3), uniform(-3, 3), uniform(0, 2 * pi)});
            }
        }
        bool pass = true;
        double overall = 0.0;
        for (const ModelSurface& s : {ModelSurface::euclidean(), ModelSurface::hyperbolic()}) {
            // frequencies in units of the chart radius of B so that f is
            // resolved the same way on both surfaces
            const double scale = 1.0 / geodesic_to_chart_radius(s, rad);
            json per_h = json::object();
            std::vector<double> cs;
            for (double h : {0.04, 0.02, 0.01}) {
                const SystemPtr big = ball(s, 2.0 * rad, h, 0.0);
                const SystemPtr small =
                    DomainSystem::from_mask(s, big->window(),
                                            [&] {
                                                std::vector<std::uint8_t> m(big->node_count(), 0);
                                                for (std::size_t k = 0; k < big->size(); ++k) {
                                                    const std::int32_t id = big->node_of(k);
                                                    if (dist(s, {0, 0}, big->node_point(id)) < rad)
                                                        m[id] = 1;
                                                }
                                                return m;
                                            }(),
                                            DomainSpec{GeodesicBall{rad}, {0, 0}});
                double worst = 0.0;
                for (const auto& modes : fields) {
                    const auto f = [&](Point p) {
                        double v = 0.0;
                        for (const Mode& m : modes) {
                            v += m.a * std::cos(scale * (m.ku * p.u + m.kv * p.v) + m.phase);
                        }
                        return v;
                    };
                    const auto mass = small->mass();
                    double mu = 0.0, mean = 0.0;
                    for (std::size_t k = 0; k < small->size(); ++k) {
                        mu += mass[k];
                        mean += mass[k] * f(small->point(k));
                    }
                    mean /= mu;
                    double var = 0.0;
                    for (std::size_t k = 0; k < small->size(); ++k) {
                        const double d = f(small->point(k)) - mean;
                        var += mass[k] * d * d;
                    }
                    // edges with both ends in 2B
                    double energy = 0.0;
                    const Stencil& st = big->stencil();
                    for (std::size_t k = 0; k < big->size(); ++k) {
                        const double fk = f(big->point(k));
                        for (int e : {0, 2}) {
                            const std::int32_t nb = st.nbr[k][e];
                            if (nb < 0) continue;
                            const double d = fk - f(big->point(static_cast<std::size_t>(nb)));
                            energy += d * d;
                        }
                    }
                    worst = std::max(worst, var / (rad * rad * energy));
                }
                per_h[std::to_string(h).substr(0, 4)] = worst;
                cs.push_back(worst);
                overall = std::max(overall, worst);
            }
            const double fine = cs.back();
            double dev = 0.0;
            for (double c : cs) dev = std::max(dev, std::abs(c - fine) / fine);
            r.measured[to_string(s.kind)] = {{"C_by_h", per_h}, {"max_relative_deviation", dev}};
            pass = pass && std::isfinite(fine) && dev <= 0.2;
        }
        r.constants["C"] = overall;
        r.pass = pass;
    }

    void m2(CheckRecord& r)
    {
        r.description = "u^T S u >= 0 for 20 random u on every corpus system";
        double worst = std::numeric_limits<double>::infinity();
        for (auto& e : corpus_) {
            const SystemPtr& sys = e->system();
            for (int k = 0; k < 20; ++k) {
                std::vector<double> u(sys->size());
                for (double& x : u) x = uniform(-1, 1);
                worst = std::min(worst, sys->dirichlet_energy(u));
            }
        }
        r.measured["min_energy"] = worst;
        r.pass = worst >= 0.0;
    }

    void m3(CheckRecord& r)
    {
        r.description = "|mu_h(D) - mu_{h/2}(D)| / mu(D) <= C h with C <= 10 on the corpus";
        double C = 0.0;
        json per = json::object();
        for (auto& e : corpus_) {
            RunConfig half = e->config();
            half.h = 0.5 * half.h;
            const double a = domain_measure(*e->system());
            const double b = domain_measure(*build_system(half));
            const double c = std::abs(a - b) / (b * e->config().h);
            per[e->name()] = {{"mu_h", a}, {"mu_h2", b}, {"C", c}};
            C = std::max(C, c);
        }
        r.measured["domains"] = per;
        r.constants["C"] = C;
        r.pass = C <= 10.0;
    }

    // elliptic

    void e1(CheckRecord& r)
    {
        const double tol = 1e-8;
        r.description = "|sum_y G(x, y) m(y) - v(x)| <= 2 tol sup v at 3 random nodes, tol = 1e-8";
        double worst = 0.0;
        for (const char* name : {"disk", "john_comb", "hyperbolic_ball_r1"}) {
            Entry* e = find(name);
            if (!e) continue;
            const SystemPtr& sys = e->system();
            const TorsionResult v = torsion(sys, 1e-3 * tol);
            for (int k = 0; k < 3; ++k) {
                const auto q = static_cast<std::size_t>(
                    std::uniform_int_distribution<std::size_t>(0, sys->size() - 1)(rng_));
                const ScalarField g = green(sys, sys->point(q), 1e-3 * tol);
                const double total = kernels::dot(g.values, sys->mass());
                worst = std::max(worst, std::abs(total - v.field.values[q]) / v.sup);
            }
        }
        r.measured["max_relative_gap"] = worst;
        r.pass = worst <= 2.0 * tol;
    }

    void e2(CheckRecord& r)
    {
        r.description =
            "harmonic measure and capacitary potentials in [0, 1], torsion >= 0, solved to 1e-12";
        const double eps = 1e-9;
        double lo = 0.0, hi = 0.0;
        for (auto& e : corpus_) {
            const SystemPtr& sys = e->system();
            lo = std::min(lo, *std::min_element(e->torsion_result().field.values.begin(),
                                                e->torsion_result().field.values.end()));
            std::vector<std::int32_t> target;
            for (std::int32_t id : sys->boundary_nodes()) {
                if (sys->node_point(id).u > e->deepest().u) target.push_back(id);
            }
            if (target.empty()) continue;
            const ScalarField hm = harmonic_measure(sys, target, 1e-12);
            for (double x : hm.values) {
                lo = std::min(lo, x);
                hi = std::max(hi, x - 1.0);
            }
        }
        const ModelSurface E = ModelSurface::euclidean();
        const Window w = make_window(-1.2, 1.2, -1.2, 1.2, opts_.h);
        std::vector<std::int32_t> plate;
        const int nu = w.cells_u() + 1;
        for (int j = 0; j <= w.cells_v(); ++j) {
            for (int i = 0; i < nu; ++i) {
                const Point p{lattice_coord(w.umin, i, w.h), lattice_coord(w.vmin, j, w.h)};
                if (std::hypot(p.u, p.v) <= 0.5 && p.u > -0.1) plate.push_back(j * nu + i);
            }
        }
        const CapacityResult cap = capacity(E, w, {0, 0}, 0.5, plate, 1e-12);
        for (double x : cap.potential.values) {
            lo = std::min(lo, x);
            hi = std::max(hi, x - 1.0);
        }
        r.measured["min_value"] = lo;
        r.measured["max_excess_over_one"] = hi;
        r.pass = lo >= -eps && hi <= eps;
    }

    std::vector<std::int32_t> ball_nodes(const ModelSurface& s, const Window& w, Point x, double rad)
    {
        std::vector<std::int32_t> out;
        const int nu = w.cells_u() + 1;
        for (int j = 0; j <= w.cells_v(); ++j) {
            for (int i = 0; i < nu; ++i) {
                const Point p{lattice_coord(w.umin, i, w.h), lattice_coord(w.vmin, j, w.h)};
                if (in_chart(s, p) && dist(s, x, p) <= rad) out.push_back(j * nu + i);
            }
        }
        return out;
    }

    void e3(CheckRecord& r)
    {
        r.description = "Cap(E) <= Cap(F) for 10 random nested node sets E in F in B(x, r)";
        double worst = 0.0;
        for (const ModelSurface& s : {ModelSurface::euclidean(), ModelSurface::hyperbolic()}) {
            const double R = s.is_hyperbolic() ? 0.9 : 1.2;
            const Window w = make_window(-R, R, -R, R, opts_.h);
            const double rad = 0.4;
            const std::vector<std::int32_t> all = ball_nodes(s, w, {0, 0}, rad);
            for (int k = 0; k < 5; ++k) {
                std::vector<std::int32_t> E, F;
                const double pe = uniform(0.05, 0.5);
                const double pf = uniform(pe, 1.0);
                for (std::int32_t id : all) {
                    const double x = uniform(0, 1);
                    if (x < pe) E.push_back(id);
                    if (x < pf) F.push_back(id);
                }
                if (E.empty()) E.push_back(all.front());
                const double ce = capacity(s, w, {0, 0}, rad, E).value;
                const double cf = capacity(s, w, {0, 0}, rad, F).value;
                worst = std::max(worst, (ce - cf) / cf);
            }
        }
        r.measured["max_relative_excess"] = worst;
        r.pass = worst <= 1e-6;
    }

    void e4(CheckRecord& r)
    {
        r.description = "sup v_D <= sup v_D' for nested balls D in D'";
        bool pass = true;
        for (const ModelSurface& s : {ModelSurface::euclidean(), ModelSurface::hyperbolic()}) {
            const double R = s.is_hyperbolic() ? 0.9 : 1.2;
            const Window w = make_window(-R, R, -R, R, opts_.h);
            const double a = torsion(build_system(s, w, {GeodesicBall{0.5}, {0.1, 0.0}})).sup;
            const double b = torsion(build_system(s, w, {GeodesicBall{1.0}, {0.0, 0.0}})).sup;
            r.measured[to_string(s.kind)] = {{"inner", a}, {"outer", b}};
            pass = pass && a <= b;
        }
        r.pass = pass;
    }

    void e5(CheckRecord& r)
    {
        r.description =
            "mu(E)/mu(B) <= C Cap(E)/Cap(B) for random node sets E in B(x, r), x the deepest "
            "node of each corpus domain, r = 0.5";
        const double rad = 0.5;
        double C = 0.0;
        for (auto& e : corpus_) {
            const ModelSurface& s = e->surface();
            const Window w = e->system()->window();
            const Point x = e->deepest();
            if (!ball_fits(s, w, x, 2.0 * rad)) continue;
            const std::vector<std::int32_t> all = ball_nodes(s, w, x, rad);
            const int nu = w.cells_u() + 1;
            const auto measure = [&](const std::vector<std::int32_t>& set) {
                double m = 0.0;
                for (std::int32_t id : set) {
                    const Point p{lattice_coord(w.umin, id % nu, w.h),
                                  lattice_coord(w.vmin, id / nu, w.h)};
                    m += conformal_weight(s, p);
                }
                return m;
            };
            const double cap_b = capacity(s, w, x, rad, all).value;
            const double mu_b = measure(all);
            for (int k = 0; k < 4; ++k) {
                std::vector<std::int32_t> E;
                const double p = uniform(0.05, 0.95);
                const double cut = uniform(-1, 1);
                const double ang = uniform(0, 2 * pi);
                for (std::int32_t id : all) {
                    const Point q{lattice_coord(w.umin, id % nu, w.h) - x.u,
                                  lattice_coord(w.vmin, id / nu, w.h) - x.v};
                    // random density, or a random half-plane slice of the ball
                    const bool keep = (k % 2 == 0)
                                          ? uniform(0, 1) < p
                                          : q.u * std::cos(ang) + q.v * std::sin(ang) >
                                                cut * geodesic_to_chart_radius(s, rad);
                    if (keep) E.push_back(id);
                }
                if (E.empty()) continue;
                const double ratio = (measure(E) / mu_b) / (capacity(s, w, x, rad, E).value / cap_b);
                C = std::max(C, ratio);
            }
        }
        r.constants["C"] = C;
        r.pass = C > 0.0 && C <= 10.0;
    }

    // capacitary width

    void w1(CheckRecord& r)
    {
        r.description = "w_0.3 <= w_0.5 <= w_0.7";
        bool pass = true;
        for (const char* name : {"strip_a0.1", "john_comb", "cusp", "hyperbolic_ball_r0.5"}) {
            Entry* e = find(name);
            if (!e) continue;
            const double a = e->width(0.3).w, b = e->width(0.5).w, c = e->width(0.7).w;
            r.measured[name] = {number(a), number(b), number(c)};
            pass = pass && a <= b && b <= c;
        }
        r.pass = pass;
    }

    double width_of(const ModelSurface& s, const DomainSpec& spec, double R)
    {
        const Window w = make_window(-R, R, -R, R, opts_.h);
        CapWidthOptions o;
        return cap_width(*build_system(s, w, spec), o).w;
    }

    void w2(CheckRecord& r)
    {
        r.description = "w(D) <= w(D') for nested strips and nested disks";
        const ModelSurface E = ModelSurface::euclidean();
        const double s1 = width_of(E, {Strip{0.1, 1.0}, {0, 0}}, 2.6);
        const double s2 = width_of(E, {Strip{0.2, 1.0}, {0, 0}}, 2.6);
        const double d1 = width_of(E, {GeodesicBall{0.3}, {0, 0}}, 2.4);
        const double d2 = width_of(E, {GeodesicBall{0.5}, {0, 0}}, 2.6);
        r.measured["strips"] = {s1, s2};
        r.measured["disks"] = {d1, d2};
        r.pass = s1 <= s2 && d1 <= d2;
    }

    void w3(CheckRecord& r)
    {
        r.description = "|w(2D) - 2 w(D)| <= 2h for a disk and a strip";
        const ModelSurface E = ModelSurface::euclidean();
        const double h = opts_.h;
        const double d1 = width_of(E, {GeodesicBall{0.2}, {0, 0}}, 2.3);
        const double d2 = width_of(E, {GeodesicBall{0.4}, {0, 0}}, 2.5);
        const double s1 = width_of(E, {Strip{0.1, 1.0}, {0, 0}}, 2.6);
        const double s2 = width_of(E, {Strip{0.2, 2.0}, {0, 0}}, 3.1);
        r.measured["disk"] = {d1, d2};
        r.measured["strip"] = {s1, s2};
        r.pass = std::abs(d2 - 2 * d1) <= 2 * h + 1e-12 && std::abs(s2 - 2 * s1) <= 2 * h + 1e-12;
    }

    void w4(CheckRecord& r)
    {
        r.description =
            "capacity_ratio(x, r) nondecreasing over r = 0.05, 0.10, ..., 1 at three centres per "
            "corpus domain";
        double worst = 0.0;
        json where = nullptr;
        for (auto& e : corpus_) {
            const SystemPtr& sys = e->system();
            std::vector<Point> centres{e->deepest()};
            for (int k = 0; k < 2; ++k) {
                centres.push_back(sys->point(
                    std::uniform_int_distribution<std::size_t>(0, sys->size() - 1)(rng_)));
            }
            for (Point x : centres) {
                double prev = 0.0;
                for (int k = 1; k <= 20; ++k) {
                    const double rad = 0.05 * k;
                    if (!ball_fits(sys->surface(), sys->window(), x, 2.0 * rad)) break;
                    const double q = capacity_ratio(*sys, x, rad, e->config().tolerances.capacity);
                    if (prev - q > worst) {
                        worst = prev - q;
                        where = {{"domain", e->name()}, {"center", pt(x)}, {"r", rad}};
                    }
                    prev = std::max(prev, q);
                }
            }
        }
        r.measured["max_decrease"] = worst;
        r.measured["where"] = where;
        r.pass = worst <= 1e-4;
    }

    // spectrum

    void s1(CheckRecord& r)
    {
        r.description = "C = min lambda(B(x, r)) r^2 over r in {0.25, 0.5, 1} and both surfaces";
        double C = std::numeric_limits<double>::infinity();
        for (const ModelSurface& s : {ModelSurface::euclidean(), ModelSurface::hyperbolic()}) {
            json per = json::object();
            for (double rad : {0.25, 0.5, 1.0}) {
                const double lambda = principal_eigenpair(ball(s, rad, opts_.h)).lambda;
                per[std::to_string(rad).substr(0, 4)] = lambda;
                C = std::min(C, lambda * rad * rad);
            }
            r.measured[to_string(s.kind)] = per;
        }
        r.constants["C"] = C;
        r.pass = C >= 0.5;
    }

    void s2(CheckRecord& r)
    {
        r.description = "lambda(D) >= lambda(D') for nested balls and strips";
        bool pass = true;
        json pairs = json::array();
        const auto check = [&](const SystemPtr& inner, const SystemPtr& outer) {
            const double a = principal_eigenpair(inner).lambda;
            const double b = principal_eigenpair(outer).lambda;
            pairs.push_back({a, b});
            pass = pass && a >= b;
        };
        const ModelSurface E = ModelSurface::euclidean();
        const ModelSurface H = ModelSurface::hyperbolic();
        const Window we = make_window(-1.2, 1.2, -1.2, 1.2, opts_.h);
        const Window wh = make_window(-0.9, 0.9, -0.9, 0.9, opts_.h);
        check(build_system(E, we, {GeodesicBall{0.5}, {0.2, 0}}),
              build_system(E, we, {GeodesicBall{1.0}, {0, 0}}));
        check(build_system(H, wh, {GeodesicBall{1.0}, {0.1, 0}}),
              build_system(H, wh, {GeodesicBall{2.0}, {0, 0}}));
        check(build_system(E, we, {Strip{0.1, 2.0}, {0, 0}}),
              build_system(E, we, {Strip{0.2, 2.0}, {0, 0}}));
        r.measured["pairs"] = pairs;
        r.pass = pass;
    }

    void s3(CheckRecord& r)
    {
        r.description = "lambda(D) sup v_D >= 0.98 on every corpus domain";
        double worst = std::numeric_limits<double>::infinity();
        for (auto& e : corpus_) {
            const double p = e->eigen().lambda * e->torsion_result().sup;
            r.measured[e->name()] = p;
            worst = std::min(worst, p);
        }
        r.constants["min_product"] = worst;
        r.pass = worst >= 0.98;
    }

    void s4(CheckRecord& r)
    {
        r.description = "lambda(D) sup v_D <= C on corpus domains with w_1/2 < 1, C <= 20";
        double C = 0.0;
        for (auto& e : corpus_) {
            const CapWidthResult& w = e->width(e->config().eta);
            if (!finite_width(w) || !(w.w < 1.0)) continue;
            const double p = e->eigen().lambda * e->torsion_result().sup;
            r.measured[e->name()] = p;
            C = std::max(C, p);
        }
        r.constants["C"] = C;
        r.pass = C > 0.0 && C <= 20.0;
    }

    void s5(CheckRecord& r)
    {
        r.description =
            "1/(C w^2) <= 1/sup v <= lambda <= C/sup v <= C^2/w^2 with one C over the corpus "
            "domains with w_1/2 < 1";
        double C = 0.0;
        bool lower = true;
        for (auto& e : corpus_) {
            const CapWidthResult& w = e->width(e->config().eta);
            if (!finite_width(w) || !(w.w < 1.0)) {
                r.measured[e->name()] = {{"w", number(w.w)}, {"included", false}};
                continue;
            }
            const double v = e->torsion_result().sup;
            const double lambda = e->eigen().lambda;
            const double w2 = w.w * w.w;
            const double c = std::max({v / w2, w2 / v, lambda * v});
            lower = lower && lambda * v >= 0.98;
            r.measured[e->name()] = {{"w", w.w}, {"sup_v", v}, {"lambda", lambda}, {"C", c}};
            C = std::max(C, c);
        }
        r.constants["C"] = C;
        r.pass = lower && C > 0.0 && C <= 30.0;
    }

    // heat

    void h1(CheckRecord& r)
    {
        r.description = "integral of P(t) strictly decreasing over t = 0.1, 0.25, 0.5, 1";
        bool pass = true;
        for (auto& e : corpus_) {
            const HeatRun run = survival(e->system(), {0.1, 0.25, 0.5, 1.0});
            for (std::size_t q = 1; q < run.integral.size(); ++q) {
                pass = pass && run.integral[q] < run.integral[q - 1];
            }
            r.measured[e->name()] = run.integral;
        }
        r.pass = pass;
    }

    void h2(CheckRecord& r)
    {
        r.description = "P_D(t, x) <= P_D'(t, x) on shared nodes for nested balls, t = 0.1, 0.5";
        double worst = -1.0;
        for (const ModelSurface& s : {ModelSurface::euclidean(), ModelSurface::hyperbolic()}) {
            const double R = s.is_hyperbolic() ? 0.9 : 1.2;
            const Window w = make_window(-R, R, -R, R, opts_.h);
            const SystemPtr a = build_system(s, w, {GeodesicBall{0.5}, {0.1, 0}});
            const SystemPtr b = build_system(s, w, {GeodesicBall{1.0}, {0, 0}});
            const HeatRun ra = survival(a, {0.1, 0.5}, 0.001);
            const HeatRun rb = survival(b, {0.1, 0.5}, 0.001);
            for (std::size_t q = 0; q < 2; ++q) {
                for (std::size_t k = 0; k < a->size(); ++k) {
                    const double pb = rb.states[q].at_node(a->node_of(k));
                    worst = std::max(worst, ra.states[q].values[k] - pb);
                }
            }
        }
        r.measured["max_excess"] = worst;
        r.pass = worst <= 1e-9;
    }

    void h3(CheckRecord& r)
    {
        r.description =
            "P_D(0.5, x) <= C_t G_D(x, o) for x outside B(o, 0.1) on the unit disk, with a "
            "finite IU integral";
        Entry* e = find("disk");
        if (!e) {
            r.skipped = true;
            r.skip_reason = "corpus has no 'disk'";
            return;
        }
        const SystemPtr& sys = e->system();
        const Point o = e->deepest();
        const ScalarField g = green(sys, o);
        const IuIntegral iu = iu_integral(sys, g, 0.0, 8, e->config().capwidth);
        const HeatRun run = survival(sys, {0.5});
        double C = 0.0;
        for (std::size_t k = 0; k < sys->size(); ++k) {
            if (dist(sys->surface(), o, sys->point(k)) <= 0.1) continue;
            C = std::max(C, run.states[0].values[k] / g.values[k]);
        }
        r.measured["iu_integral"] = number(iu.value);
        r.constants["C_t"] = C;
        r.pass = !iu.infinite && std::isfinite(C) && C > 0.0;
    }

    void h4(CheckRecord& r)
    {
        r.description =
            "p(t, x, y) <= C / V(x, sqrt t) exp(-d^2 / (C t)) for d <= 3 sqrt t, t = 0.01, 0.04, "
            "on an obstacle-free window; one C <= 10 for both surfaces";
        double C = 0.0;
        for (const ModelSurface& s : {ModelSurface::euclidean(), ModelSurface::hyperbolic()}) {
            const double R = s.is_hyperbolic() ? 0.8 : 1.5;
            const Window w = make_window(-R - 0.1, R + 0.1, -R - 0.1, R + 0.1, opts_.h);
            const SystemPtr sys = build_system(s, w, {Rectangle{2 * R, 2 * R}, {0, 0}});
            const HeatRun run = heat_kernel_columns(sys, {0, 0}, {0.01, 0.04});
            for (std::size_t q = 0; q < 2; ++q) {
                const double t = run.times[q];
                const double V = ball_volume(s, std::sqrt(t));
                for (std::size_t k = 0; k < sys->size(); ++k) {
                    const double d = dist(s, {0, 0}, sys->point(k));
                    if (d > 3.0 * std::sqrt(t)) continue;
                    const double p = run.states[q].values[k];
                    if (!(p > 0.0)) continue;
                    // smallest C with p <= C / V exp(-d^2 / (C t)); the bound grows with C
                    double lo = 1e-3, hi = 1e3;
                    const auto bound = [&](double c) { return c / V * std::exp(-d * d / (c * t)); };
                    if (bound(hi) < p) {
                        C = std::numeric_limits<double>::infinity();
                        continue;
                    }
                    for (int it = 0; it < 100; ++it) {
                        const double mid = std::sqrt(lo * hi);
                        (bound(mid) >= p ? hi : lo) = mid;
                    }
                    C = std::max(C, hi);
                }
            }
        }
        r.constants["C"] = number(C);
        r.pass = std::isfinite(C) && C <= 10.0;
    }

    // Monte Carlo

    WalkConfig walk(double step, double max_time, std::int64_t paths = 100000)
    {
        WalkConfig w;
        w.step = step;
        w.paths = paths;
        w.seed = opts_.seed;
        w.max_time = max_time;
        return w;
    }

    void mc1(CheckRecord& r)
    {
        r.description = "estimates on one path set are nonincreasing in t";
        const ModelSurface E = ModelSurface::euclidean();
        const std::vector<double> times{0.0, 0.05, 0.1, 0.2, 0.3, 0.5};
        const auto est = mc_survival_curve(E, {GeodesicBall{1.0}, {0, 0}}, {0, 0}, times,
                                           walk(0.5 * opts_.h, 0.5, 20000));
        bool pass = est.front().estimate == 1.0;
        json values = json::array();
        for (std::size_t q = 0; q < est.size(); ++q) {
            values.push_back(est[q].estimate);
            if (q > 0) pass = pass && est[q].estimate <= est[q - 1].estimate;
        }
        r.measured["estimates"] = values;
        r.pass = pass;
    }

    void mc2(CheckRecord& r)
    {
        r.description = "two runs with one seed agree bit for bit";
        const ModelSurface H = ModelSurface::hyperbolic();
        const DomainSpec spec{GeodesicBall{1.0}, {0, 0}};
        const WalkConfig w = walk(0.5 * opts_.h, 0.2, 10000);
        const auto a = mc_survival(H, spec, {0.1, 0}, 0.2, w);
        const auto b = mc_survival(H, spec, {0.1, 0}, 0.2, w);
        r.measured["estimates"] = {a.estimate, b.estimate};
        r.pass = a.survivors == b.survivors && a.estimate == b.estimate;
    }

    void mc3(CheckRecord& r)
    {
        r.description =
            "|MC - PDE| <= 3 standard errors at t = 0.1, 0.5 from the deepest node of each corpus "
            "domain; 1e5 paths, step h_ref/2 with h_ref = min(h, 0.01) on the plane and "
            "min(h, 0.005) on the hyperbolic surface; standard errors are floored at 1/paths";
        bool pass = true;
        double worst = 0.0;
        for (auto& e : corpus_) {
            RunConfig cfg = e->config();
            if (cfg.sublevel || std::holds_alternative<MaskFile>(cfg.domain.shape)) {
                r.measured[e->name()] = "no closed-form predicate";
                continue;
            }
            cfg.h = std::min(cfg.h, cfg.surface.is_hyperbolic() ? 0.005 : 0.01);
            const SystemPtr sys = build_system(cfg);
            const std::vector<double> depth = depth_map(*sys);
            const auto k = static_cast<std::size_t>(
                std::max_element(depth.begin(), depth.end()) - depth.begin());
            const Point x = sys->point(k);
            const HeatRun pde = survival(sys, {0.1, 0.5});
            const auto est =
                mc_survival_curve(cfg.surface, cfg.domain, x, {0.1, 0.5}, walk(0.5 * cfg.h, 0.5));
            json rows = json::array();
            for (std::size_t q = 0; q < 2; ++q) {
                const double ref = pde.states[q].values[k];
                const double n = 100000.0;
                const double se = std::max(
                    {est[q].stderr_, std::sqrt(std::max(0.0, ref * (1.0 - ref)) / n), 1.0 / n});
                const double z = (est[q].estimate - ref) / se;
                rows.push_back({{"t", pde.times[q]}, {"mc", est[q].estimate}, {"pde", ref}, {"z", z}});
                worst = std::max(worst, std::abs(z));
                pass = pass && std::abs(z) <= 3.0;
            }
            r.measured[e->name()] = rows;
        }
        r.constants["max_abs_z"] = worst;
        r.pass = pass;
    }

    // configs

    void c1(CheckRecord& r)
    {
        r.description = "parse(to_json(cfg)) == cfg for every corpus config";
        bool pass = true;
        for (auto& e : corpus_) {
            const RunConfig back = parse_config(to_json(e->config()));
            const bool same = back == e->config() && to_json(back) == to_json(e->config());
            pass = pass && same;
            r.measured[e->name()] = same;
        }
        r.pass = pass;
    }

    void c2(CheckRecord& r)
    {
        r.description = "two torsion and mc runs with one config and seed print identical JSON";
        namespace fs = std::filesystem;
        const fs::path path = fs::temp_directory_path() /
                              ("iuws_determinism_" + std::to_string(opts_.seed) + ".json");
        {
            RunConfig cfg = parse_config(json{{"name", "determinism"},
                                              {"surface", "hyperbolic"},
                                              {"h", 0.04},
                                              {"domain", to_json(DomainSpec{GeodesicBall{1.0}, {0, 0}})},
                                              {"mc", {{"times", {0.1}}, {"paths", 2000}}}});
            std::ofstream f(path);
            f << to_json(cfg).dump(2);
        }
        bool pass = true;
        for (const char* command : {"torsion", "mc"}) {
            std::string first;
            for (int k = 0; k < 2; ++k) {
                std::ostringstream out, err;
                const int code = iuws::run({command, "--config", path.string(), "--no-timestamp",
                                            "--seed", std::to_string(opts_.seed)},
                                           out, err);
                pass = pass && code == exit_code::ok;
                if (k == 0) first = out.str();
                else pass = pass && out.str() == first && !first.empty();
            }
            r.measured[command] = pass;
        }
        fs::remove(path);
        r.pass = pass;
    }

    VerifyOptions opts_;
    std::mt19937_64 rng_;
    std::vector<std::unique_ptr<Entry>> corpus_;
    std::vector<std::tuple<std::string, std::string, Check>> checks_;
};

}  // namespace

VerificationReport run_verify(const VerifyOptions& opts)
{
    if (!(opts.h > 0.0)) throw Error(ErrorKind::validation, "h must be positive");
    Suite suite(opts);
    return suite.run();
}

}  // namespace iuws
