#include "iuws/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <sstream>

#include "iuws/error.hpp"

namespace iuws {

namespace {

int snap_cells(double extent, double h)
{
    const double n = extent / h;
    const double r = std::round(n);
    if (std::abs(n - r) < 1e-6 * std::max(1.0, r)) return static_cast<int>(r);
    return static_cast<int>(std::ceil(n));
}

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool ok, const std::string& msg)
{
    if (!ok) throw Error(ErrorKind::validation, msg);
}

// Felzenszwalb-Huttenlocher lower envelope of parabolas; infinite samples
// (interior nodes) never enter the envelope.
void distance_transform_1d(const double* f, double* d, int n, std::vector<int>& v,
                           std::vector<double>& z)
{
    constexpr double inf = std::numeric_limits<double>::infinity();
    v.assign(n, 0);
    z.assign(n + 1, 0.0);
    const auto meet = [&](int q, int p) {
        return ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * (q - p));
    };
    int k = -1;
    for (int q = 0; q < n; ++q) {
        if (f[q] == inf) continue;
        if (k < 0) {
            k = 0;
            v[0] = q;
            z[0] = -inf;
            z[1] = inf;
            continue;
        }
        double s = meet(q, v[k]);
        while (s <= z[k]) {
            --k;
            s = meet(q, v[k]);
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = inf;
    }
    if (k < 0) {
        for (int q = 0; q < n; ++q) d[q] = inf;
        return;
    }
    int j = 0;
    for (int q = 0; q < n; ++q) {
        while (z[j + 1] < q) ++j;
        const double diff = q - v[j];
        d[q] = diff * diff + f[v[j]];
    }
}

}  // namespace

double lattice_coord(double origin, int i, double h)
{
    // round away representation noise so nodes meant to sit on a boundary do
    return std::round((origin + i * h) * 1e12) / 1e12;
}

int Window::cells_u() const { return snap_cells(umax - umin, h); }
int Window::cells_v() const { return snap_cells(vmax - vmin, h); }

Window make_window(double umin, double umax, double vmin, double vmax, double h)
{
    require(std::isfinite(h) && h > 0.0, "grid spacing h must be positive");
    require(std::isfinite(umin) && std::isfinite(umax) && umax > umin,
            "window needs umax > umin");
    require(std::isfinite(vmin) && std::isfinite(vmax) && vmax > vmin,
            "window needs vmax > vmin");
    Window w{umin, umax, vmin, vmax, h};
    const int nu = snap_cells(umax - umin, h);
    const int nv = snap_cells(vmax - vmin, h);
    require(nu >= 2 && nv >= 2, "window must span at least two cells per direction");
    require(static_cast<double>(nu + 1) * (nv + 1) < 2.0e8, "window grid too large");
    w.umax = umin + nu * h;
    w.vmax = vmin + nv * h;
    return w;
}

std::string DomainSpec::kind() const
{
    return std::visit(overloaded{
                          [](const GeodesicBall&) { return std::string("geodesic_ball"); },
                          [](const Annulus&) { return std::string("annulus"); },
                          [](const Rectangle&) { return std::string("rectangle"); },
                          [](const Strip&) { return std::string("strip"); },
                          [](const JohnComb&) { return std::string("john_comb"); },
                          [](const Cusp&) { return std::string("cusp"); },
                          [](const Sublevel&) { return std::string("sublevel"); },
                          [](const MaskFile&) { return std::string("mask_file"); },
                      },
                      shape);
}

void validate(const DomainSpec& spec)
{
    require(std::isfinite(spec.center.u) && std::isfinite(spec.center.v),
            "domain center must be finite");
    std::visit(overloaded{
                   [](const GeodesicBall& b) {
                       require(std::isfinite(b.radius) && b.radius >= 0.0,
                               "geodesic_ball radius must be nonnegative");
                   },
                   [](const Annulus& a) {
                       require(a.inner > 0.0 && a.outer > a.inner && std::isfinite(a.outer),
                               "annulus needs 0 < inner < outer");
                   },
                   [](const Rectangle& r) {
                       require(r.width > 0.0 && r.height > 0.0, "rectangle sides must be positive");
                   },
                   [](const Strip& s) {
                       require(s.half_width > 0.0 && s.length > 0.0,
                               "strip half_width and length must be positive");
                   },
                   [](const JohnComb& c) {
                       require(c.size > 0.0, "john_comb size must be positive");
                       require(c.beta > 0.0 && c.beta < 1.0, "john_comb beta must lie in (0,1)");
                       require(c.g0 > 0.0, "john_comb gap g0 must be positive");
                       require(c.wall_height > 0.0 && c.wall_height < 1.0,
                               "john_comb wall_height must lie in (0,1)");
                       require(c.wall_thickness > 0.0 && c.wall_thickness < c.size,
                               "john_comb wall_thickness must be positive");
                       require(c.max_gaps >= 1, "john_comb needs at least one gap");
                       require(c.g0 < c.wall_height * (1.0 - c.beta) / (1.0 + c.beta),
                               "john_comb gaps overlap: need g0 < wall_height (1-beta)/(1+beta)");
                   },
                   [](const Cusp& c) {
                       require(c.exponent > 1.0 && c.length > 0.0,
                               "cusp needs exponent > 1 and positive length");
                   },
                   [](const Sublevel&) {},
                   [](const MaskFile& m) { require(!m.path.empty(), "mask_file needs a path"); },
               },
               spec.shape);
}

bool contains(const ModelSurface& s, const DomainSpec& spec, Point p)
{
    if (!in_chart(s, p)) return false;
    const double du = p.u - spec.center.u;
    const double dv = p.v - spec.center.v;
    return std::visit(
        overloaded{
            [&](const GeodesicBall& b) { return dist(s, spec.center, p) < b.radius; },
            [&](const Annulus& a) {
                const double d = dist(s, spec.center, p);
                return d > a.inner && d < a.outer;
            },
            [&](const Rectangle& r) {
                return std::abs(du) < 0.5 * r.width && std::abs(dv) < 0.5 * r.height;
            },
            [&](const Strip& st) {
                return std::abs(dv) < st.half_width && std::abs(du) < 0.5 * st.length;
            },
            [&](const JohnComb& c) {
                const double half = 0.5 * c.size;
                if (!(std::abs(du) < half && std::abs(dv) < half)) return false;
                if (std::abs(du) > 0.5 * c.wall_thickness) return true;
                // height above the bottom edge, in units of size
                const double y = (dv + half) / c.size;
                if (y >= c.wall_height) return true;
                double g = c.g0;
                double centre = 0.5 * c.wall_height;
                for (int k = 0; k < c.max_gaps; ++k) {
                    if (std::abs(y - centre) < 0.5 * g) return true;
                    g *= c.beta;
                    centre *= c.beta;
                }
                return false;
            },
            [&](const Cusp& c) {
                return du > 0.0 && du < c.length && dv > 0.0 && dv < std::pow(du, c.exponent);
            },
            [&](const Sublevel&) -> bool {
                throw Error(ErrorKind::validation, "sublevel domains have no closed-form predicate");
            },
            [&](const MaskFile&) -> bool {
                throw Error(ErrorKind::validation, "mask_file domains have no closed-form predicate");
            },
        },
        spec.shape);
}

Point DomainSystem::node_point(std::int32_t id) const
{
    return {lattice_coord(window_.umin, node_i(id), window_.h),
            lattice_coord(window_.vmin, node_j(id), window_.h)};
}

std::optional<std::int32_t> DomainSystem::nearest_node(Point p) const
{
    const double fi = std::round((p.u - window_.umin) / window_.h);
    const double fj = std::round((p.v - window_.vmin) / window_.h);
    if (!(fi >= 0 && fj >= 0 && fi < nu_ && fj < nv_)) return std::nullopt;
    return node_id(static_cast<int>(fi), static_cast<int>(fj));
}

std::vector<std::int32_t> DomainSystem::boundary_nodes() const
{
    std::vector<std::int32_t> out;
    for (std::int32_t id = 0; id < static_cast<std::int32_t>(interior_.size()); ++id) {
        if (interior_[id]) continue;
        const int i = node_i(id);
        const int j = node_j(id);
        const bool touches = (i + 1 < nu_ && interior_[id + 1]) || (i > 0 && interior_[id - 1]) ||
                             (j + 1 < nv_ && interior_[id + nu_]) || (j > 0 && interior_[id - nu_]);
        if (touches) out.push_back(id);
    }
    return out;
}

double DomainSystem::dirichlet_energy(std::span<const double> u) const
{
    std::vector<double> su(u.size());
    kernels::stiffness_apply(stencil_, u, su);
    return kernels::dot(u, su);
}

std::shared_ptr<const DomainSystem> DomainSystem::from_mask(const ModelSurface& s, const Window& w,
                                                            std::vector<std::uint8_t> mask,
                                                            DomainSpec spec)
{
    std::shared_ptr<DomainSystem> sys(new DomainSystem());
    sys->surface_ = s;
    sys->window_ = w;
    sys->spec_ = std::move(spec);
    sys->nu_ = w.cells_u() + 1;
    sys->nv_ = w.cells_v() + 1;
    const std::size_t total = static_cast<std::size_t>(sys->nu_) * sys->nv_;
    if (mask.size() != total) throw Error(ErrorKind::validation, "mask size does not match window");

    // window edge carries Dirichlet data; the hyperbolic chart ends at |z| = 1
    for (int j = 0; j < sys->nv_; ++j) {
        for (int i = 0; i < sys->nu_; ++i) {
            const std::int32_t id = sys->node_id(i, j);
            if (!mask[id]) continue;
            if (i == 0 || j == 0 || i == sys->nu_ - 1 || j == sys->nv_ - 1) {
                mask[id] = 0;
                continue;
            }
            if (s.is_hyperbolic()) {
                const Point p = sys->node_point(id);
                if (p.u * p.u + p.v * p.v >= 1.0) mask[id] = 0;
            }
        }
    }
    sys->interior_ = std::move(mask);
    sys->index_.assign(total, -1);
    for (std::int32_t id = 0; id < static_cast<std::int32_t>(total); ++id) {
        if (sys->interior_[id]) {
            sys->index_[id] = static_cast<std::int32_t>(sys->nodes_.size());
            sys->nodes_.push_back(id);
        }
    }
    const std::size_t n = sys->nodes_.size();
    sys->stencil_.nbr.resize(n);
    sys->mass_.resize(n);
    const double h2 = w.h * w.h;
    for (std::size_t k = 0; k < n; ++k) {
        const std::int32_t id = sys->nodes_[k];
        const int nu = sys->nu_;
        sys->stencil_.nbr[k] = {sys->index_[id + 1], sys->index_[id - 1], sys->index_[id + nu],
                                sys->index_[id - nu]};
        const Point p = sys->node_point(id);
        sys->mass_[k] = conformal_weight_unchecked(s, p.u, p.v) * h2;
    }
    return sys;
}

double ScalarField::at_node(std::int32_t id) const
{
    const std::int32_t k = system->unknown(id);
    return k < 0 ? 0.0 : values[k];
}

double ScalarField::at(Point p) const
{
    const auto id = system->nearest_node(p);
    return id ? at_node(*id) : 0.0;
}

double ScalarField::interpolate(Point p) const
{
    const Window& w = system->window();
    const double fu = (p.u - w.umin) / w.h;
    const double fv = (p.v - w.vmin) / w.h;
    const int i = static_cast<int>(std::floor(fu));
    const int j = static_cast<int>(std::floor(fv));
    if (i < 0 || j < 0 || i + 1 >= system->nodes_u() || j + 1 >= system->nodes_v()) return 0.0;
    const double a = fu - i;
    const double b = fv - j;
    return (1 - a) * (1 - b) * at_node(system->node_id(i, j)) +
           a * (1 - b) * at_node(system->node_id(i + 1, j)) +
           (1 - a) * b * at_node(system->node_id(i, j + 1)) +
           a * b * at_node(system->node_id(i + 1, j + 1));
}

double ScalarField::sup() const
{
    if (values.empty()) return 0.0;
    return kernels::max_value(values);
}

SystemPtr build_system(const ModelSurface& s, const Window& w, const DomainSpec& spec)
{
    validate(spec);
    make_window(w.umin, w.umax, w.vmin, w.vmax, w.h);
    if (std::holds_alternative<Sublevel>(spec.shape)) {
        throw Error(ErrorKind::validation, "sublevel domains are built with sublevel_domain");
    }

    const auto check_fits = [&](double radius) {
        require_chart_point(s, spec.center);
        const ChartDisk d = chart_disk(s, spec.center, radius);
        const double margin = 2.0 * w.h;
        if (d.center.u - d.radius < w.umin + margin || d.center.u + d.radius > w.umax - margin ||
            d.center.v - d.radius < w.vmin + margin || d.center.v + d.radius > w.vmax - margin) {
            throw Error(ErrorKind::geometry_overflow,
                        "domain " + spec.kind() + " does not fit in the window with a 2h margin");
        }
    };
    if (const auto* b = std::get_if<GeodesicBall>(&spec.shape)) {
        if (b->radius <= 0.0) throw Error(ErrorKind::empty_domain, "geodesic ball of radius 0");
        check_fits(b->radius);
    }
    if (const auto* a = std::get_if<Annulus>(&spec.shape)) check_fits(a->outer);

    const int nu = w.cells_u() + 1;
    const int nv = w.cells_v() + 1;
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(nu) * nv, 0);

    if (const auto* mf = std::get_if<MaskFile>(&spec.shape)) {
        int width = 0;
        int height = 0;
        mask = read_mask_file(mf->path, &width, &height);
        if (width != nu || height != nv) {
            throw Error(ErrorKind::validation,
                        "mask file " + mf->path + " is " + std::to_string(width) + "x" +
                            std::to_string(height) + " but the window has " + std::to_string(nu) +
                            "x" + std::to_string(nv) + " nodes");
        }
    } else {
        if (const auto* c = std::get_if<JohnComb>(&spec.shape)) {
            // the wall must contain at least one lattice column
            const double lo = spec.center.u - 0.5 * c->wall_thickness;
            const double hi = spec.center.u + 0.5 * c->wall_thickness;
            const double first = std::ceil((lo - w.umin) / w.h - 1e-9);
            if (w.umin + first * w.h > hi + 1e-12) {
                throw Error(ErrorKind::validation,
                            "john_comb wall is thinner than the grid resolves; reduce h");
            }
        }
        for (int j = 0; j < nv; ++j) {
            for (int i = 0; i < nu; ++i) {
                const Point p{lattice_coord(w.umin, i, w.h), lattice_coord(w.vmin, j, w.h)};
                if (!in_chart(s, p)) continue;
                mask[static_cast<std::size_t>(j) * nu + i] = contains(s, spec, p) ? 1 : 0;
            }
        }
    }
    auto sys = DomainSystem::from_mask(s, w, std::move(mask), spec);
    if (sys->empty()) {
        throw Error(ErrorKind::empty_domain, "domain " + spec.kind() + " has no interior nodes");
    }
    return sys;
}

double domain_measure(const DomainSystem& sys)
{
    double total = 0.0;
    for (double m : sys.mass()) total += m;
    return total;
}

SystemPtr sublevel_domain(const DomainSystem& sys, const ScalarField& field, double t)
{
    if (field.values.size() != sys.size()) {
        throw Error(ErrorKind::validation, "field is not defined on this system");
    }
    std::vector<std::uint8_t> mask(sys.node_count(), 0);
    for (std::size_t k = 0; k < sys.size(); ++k) {
        if (field.values[k] < t) mask[sys.node_of(k)] = 1;
    }
    return DomainSystem::from_mask(sys.surface(), sys.window(), std::move(mask),
                                   DomainSpec{Sublevel{t}, sys.spec().center});
}

SystemPtr remove_ball(const DomainSystem& sys, Point o, double radius)
{
    std::vector<std::uint8_t> mask(sys.mask().begin(), sys.mask().end());
    for (std::size_t k = 0; k < sys.size(); ++k) {
        const std::int32_t id = sys.node_of(k);
        if (dist(sys.surface(), o, sys.node_point(id)) <= radius) mask[id] = 0;
    }
    return DomainSystem::from_mask(sys.surface(), sys.window(), std::move(mask), sys.spec());
}

std::vector<int> component_labels(const DomainSystem& sys, int* count)
{
    const std::size_t n = sys.size();
    std::vector<int> label(n, -1);
    int next = 0;
    std::deque<std::int32_t> queue;
    for (std::size_t seed = 0; seed < n; ++seed) {
        if (label[seed] >= 0) continue;
        label[seed] = next;
        queue.push_back(static_cast<std::int32_t>(seed));
        while (!queue.empty()) {
            const std::int32_t k = queue.front();
            queue.pop_front();
            for (std::int32_t nb : sys.stencil().nbr[k]) {
                if (nb >= 0 && label[nb] < 0) {
                    label[nb] = next;
                    queue.push_back(nb);
                }
            }
        }
        ++next;
    }
    if (count) *count = next;
    return label;
}

SystemPtr largest_component(const SystemPtr& sys, bool* split)
{
    int count = 0;
    const auto label = component_labels(*sys, &count);
    if (split) *split = count > 1;
    if (count <= 1) return sys;
    std::vector<std::size_t> sizes(count, 0);
    for (int l : label) ++sizes[l];
    const int best = static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
    std::vector<std::uint8_t> mask(sys->node_count(), 0);
    for (std::size_t k = 0; k < sys->size(); ++k) {
        if (label[k] == best) mask[sys->node_of(k)] = 1;
    }
    return DomainSystem::from_mask(sys->surface(), sys->window(), std::move(mask), sys->spec());
}

std::vector<double> depth_map(const DomainSystem& sys)
{
    constexpr double inf = std::numeric_limits<double>::infinity();
    const int nu = sys.nodes_u();
    const int nv = sys.nodes_v();
    std::vector<double> f(sys.node_count());
    for (std::size_t id = 0; id < f.size(); ++id) f[id] = sys.mask()[id] ? inf : 0.0;

    std::vector<int> v;
    std::vector<double> z;
    std::vector<double> in(std::max(nu, nv));
    std::vector<double> out(std::max(nu, nv));
    for (int i = 0; i < nu; ++i) {
        for (int j = 0; j < nv; ++j) in[j] = f[sys.node_id(i, j)];
        distance_transform_1d(in.data(), out.data(), nv, v, z);
        for (int j = 0; j < nv; ++j) f[sys.node_id(i, j)] = out[j];
    }
    for (int j = 0; j < nv; ++j) {
        for (int i = 0; i < nu; ++i) in[i] = f[sys.node_id(i, j)];
        distance_transform_1d(in.data(), out.data(), nu, v, z);
        for (int i = 0; i < nu; ++i) f[sys.node_id(i, j)] = out[i];
    }

    std::vector<double> depth(sys.size());
    const double h = sys.window().h;
    for (std::size_t k = 0; k < sys.size(); ++k) {
        const std::int32_t id = sys.node_of(k);
        double d = std::sqrt(f[id]) * h;
        if (sys.surface().is_hyperbolic()) {
            const Point p = sys.node_point(id);
            d *= 2.0 / (1.0 - (p.u * p.u + p.v * p.v));
        }
        depth[k] = d;
    }
    return depth;
}

std::vector<std::uint8_t> read_mask_file(const std::string& path, int* width, int* height)
{
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::validation, "cannot open mask file " + path);
    std::string first;
    in >> first;
    int w = 0;
    int h = 0;
    bool has_maxval = false;
    if (first == "P1" || first == "P2") {
        has_maxval = first == "P2";
        in >> w >> h;
    } else {
        std::istringstream ss(first);
        ss >> w;
        in >> h;
    }
    if (!in || w <= 0 || h <= 0) throw Error(ErrorKind::validation, "bad mask header in " + path);
    if (has_maxval) {
        int maxval = 0;
        in >> maxval;
        if (!in || maxval <= 0) throw Error(ErrorKind::validation, "bad mask maxval in " + path);
    }
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(w) * h);
    for (auto& m : mask) {
        int value = 0;
        if (!(in >> value)) throw Error(ErrorKind::validation, "truncated mask file " + path);
        m = value != 0 ? 1 : 0;
    }
    *width = w;
    *height = h;
    return mask;
}

void write_mask_file(const std::string& path, const DomainSystem& sys)
{
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::validation, "cannot write mask file " + path);
    out << "P2\n" << sys.nodes_u() << ' ' << sys.nodes_v() << "\n1\n";
    for (int j = 0; j < sys.nodes_v(); ++j) {
        for (int i = 0; i < sys.nodes_u(); ++i) {
            out << (i ? " " : "") << int(sys.is_interior(sys.node_id(i, j)));
        }
        out << '\n';
    }
}

}  // namespace iuws
