#include "iuws/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <variant>

#include "iuws/elliptic.hpp"
#include "iuws/error.hpp"

namespace iuws {

using nlohmann::json;

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorKind::validation, msg); }

void require_object(const json& j, const std::string& where)
{
    if (!j.is_object()) fail(where + " must be a JSON object");
}

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed)
{
    require_object(j, where);
    for (const auto& [key, value] : j.items()) {
        const bool known = std::any_of(allowed.begin(), allowed.end(),
                                       [&](const char* a) { return key == a; });
        if (!known) fail("unknown key '" + key + "' in " + where);
    }
}

double get_number(const json& j, const char* key, double fallback, const std::string& where)
{
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number()) fail(where + "." + key + " must be a number");
    return v.get<double>();
}

std::int64_t get_integer(const json& j, const char* key, std::int64_t fallback,
                         const std::string& where)
{
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number_integer()) fail(where + "." + key + " must be an integer");
    return v.get<std::int64_t>();
}

bool get_bool(const json& j, const char* key, bool fallback, const std::string& where)
{
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_boolean()) fail(where + "." + key + " must be true or false");
    return v.get<bool>();
}

std::string get_string(const json& j, const char* key, const std::string& fallback,
                       const std::string& where)
{
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_string()) fail(where + "." + key + " must be a string");
    return v.get<std::string>();
}

Point point_from_json(const json& v, const std::string& where)
{
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        fail(where + " must be a pair [u, v]");
    }
    return {v[0].get<double>(), v[1].get<double>()};
}

json point_to_json(Point p) { return json::array({p.u, p.v}); }

std::optional<Point> get_point(const json& j, const char* key, const std::string& where)
{
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return point_from_json(j.at(key), where + "." + key);
}

std::vector<double> get_times(const json& j, const char* key, std::vector<double> fallback,
                              const std::string& where)
{
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_array() || v.empty()) fail(where + "." + key + " must be a nonempty array");
    std::vector<double> out;
    for (const json& x : v) {
        if (!x.is_number()) fail(where + "." + key + " must hold numbers");
        out.push_back(x.get<double>());
    }
    if (!std::is_sorted(out.begin(), out.end()) || out.front() < 0.0) {
        fail(where + "." + key + " must be sorted and nonnegative");
    }
    return out;
}

json optional_point(const std::optional<Point>& p) { return p ? point_to_json(*p) : json(nullptr); }

struct Box {
    double umin, umax, vmin, vmax;
};

Box bounding_box(const ModelSurface& s, const DomainSpec& spec)
{
    const Point c = spec.center;
    const auto around = [&](double ru, double rv) -> Box {
        return {c.u - ru, c.u + ru, c.v - rv, c.v + rv};
    };
    return std::visit(
        overloaded{
            [&](const GeodesicBall& b) -> Box {
                const ChartDisk d = chart_disk(s, c, b.radius);
                return {d.center.u - d.radius, d.center.u + d.radius, d.center.v - d.radius,
                        d.center.v + d.radius};
            },
            [&](const Annulus& a) -> Box {
                const ChartDisk d = chart_disk(s, c, a.outer);
                return {d.center.u - d.radius, d.center.u + d.radius, d.center.v - d.radius,
                        d.center.v + d.radius};
            },
            [&](const Rectangle& r) { return around(0.5 * r.width, 0.5 * r.height); },
            [&](const Strip& st) { return around(0.5 * st.length, st.half_width); },
            [&](const JohnComb& jc) { return around(0.5 * jc.size, 0.5 * jc.size); },
            [&](const Cusp& cu) -> Box {
                return {c.u, c.u + cu.length, c.v, c.v + std::pow(cu.length, cu.exponent)};
            },
            [&](const Sublevel&) -> Box { fail("a sublevel domain has no bounding box of its own"); },
            [&](const MaskFile&) -> Box { fail("mask_file domains need an explicit window"); },
        },
        spec.shape);
}

}  // namespace

json to_json(const DomainSpec& spec)
{
    json j = std::visit(
        overloaded{
            [](const GeodesicBall& b) { return json{{"kind", "geodesic_ball"}, {"radius", b.radius}}; },
            [](const Annulus& a) {
                return json{{"kind", "annulus"}, {"inner", a.inner}, {"outer", a.outer}};
            },
            [](const Rectangle& r) {
                return json{{"kind", "rectangle"}, {"width", r.width}, {"height", r.height}};
            },
            [](const Strip& s) {
                return json{{"kind", "strip"}, {"half_width", s.half_width}, {"length", s.length}};
            },
            [](const JohnComb& c) {
                return json{{"kind", "john_comb"},       {"size", c.size},
                            {"g0", c.g0},                {"beta", c.beta},
                            {"wall_height", c.wall_height}, {"wall_thickness", c.wall_thickness},
                            {"max_gaps", c.max_gaps}};
            },
            [](const Cusp& c) {
                return json{{"kind", "cusp"}, {"exponent", c.exponent}, {"length", c.length}};
            },
            [](const Sublevel& s) { return json{{"kind", "sublevel"}, {"threshold", s.threshold}}; },
            [](const MaskFile& m) { return json{{"kind", "mask_file"}, {"path", m.path}}; },
        },
        spec.shape);
    j["center"] = point_to_json(spec.center);
    return j;
}

DomainSpec domain_from_json(const json& j)
{
    const std::string where = "domain";
    require_object(j, where);
    const std::string kind = get_string(j, "kind", "", where);
    DomainSpec spec;
    if (j.contains("center")) spec.center = point_from_json(j.at("center"), where + ".center");

    if (kind == "geodesic_ball") {
        check_keys(j, where, {"kind", "center", "radius"});
        spec.shape = GeodesicBall{get_number(j, "radius", GeodesicBall{}.radius, where)};
    } else if (kind == "annulus") {
        check_keys(j, where, {"kind", "center", "inner", "outer"});
        const Annulus d;
        spec.shape = Annulus{get_number(j, "inner", d.inner, where),
                             get_number(j, "outer", d.outer, where)};
    } else if (kind == "rectangle") {
        check_keys(j, where, {"kind", "center", "width", "height"});
        const Rectangle d;
        spec.shape = Rectangle{get_number(j, "width", d.width, where),
                               get_number(j, "height", d.height, where)};
    } else if (kind == "strip") {
        check_keys(j, where, {"kind", "center", "half_width", "length"});
        const Strip d;
        spec.shape = Strip{get_number(j, "half_width", d.half_width, where),
                           get_number(j, "length", d.length, where)};
    } else if (kind == "john_comb") {
        check_keys(j, where,
                   {"kind", "center", "size", "g0", "beta", "wall_height", "wall_thickness",
                    "max_gaps"});
        const JohnComb d;
        JohnComb c;
        c.size = get_number(j, "size", d.size, where);
        c.g0 = get_number(j, "g0", d.g0, where);
        c.beta = get_number(j, "beta", d.beta, where);
        c.wall_height = get_number(j, "wall_height", d.wall_height, where);
        c.wall_thickness = get_number(j, "wall_thickness", d.wall_thickness, where);
        c.max_gaps = static_cast<int>(get_integer(j, "max_gaps", d.max_gaps, where));
        spec.shape = c;
    } else if (kind == "cusp") {
        check_keys(j, where, {"kind", "center", "exponent", "length"});
        const Cusp d;
        spec.shape = Cusp{get_number(j, "exponent", d.exponent, where),
                          get_number(j, "length", d.length, where)};
    } else if (kind == "mask_file") {
        check_keys(j, where, {"kind", "center", "path"});
        spec.shape = MaskFile{get_string(j, "path", "", where)};
    } else if (kind == "sublevel") {
        check_keys(j, where, {"kind", "center", "threshold"});
        spec.shape = Sublevel{get_number(j, "threshold", 0.0, where)};
    } else {
        fail("unknown domain kind '" + kind + "'");
    }
    validate(spec);
    return spec;
}

WindowBounds default_window(const ModelSurface& s, const DomainSpec& spec, double rmax)
{
    if (s.is_hyperbolic()) return {-1.05, 1.05, -1.05, 1.05};
    const Box b = bounding_box(s, spec);
    const double m = 2.0 * rmax;
    return {b.umin - m, b.umax + m, b.vmin - m, b.vmax + m};
}

RunConfig parse_config(const json& j)
{
    try {
        check_keys(j, "config",
                   {"name", "surface", "window", "h", "domain", "eta", "tolerances", "seed",
                    "capwidth", "green", "survival", "heat_kernel", "iu", "mc", "output"});
        RunConfig cfg;
        cfg.name = get_string(j, "name", "", "config");
        cfg.surface = ModelSurface{
            surface_kind_from_string(get_string(j, "surface", "euclidean", "config"))};
        cfg.h = get_number(j, "h", cfg.h, "config");
        if (!(cfg.h > 0.0)) fail("h must be positive");
        cfg.eta = get_number(j, "eta", cfg.eta, "config");
        if (!(cfg.eta > 0.0 && cfg.eta < 1.0)) fail("eta must lie in (0, 1)");
        if (j.contains("seed")) {
            const json& seed = j.at("seed");
            if (!seed.is_number_integer() || (!seed.is_number_unsigned() && seed.get<std::int64_t>() < 0)) {
                fail("seed must be a nonnegative integer");
            }
            cfg.seed = j.at("seed").get<std::uint64_t>();
        }

        if (!j.contains("domain")) fail("config needs a domain");
        const json& d = j.at("domain");
        if (d.is_object() && d.contains("kind") && d.at("kind") == "sublevel") {
            check_keys(d, "domain", {"kind", "center", "threshold", "base", "pole"});
            if (!d.contains("base")) fail("sublevel domains need a base domain");
            SublevelSource src;
            src.base = domain_from_json(d.at("base"));
            if (std::holds_alternative<Sublevel>(src.base.shape)) {
                fail("a sublevel base must be a closed-form domain");
            }
            src.pole = get_point(d, "pole", "domain").value_or(src.base.center);
            cfg.domain = DomainSpec{Sublevel{get_number(d, "threshold", 0.0, "domain")},
                                    src.base.center};
            cfg.sublevel = src;
        } else {
            cfg.domain = domain_from_json(d);
            if (std::holds_alternative<Sublevel>(cfg.domain.shape)) {
                fail("sublevel domains need a base domain");
            }
        }

        if (j.contains("tolerances")) {
            const json& t = j.at("tolerances");
            check_keys(t, "tolerances", {"solver", "eigen", "capacity"});
            cfg.tolerances.solver = get_number(t, "solver", cfg.tolerances.solver, "tolerances");
            cfg.tolerances.eigen = get_number(t, "eigen", cfg.tolerances.eigen, "tolerances");
            cfg.tolerances.capacity =
                get_number(t, "capacity", cfg.tolerances.capacity, "tolerances");
            if (!(cfg.tolerances.solver > 0.0 && cfg.tolerances.eigen > 0.0 &&
                  cfg.tolerances.capacity > 0.0)) {
                fail("tolerances must be positive");
            }
        }

        if (j.contains("capwidth")) {
            const json& c = j.at("capwidth");
            check_keys(c, "capwidth",
                       {"rmax", "bisect_tol", "max_centers", "deep_centers", "search", "batch"});
            auto& o = cfg.capwidth;
            o.rmax = get_number(c, "rmax", o.rmax, "capwidth");
            o.bisect_tol = get_number(c, "bisect_tol", o.bisect_tol, "capwidth");
            o.max_centers = static_cast<std::size_t>(
                std::max<std::int64_t>(1, get_integer(c, "max_centers", o.max_centers, "capwidth")));
            o.deep_centers = static_cast<std::size_t>(
                std::max<std::int64_t>(0, get_integer(c, "deep_centers", o.deep_centers, "capwidth")));
            o.batch = static_cast<std::size_t>(
                std::max<std::int64_t>(1, get_integer(c, "batch", o.batch, "capwidth")));
            const std::string search = get_string(c, "search", "bisection", "capwidth");
            if (search == "bisection") o.search = WidthSearch::bisection;
            else if (search == "linear") o.search = WidthSearch::linear;
            else fail("capwidth.search must be 'bisection' or 'linear'");
            if (!(o.rmax > 0.0) || o.bisect_tol < 0.0) fail("capwidth radii must be positive");
        }
        cfg.capwidth.eta = cfg.eta;
        cfg.capwidth.solve_tol = cfg.tolerances.capacity;

        if (j.contains("green")) {
            const json& g = j.at("green");
            check_keys(g, "green", {"pole"});
            cfg.green.pole = get_point(g, "pole", "green");
        }
        if (j.contains("survival")) {
            const json& s = j.at("survival");
            check_keys(s, "survival", {"times", "dt", "scheme"});
            cfg.survival.times = get_times(s, "times", cfg.survival.times, "survival");
            cfg.survival.dt = get_number(s, "dt", cfg.survival.dt, "survival");
            cfg.survival.scheme = heat_scheme_from_string(
                get_string(s, "scheme", to_string(cfg.survival.scheme), "survival"));
        }
        if (j.contains("heat_kernel")) {
            const json& s = j.at("heat_kernel");
            check_keys(s, "heat_kernel", {"source", "times"});
            cfg.heat_kernel.source = get_point(s, "source", "heat_kernel");
            cfg.heat_kernel.times = get_times(s, "times", cfg.heat_kernel.times, "heat_kernel");
            if (!(cfg.heat_kernel.times.front() > 0.0)) fail("heat_kernel.times must be positive");
        }
        if (j.contains("iu")) {
            const json& s = j.at("iu");
            check_keys(s, "iu", {"t", "pairs", "tau", "samples", "pole"});
            cfg.iu.t = get_number(s, "t", cfg.iu.t, "iu");
            cfg.iu.pairs = static_cast<int>(get_integer(s, "pairs", cfg.iu.pairs, "iu"));
            cfg.iu.tau = get_number(s, "tau", cfg.iu.tau, "iu");
            cfg.iu.samples = static_cast<int>(get_integer(s, "samples", cfg.iu.samples, "iu"));
            cfg.iu.pole = get_point(s, "pole", "iu");
            if (!(cfg.iu.t > 0.0) || cfg.iu.pairs < 1 || cfg.iu.samples < 1 || cfg.iu.tau < 0.0) {
                fail("iu needs t > 0, pairs >= 1, samples >= 1 and tau >= 0");
            }
        }
        if (j.contains("mc")) {
            const json& s = j.at("mc");
            check_keys(s, "mc", {"start", "times", "paths", "step"});
            cfg.mc.start = get_point(s, "start", "mc");
            cfg.mc.times = get_times(s, "times", cfg.mc.times, "mc");
            cfg.mc.paths = get_integer(s, "paths", cfg.mc.paths, "mc");
            cfg.mc.step = get_number(s, "step", cfg.mc.step, "mc");
            if (cfg.mc.paths < 1000 || cfg.mc.step < 0.0) {
                fail("mc needs paths >= 1000 and a nonnegative step");
            }
        }
        if (j.contains("output")) {
            const json& s = j.at("output");
            check_keys(s, "output", {"dir", "fields"});
            cfg.output.dir = get_string(s, "dir", "", "output");
            cfg.output.fields = get_bool(s, "fields", true, "output");
        }

        if (j.contains("window")) {
            const json& w = j.at("window");
            check_keys(w, "window", {"umin", "umax", "vmin", "vmax"});
            for (const char* k : {"umin", "umax", "vmin", "vmax"}) {
                if (!w.contains(k)) fail(std::string("window.") + k + " is required");
            }
            cfg.window = {get_number(w, "umin", 0, "window"), get_number(w, "umax", 0, "window"),
                          get_number(w, "vmin", 0, "window"), get_number(w, "vmax", 0, "window")};
        } else {
            const DomainSpec& shape = cfg.sublevel ? cfg.sublevel->base : cfg.domain;
            cfg.window = default_window(cfg.surface, shape, cfg.capwidth.rmax);
        }
        make_window(cfg);
        return cfg;
    } catch (const json::exception& e) {
        fail(std::string("malformed config: ") + e.what());
    }
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) fail("cannot open config " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        fail("cannot parse " + path + ": " + e.what());
    }
    return parse_config(j);
}

json to_json(const RunConfig& cfg)
{
    json j;
    j["name"] = cfg.name;
    j["surface"] = to_string(cfg.surface.kind);
    j["window"] = {{"umin", cfg.window.umin},
                   {"umax", cfg.window.umax},
                   {"vmin", cfg.window.vmin},
                   {"vmax", cfg.window.vmax}};
    j["h"] = cfg.h;
    if (cfg.sublevel) {
        json d = to_json(cfg.domain);
        d["base"] = to_json(cfg.sublevel->base);
        d["pole"] = point_to_json(cfg.sublevel->pole);
        j["domain"] = d;
    } else {
        j["domain"] = to_json(cfg.domain);
    }
    j["eta"] = cfg.eta;
    j["tolerances"] = {{"solver", cfg.tolerances.solver},
                       {"eigen", cfg.tolerances.eigen},
                       {"capacity", cfg.tolerances.capacity}};
    j["seed"] = cfg.seed;
    j["capwidth"] = {{"rmax", cfg.capwidth.rmax},
                     {"bisect_tol", cfg.capwidth.bisect_tol},
                     {"max_centers", cfg.capwidth.max_centers},
                     {"deep_centers", cfg.capwidth.deep_centers},
                     {"search", to_string(cfg.capwidth.search)},
                     {"batch", cfg.capwidth.batch}};
    j["green"] = {{"pole", optional_point(cfg.green.pole)}};
    j["survival"] = {{"times", cfg.survival.times},
                     {"dt", cfg.survival.dt},
                     {"scheme", to_string(cfg.survival.scheme)}};
    j["heat_kernel"] = {{"source", optional_point(cfg.heat_kernel.source)},
                        {"times", cfg.heat_kernel.times}};
    j["iu"] = {{"t", cfg.iu.t},
               {"pairs", cfg.iu.pairs},
               {"tau", cfg.iu.tau},
               {"samples", cfg.iu.samples},
               {"pole", optional_point(cfg.iu.pole)}};
    j["mc"] = {{"start", optional_point(cfg.mc.start)},
               {"times", cfg.mc.times},
               {"paths", cfg.mc.paths},
               {"step", cfg.mc.step}};
    j["output"] = {{"dir", cfg.output.dir}, {"fields", cfg.output.fields}};
    return j;
}

Window make_window(const RunConfig& cfg)
{
    return make_window(cfg.window.umin, cfg.window.umax, cfg.window.vmin, cfg.window.vmax, cfg.h);
}

SystemPtr build_system(const RunConfig& cfg)
{
    const Window w = make_window(cfg);
    if (!cfg.sublevel) return build_system(cfg.surface, w, cfg.domain);
    const SystemPtr base = build_system(cfg.surface, w, cfg.sublevel->base);
    const ScalarField g = green(base, cfg.sublevel->pole, cfg.tolerances.solver);
    const double t = std::get<Sublevel>(cfg.domain.shape).threshold;
    return sublevel_domain(*base, g, t);
}

}  // namespace iuws
