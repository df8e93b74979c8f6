#pragma once

// Run configuration: the JSON document every CLI subcommand reads.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "iuws/capwidth.hpp"
#include "iuws/geometry.hpp"
#include "iuws/heat.hpp"
#include "iuws/mesh.hpp"

namespace iuws {

struct Tolerances {
    double solver = 1e-8;
    double eigen = 1e-6;
    double capacity = 1e-6;
    bool operator==(const Tolerances&) const = default;
};

struct WindowBounds {
    double umin = -1.0;
    double umax = 1.0;
    double vmin = -1.0;
    double vmax = 1.0;
    bool operator==(const WindowBounds&) const = default;
};

/// For `sublevel` domains: {x in base : G_base(x, pole) < threshold}.
struct SublevelSource {
    DomainSpec base;
    Point pole{};
    bool operator==(const SublevelSource&) const = default;
};

struct GreenParams {
    std::optional<Point> pole;
    bool operator==(const GreenParams&) const = default;
};

struct SurvivalParams {
    std::vector<double> times{0.25, 0.5, 1.0};
    /// 0 selects min(h, t_min / 100)
    double dt = 0.0;
    HeatScheme scheme = HeatScheme::tr_bdf2;
    bool operator==(const SurvivalParams&) const = default;
};

struct HeatKernelParams {
    std::optional<Point> source;
    std::vector<double> times{0.1};
    bool operator==(const HeatKernelParams&) const = default;
};

struct IuParams {
    double t = 0.5;
    int pairs = 200;
    /// 0 selects half the maximum of G
    double tau = 0.0;
    int samples = 16;
    std::optional<Point> pole;
    bool operator==(const IuParams&) const = default;
};

struct McParams {
    std::optional<Point> start;
    std::vector<double> times{0.1, 0.5};
    std::int64_t paths = 100000;
    /// 0 selects h / 2
    double step = 0.0;
    bool operator==(const McParams&) const = default;
};

struct OutputParams {
    std::string dir;
    bool fields = true;
    bool operator==(const OutputParams&) const = default;
};

struct RunConfig {
    std::string name;
    ModelSurface surface = ModelSurface::euclidean();
    WindowBounds window;
    double h = 0.02;
    DomainSpec domain;
    std::optional<SublevelSource> sublevel;
    double eta = 0.5;
    Tolerances tolerances;
    std::uint64_t seed = 1;
    CapWidthOptions capwidth;
    GreenParams green;
    SurvivalParams survival;
    HeatKernelParams heat_kernel;
    IuParams iu;
    McParams mc;
    OutputParams output;

    bool operator==(const RunConfig&) const = default;
};

/// Parses a config, injecting defaults. Unknown keys, wrong types and invalid
/// values raise ErrorKind::validation. A missing window is derived from the
/// domain: the bounding box grown by 2 rmax on the plane, [-1.05, 1.05]^2 on
/// the hyperbolic surface.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

/// Full document with every default written out.
nlohmann::json to_json(const RunConfig& cfg);

nlohmann::json to_json(const DomainSpec& spec);
DomainSpec domain_from_json(const nlohmann::json& j);

/// Window bounds derived from the domain as described at parse_config.
WindowBounds default_window(const ModelSurface& s, const DomainSpec& spec, double rmax);

Window make_window(const RunConfig& cfg);

/// Builds the system the config describes, sublevel domains included.
SystemPtr build_system(const RunConfig& cfg);

}  // namespace iuws
