#pragma once

// Uniform chart grids, open sets as interior-node masks, and the lumped
// Laplace-Beltrami discretization: flat 5-point Dirichlet energy plus a
// diagonal mass carrying the conformal factor.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "iuws/geometry.hpp"
#include "iuws/kernels.hpp"

namespace iuws {

/// Rectangular chart window with grid spacing h. Construct through make_window,
/// which snaps the upper corners onto the lattice.
struct Window {
    double umin = 0.0;
    double umax = 0.0;
    double vmin = 0.0;
    double vmax = 0.0;
    double h = 0.0;

    int cells_u() const;
    int cells_v() const;
    bool operator==(const Window&) const = default;
};

Window make_window(double umin, double umax, double vmin, double vmax, double h);

/// Coordinate of lattice line i, rounded to 1e-12 so that nodes meant to lie
/// on a shape boundary compare equal to it.
double lattice_coord(double origin, int i, double h);

// Domain shapes. Lengths are geodesic for balls and annuli and chart lengths
// otherwise; `center` in DomainSpec positions every shape.
struct GeodesicBall {
    double radius = 1.0;
    bool operator==(const GeodesicBall&) const = default;
};
struct Annulus {
    double inner = 0.5;
    double outer = 1.0;
    bool operator==(const Annulus&) const = default;
};
struct Rectangle {
    double width = 1.0;
    double height = 1.0;
    bool operator==(const Rectangle&) const = default;
};
/// Horizontal strip |v - c.v| < half_width, truncated to |u - c.u| < length / 2.
struct Strip {
    double half_width = 0.1;
    double length = 2.0;
    bool operator==(const Strip&) const = default;
};
/// Square of side `size` minus a vertical wall rising from the bottom edge
/// along the centre line. The wall has gaps of width g0 * beta^k (in units
/// of size) centred at wall_height * beta^k / 2, accumulating at the base.
struct JohnComb {
    double size = 1.0;
    double g0 = 0.1;
    double beta = 0.5;
    double wall_height = 0.5;
    double wall_thickness = 0.02;
    int max_gaps = 8;
    bool operator==(const JohnComb&) const = default;
};
/// {0 < u - c.u < length, 0 < v - c.v < (u - c.u)^exponent}
struct Cusp {
    double exponent = 4.0;
    double length = 1.0;
    bool operator==(const Cusp&) const = default;
};
/// {x in D : field(x) < threshold}; only produced by sublevel_domain.
struct Sublevel {
    double threshold = 0.0;
    bool operator==(const Sublevel&) const = default;
};
struct MaskFile {
    std::string path;
    bool operator==(const MaskFile&) const = default;
};

using DomainShape =
    std::variant<GeodesicBall, Annulus, Rectangle, Strip, JohnComb, Cusp, Sublevel, MaskFile>;

struct DomainSpec {
    DomainShape shape = GeodesicBall{};
    Point center{};

    std::string kind() const;
    bool operator==(const DomainSpec&) const = default;
};

/// Throws ErrorKind::validation when shape parameters are out of range.
void validate(const DomainSpec& spec);

/// Membership of a chart point in the open set described by spec.
/// Not available for Sublevel and MaskFile shapes.
bool contains(const ModelSurface& s, const DomainSpec& spec, Point p);

/// Discretized open set. Immutable once built; share through SystemPtr.
class DomainSystem {
public:
    const ModelSurface& surface() const { return surface_; }
    const Window& window() const { return window_; }
    const DomainSpec& spec() const { return spec_; }

    int nodes_u() const { return nu_; }
    int nodes_v() const { return nv_; }
    std::size_t node_count() const { return interior_.size(); }

    /// Number of interior nodes (unknowns).
    std::size_t size() const { return nodes_.size(); }
    bool empty() const { return nodes_.empty(); }

    std::int32_t node_id(int i, int j) const { return j * nu_ + i; }
    int node_i(std::int32_t id) const { return id % nu_; }
    int node_j(std::int32_t id) const { return id / nu_; }
    Point node_point(std::int32_t id) const;

    bool is_interior(std::int32_t id) const { return interior_[id] != 0; }
    /// Unknown index of a node, -1 when not interior.
    std::int32_t unknown(std::int32_t id) const { return index_[id]; }
    std::int32_t node_of(std::size_t unknown) const { return nodes_[unknown]; }
    Point point(std::size_t unknown) const { return node_point(nodes_[unknown]); }

    std::span<const std::uint8_t> mask() const { return interior_; }
    std::span<const std::int32_t> nodes() const { return nodes_; }
    const Stencil& stencil() const { return stencil_; }
    std::span<const double> mass() const { return mass_; }

    /// Nearest lattice node to p, or nullopt when p lies outside the window.
    std::optional<std::int32_t> nearest_node(Point p) const;

    /// Non-interior nodes with an interior 4-neighbour.
    std::vector<std::int32_t> boundary_nodes() const;

    /// u^T S u
    double dirichlet_energy(std::span<const double> u) const;

    static std::shared_ptr<const DomainSystem> from_mask(const ModelSurface& s, const Window& w,
                                                         std::vector<std::uint8_t> mask,
                                                         DomainSpec spec);

private:
    DomainSystem() = default;

    ModelSurface surface_;
    Window window_;
    DomainSpec spec_;
    int nu_ = 0;
    int nv_ = 0;
    std::vector<std::uint8_t> interior_;
    std::vector<std::int32_t> index_;
    std::vector<std::int32_t> nodes_;
    Stencil stencil_;
    std::vector<double> mass_;
};

using SystemPtr = std::shared_ptr<const DomainSystem>;

/// Nodal values on the interior of a system, implicitly zero elsewhere.
struct ScalarField {
    SystemPtr system;
    std::vector<double> values;

    ScalarField() = default;
    explicit ScalarField(SystemPtr sys) : system(std::move(sys)), values(system->size(), 0.0) {}
    ScalarField(SystemPtr sys, std::vector<double> v) : system(std::move(sys)), values(std::move(v)) {}

    /// Value at a lattice node (0 off the interior).
    double at_node(std::int32_t id) const;
    /// Value at the lattice node nearest to p.
    double at(Point p) const;
    /// Bilinear interpolation of the zero-extended field; 0 outside the window.
    double interpolate(Point p) const;
    double sup() const;
};

/// Discretize spec on the window. Throws empty_domain when no node is inside
/// and geometry_overflow when a ball or annulus does not fit with a 2h margin.
SystemPtr build_system(const ModelSurface& s, const Window& w, const DomainSpec& spec);

/// Sum of the mass over interior nodes.
double domain_measure(const DomainSystem& sys);

/// {interior nodes with field < t}. An empty result is a valid (empty) system.
SystemPtr sublevel_domain(const DomainSystem& sys, const ScalarField& field, double t);

/// Interior minus the closed geodesic ball B(o, R).
SystemPtr remove_ball(const DomainSystem& sys, Point o, double radius);

/// Connected components of the interior; labels per unknown, 0-based,
/// ordered by first appearance.
std::vector<int> component_labels(const DomainSystem& sys, int* count = nullptr);

/// Largest connected component as its own system. `split` reports whether
/// the interior had more than one component.
SystemPtr largest_component(const SystemPtr& sys, bool* split = nullptr);

/// Approximate geodesic distance from each interior node to the nearest
/// non-interior node (exact Euclidean transform in the chart, scaled by the
/// local metric factor on the hyperbolic surface).
std::vector<double> depth_map(const DomainSystem& sys);

/// Plain-text grey map: optional "P1"/"P2" magic, width, height, [maxval for
/// P2], then one value per node, row-major starting at v = vmin. Nonzero
/// values mark interior nodes.
std::vector<std::uint8_t> read_mask_file(const std::string& path, int* width, int* height);
void write_mask_file(const std::string& path, const DomainSystem& sys);

}  // namespace iuws
