#pragma once

#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

#include "hfrac/hgroup.hpp"

namespace hfrac {

struct KoranyiBall {
    double radius = 1.0;
    GroupPoint center;
};

/// Axis-aligned box in the 2N+1 exponential coordinates, ordered (x..., y..., t).
struct CoordinateBox {
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
};

using DomainShape = std::variant<KoranyiBall, CoordinateBox>;

class DomainSpec {
public:
    explicit DomainSpec(DomainShape shape);

    static DomainSpec ball(double radius, GroupPoint center);
    static DomainSpec box(Eigen::VectorXd lower, Eigen::VectorXd upper);
    /// [lo, hi]^{2N+1}
    static DomainSpec cube(int n, double lo, double hi);

    const DomainShape& shape() const { return shape_; }
    int group_dim() const { return n_; }
    GroupPoint center() const;

    /// Strictly inside the domain; boundary points count as outside.
    bool contains(const GroupPoint& p) const;
    /// Distance from an outside point to the domain: Euclidean for boxes, radial gauge gap for balls.
    double exterior_gap(const GroupPoint& p) const;
    /// Distance from an inside point to the boundary, in the same metric as exterior_gap.
    double boundary_distance(const GroupPoint& p) const;
    /// Coordinate half-extent of the domain enlarged by `pad`, per axis.
    Eigen::VectorXd half_extent(double pad) const;
    double diameter() const;
    double volume() const;

private:
    DomainShape shape_;
    int n_;
};

enum class NodeRole { interior, collar };

/// Point cloud on Omega plus an exterior collar on which fields are pinned to zero.
class Mesh {
public:
    /// Explicit construction; used for hand-built graphs. Volumes must be positive.
    Mesh(std::vector<GroupPoint> nodes, std::vector<NodeRole> roles, std::vector<double> volumes,
         double h, double collar_width, std::optional<DomainSpec> domain = std::nullopt);

    std::size_t size() const { return nodes_.size(); }
    int group_dim() const { return n_; }
    const std::vector<GroupPoint>& nodes() const { return nodes_; }
    const GroupPoint& node(std::size_t i) const { return nodes_[i]; }
    const std::vector<NodeRole>& roles() const { return roles_; }
    bool is_interior(std::size_t i) const { return roles_[i] == NodeRole::interior; }
    const std::vector<double>& volumes() const { return volumes_; }
    double volume(std::size_t i) const { return volumes_[i]; }
    double h() const { return h_; }
    double collar_width() const { return collar_width_; }
    const std::optional<DomainSpec>& domain() const { return domain_; }

    const std::vector<std::size_t>& interior() const { return interior_; }
    const std::vector<std::size_t>& collar() const { return collar_; }
    double interior_volume() const;
    /// Distance of interior node i to the domain boundary (requires a domain).
    double boundary_distance(std::size_t i) const;

private:
    std::vector<GroupPoint> nodes_;
    std::vector<NodeRole> roles_;
    std::vector<double> volumes_;
    std::vector<std::size_t> interior_;
    std::vector<std::size_t> collar_;
    double h_;
    double collar_width_;
    std::optional<DomainSpec> domain_;
    int n_;
};

inline constexpr std::size_t kDefaultNodeBudget = 20000;

/// Lattice of spacing h anchored at the domain center, classified into interior,
/// collar (outside but within collar_width) or discarded. Volumes are h^{2N+1}.
Mesh build_mesh(const DomainSpec& spec, double h, double collar_width,
                std::size_t node_budget = kDefaultNodeBudget);

/// Node within `tol` (coordinate max-norm) of `p`, if any. Linear scan.
std::optional<std::size_t> locate_node(const Mesh& mesh, const GroupPoint& p, double tol);

/// Interior nodes at distance >= margin from the boundary. Throws MeshError when empty.
std::vector<std::size_t> interior_subset(const Mesh& mesh, double margin);

/// Interior nodes at distance < eps from the boundary (may be empty).
std::vector<std::size_t> boundary_strip(const Mesh& mesh, double eps);

}  // namespace hfrac
