#include "hfrac/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "hfrac/errors.hpp"

namespace hfrac {

namespace {

// Relative tolerance (in units of h) below which a lattice point counts as on the boundary.
constexpr double kBoundarySnap = 1e-9;

GroupPoint from_coords(const Eigen::VectorXd& c, int n)
{
    return {c.head(n), c.segment(n, n), c[2 * n]};
}

Eigen::VectorXd to_coords(const GroupPoint& p)
{
    const auto n = p.x.size();
    Eigen::VectorXd c(2 * n + 1);
    c << p.x, p.y, p.t;
    return c;
}

}  // namespace

DomainSpec::DomainSpec(DomainShape shape) : shape_(std::move(shape)), n_(0)
{
    if (const auto* ball = std::get_if<KoranyiBall>(&shape_)) {
        if (!(ball->radius > 0.0))
            throw std::invalid_argument("Koranyi ball radius must be positive");
        if (ball->center.dim() == 0 || !ball->center.finite())
            throw std::invalid_argument("Koranyi ball center must be a finite point");
        n_ = static_cast<int>(ball->center.dim());
    } else {
        const auto& box = std::get<CoordinateBox>(shape_);
        if (box.lower.size() != box.upper.size() || box.lower.size() < 3 || box.lower.size() % 2 == 0)
            throw std::invalid_argument("coordinate box needs 2N+1 lower and upper bounds");
        if (!((box.upper - box.lower).array() > 0.0).all())
            throw std::invalid_argument("coordinate box must be nonempty on every axis");
        n_ = static_cast<int>((box.lower.size() - 1) / 2);
    }
}

DomainSpec DomainSpec::ball(double radius, GroupPoint center)
{
    return DomainSpec(KoranyiBall{radius, std::move(center)});
}

DomainSpec DomainSpec::box(Eigen::VectorXd lower, Eigen::VectorXd upper)
{
    return DomainSpec(CoordinateBox{std::move(lower), std::move(upper)});
}

DomainSpec DomainSpec::cube(int n, double lo, double hi)
{
    return box(Eigen::VectorXd::Constant(2 * n + 1, lo), Eigen::VectorXd::Constant(2 * n + 1, hi));
}

GroupPoint DomainSpec::center() const
{
    if (const auto* ball = std::get_if<KoranyiBall>(&shape_))
        return ball->center;
    const auto& box = std::get<CoordinateBox>(shape_);
    return from_coords(0.5 * (box.lower + box.upper), n_);
}

bool DomainSpec::contains(const GroupPoint& p) const
{
    if (const auto* ball = std::get_if<KoranyiBall>(&shape_))
        return distance(p, ball->center) < ball->radius;
    const auto& box = std::get<CoordinateBox>(shape_);
    const Eigen::VectorXd c = to_coords(p);
    return ((c - box.lower).array() > 0.0).all() && ((box.upper - c).array() > 0.0).all();
}

double DomainSpec::exterior_gap(const GroupPoint& p) const
{
    if (const auto* ball = std::get_if<KoranyiBall>(&shape_))
        return std::max(0.0, distance(p, ball->center) - ball->radius);
    const auto& box = std::get<CoordinateBox>(shape_);
    const Eigen::VectorXd c = to_coords(p);
    const Eigen::VectorXd below = (box.lower - c).cwiseMax(0.0);
    const Eigen::VectorXd above = (c - box.upper).cwiseMax(0.0);
    return (below + above).norm();
}

double DomainSpec::boundary_distance(const GroupPoint& p) const
{
    if (const auto* ball = std::get_if<KoranyiBall>(&shape_))
        return std::max(0.0, ball->radius - distance(p, ball->center));
    const auto& box = std::get<CoordinateBox>(shape_);
    const Eigen::VectorXd c = to_coords(p);
    return std::max(0.0, std::min((c - box.lower).minCoeff(), (box.upper - c).minCoeff()));
}

Eigen::VectorXd DomainSpec::half_extent(double pad) const
{
    Eigen::VectorXd e(2 * n_ + 1);
    if (const auto* ball = std::get_if<KoranyiBall>(&shape_)) {
        const double r = ball->radius + pad;
        const double shear = ball->center.x.cwiseAbs().sum() + ball->center.y.cwiseAbs().sum();
        e.setConstant(r);
        e[2 * n_] = r * r + 2.0 * shear * r;
        return e;
    }
    const auto& box = std::get<CoordinateBox>(shape_);
    return (0.5 * (box.upper - box.lower)).array() + pad;
}

double DomainSpec::diameter() const
{
    if (const auto* ball = std::get_if<KoranyiBall>(&shape_))
        return 2.0 * ball->radius;
    const auto& box = std::get<CoordinateBox>(shape_);
    return (box.upper - box.lower).norm();
}

double DomainSpec::volume() const
{
    if (const auto* ball = std::get_if<KoranyiBall>(&shape_)) {
        // |B_1| = pi^N / Gamma(N) * B(N/2, 3/2); |B_R| = R^Q |B_1|.
        const double n = n_;
        const double unit = std::pow(std::numbers::pi, n) / std::tgamma(n) * std::beta(n / 2.0, 1.5);
        return unit * std::pow(ball->radius, 2.0 * n + 2.0);
    }
    const auto& box = std::get<CoordinateBox>(shape_);
    return (box.upper - box.lower).prod();
}

Mesh::Mesh(std::vector<GroupPoint> nodes, std::vector<NodeRole> roles, std::vector<double> volumes,
           double h, double collar_width, std::optional<DomainSpec> domain)
    : nodes_(std::move(nodes)),
      roles_(std::move(roles)),
      volumes_(std::move(volumes)),
      h_(h),
      collar_width_(collar_width),
      domain_(std::move(domain)),
      n_(0)
{
    if (nodes_.size() != roles_.size() || nodes_.size() != volumes_.size())
        throw std::invalid_argument("Mesh: nodes, roles and volumes must have equal length");
    if (nodes_.empty())
        throw MeshError("Mesh: no nodes");
    n_ = static_cast<int>(nodes_.front().dim());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (static_cast<int>(nodes_[i].dim()) != n_ || !nodes_[i].finite())
            throw std::invalid_argument("Mesh: node dimension mismatch or non-finite coordinate");
        if (!(volumes_[i] > 0.0))
            throw std::invalid_argument("Mesh: volumes must be positive");
        (roles_[i] == NodeRole::interior ? interior_ : collar_).push_back(i);
    }
    if (interior_.empty())
        throw MeshError("Mesh: empty interior");
}

double Mesh::interior_volume() const
{
    double v = 0.0;
    for (auto i : interior_)
        v += volumes_[i];
    return v;
}

double Mesh::boundary_distance(std::size_t i) const
{
    if (!domain_)
        throw std::logic_error("Mesh has no domain; boundary distance undefined");
    return domain_->boundary_distance(nodes_[i]);
}

Mesh build_mesh(const DomainSpec& spec, double h, double collar_width, std::size_t node_budget)
{
    if (!(h > 0.0))
        throw std::invalid_argument("mesh spacing h must be positive");
    if (!(collar_width > 0.0))
        throw std::invalid_argument("collar width must be positive");

    const int n = spec.group_dim();
    const int dim = 2 * n + 1;
    const Eigen::VectorXd anchor = to_coords(spec.center());
    const Eigen::VectorXd extent = spec.half_extent(collar_width);
    // A center-anchored lattice always hits the center, so coarseness is judged against the domain width.
    if (h > 2.0 * spec.half_extent(0.0).minCoeff())
        throw MeshError("empty interior: spacing h exceeds the domain width");

    std::vector<long> reach(dim);
    double lattice_size = 1.0;
    for (int a = 0; a < dim; ++a) {
        reach[a] = static_cast<long>(std::floor(extent[a] / h + kBoundarySnap));
        lattice_size *= 2.0 * reach[a] + 1.0;
    }
    // Enumeration itself must stay bounded; classification discards most of a ball's bounding box.
    if (lattice_size > 64.0 * static_cast<double>(node_budget) + 1e6) {
        std::ostringstream os;
        os << "node budget exceeded: bounding lattice has " << lattice_size << " points";
        throw MeshError(os.str());
    }

    const double snap = kBoundarySnap * h;
    const double cell = std::pow(h, dim);
    std::vector<GroupPoint> nodes;
    std::vector<NodeRole> roles;
    std::vector<long> k(dim);
    for (int a = 0; a < dim; ++a)
        k[a] = -reach[a];

    Eigen::VectorXd c(dim);
    for (;;) {
        for (int a = 0; a < dim; ++a)
            c[a] = anchor[a] + static_cast<double>(k[a]) * h;
        GroupPoint p = from_coords(c, n);
        if (spec.contains(p) && spec.boundary_distance(p) > snap) {
            nodes.push_back(std::move(p));
            roles.push_back(NodeRole::interior);
        } else if (spec.exterior_gap(p) <= collar_width + snap) {
            nodes.push_back(std::move(p));
            roles.push_back(NodeRole::collar);
        }
        if (nodes.size() > node_budget) {
            std::ostringstream os;
            os << "node budget exceeded (" << node_budget << " nodes)";
            throw MeshError(os.str());
        }
        int a = dim - 1;
        while (a >= 0 && k[a] == reach[a]) {
            k[a] = -reach[a];
            --a;
        }
        if (a < 0)
            break;
        ++k[a];
    }

    if (std::find(roles.begin(), roles.end(), NodeRole::interior) == roles.end())
        throw MeshError("empty interior: spacing h too coarse for the domain");

    std::vector<double> volumes(nodes.size(), cell);
    return Mesh(std::move(nodes), std::move(roles), std::move(volumes), h, collar_width, spec);
}

std::optional<std::size_t> locate_node(const Mesh& mesh, const GroupPoint& p, double tol)
{
    if (static_cast<int>(p.dim()) != mesh.group_dim())
        throw std::invalid_argument("locate_node: dimension mismatch");
    for (std::size_t i = 0; i < mesh.size(); ++i) {
        const GroupPoint& q = mesh.node(i);
        const double gap = std::max({(q.x - p.x).cwiseAbs().maxCoeff(), (q.y - p.y).cwiseAbs().maxCoeff(),
                                     std::abs(q.t - p.t)});
        if (gap <= tol)
            return i;
    }
    return std::nullopt;
}

std::vector<std::size_t> interior_subset(const Mesh& mesh, double margin)
{
    if (!(margin > 0.0))
        throw std::invalid_argument("margin must be positive");
    std::vector<std::size_t> out;
    for (auto i : mesh.interior())
        if (mesh.boundary_distance(i) >= margin)
            out.push_back(i);
    if (out.empty())
        throw MeshError("interior_subset: margin leaves no interior nodes");
    return out;
}

std::vector<std::size_t> boundary_strip(const Mesh& mesh, double eps)
{
    if (!(eps > 0.0))
        throw std::invalid_argument("strip width must be positive");
    std::vector<std::size_t> out;
    for (auto i : mesh.interior())
        if (mesh.boundary_distance(i) < eps)
            out.push_back(i);
    return out;
}

}  // namespace hfrac
