#include "hfrac/verify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hfrac {

namespace {

double coord_scale(const GroupPoint& p)
{
    const double r = koranyi_norm(p);
    double s = std::max({std::abs(p.t), r * r, r});
    if (p.x.size() > 0)
        s = std::max({s, p.x.cwiseAbs().maxCoeff(), p.y.cwiseAbs().maxCoeff()});
    return s;
}

double point_gap(const GroupPoint& a, const GroupPoint& b)
{
    double g = std::abs(a.t - b.t);
    if (a.x.size() > 0)
        g = std::max({g, (a.x - b.x).cwiseAbs().maxCoeff(), (a.y - b.y).cwiseAbs().maxCoeff()});
    return g;
}

double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

}  // namespace

std::vector<PropertyCheck> group_axiom_suite(int n, std::size_t samples, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coord(-1.0, 1.0);
    std::uniform_real_distribution<double> decade(-1.0, 1.0);
    const auto un = static_cast<std::size_t>(n);
    auto draw = [&](double scale) {
        GroupPoint p = GroupPoint::identity(un);
        for (int k = 0; k < n; ++k) {
            p.x[k] = scale * coord(rng);
            p.y[k] = scale * coord(rng);
        }
        p.t = scale * scale * coord(rng);
        return p;
    };

    std::vector<PropertyCheck> out{{"associativity", samples, 0.0}, {"identity", samples, 0.0},
                                   {"inverse", samples, 0.0},       {"norm_homogeneity", samples, 0.0},
                                   {"norm_symmetry", samples, 0.0}, {"left_invariance", samples, 0.0}};
    const GroupPoint e = GroupPoint::identity(un);
    for (std::size_t s = 0; s < samples; ++s) {
        const double scale = std::pow(10.0, decade(rng));
        const GroupPoint a = draw(scale), b = draw(scale), c = draw(scale), g = draw(scale);
        const double lambda = std::pow(10.0, decade(rng));

        const GroupPoint l = compose(compose(a, b), c);
        const GroupPoint r = compose(a, compose(b, c));
        const double sabc = std::max({coord_scale(a), coord_scale(b), coord_scale(c), coord_scale(l)});
        out[0].max_rel_err = std::max(out[0].max_rel_err, point_gap(l, r) / sabc);

        const double sa = coord_scale(a);
        out[1].max_rel_err = std::max(
            {out[1].max_rel_err, point_gap(compose(a, e), a) / sa, point_gap(compose(e, a), a) / sa});
        out[2].max_rel_err = std::max({out[2].max_rel_err, point_gap(compose(a, inverse(a)), e) / sa,
                                       point_gap(compose(inverse(a), a), e) / sa});

        out[3].max_rel_err =
            std::max(out[3].max_rel_err, rel(koranyi_norm(dilate(lambda, a)), lambda * koranyi_norm(a)));
        out[4].max_rel_err = std::max(out[4].max_rel_err, rel(koranyi_norm(inverse(a)), koranyi_norm(a)));
        out[5].max_rel_err =
            std::max(out[5].max_rel_err, rel(distance(compose(g, a), compose(g, b)), distance(a, b)));
    }
    return out;
}

std::shared_ptr<const Mesh> random_cloud_mesh(int n, std::size_t interior, std::size_t collar, double vol,
                                              std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> inner(-1.0, 1.0);
    std::uniform_real_distribution<double> outer(1.0, 1.5);
    std::uniform_int_distribution<int> axis(0, 2 * n);
    std::bernoulli_distribution sign(0.5);
    const auto un = static_cast<std::size_t>(n);
    std::vector<GroupPoint> nodes;
    std::vector<NodeRole> roles;
    for (std::size_t k = 0; k < interior + collar; ++k) {
        Eigen::VectorXd c(2 * n + 1);
        for (int a = 0; a < 2 * n + 1; ++a)
            c[a] = inner(rng);
        const bool in = k < interior;
        if (!in) {
            const int a = axis(rng);
            c[a] = (sign(rng) ? 1.0 : -1.0) * outer(rng);
        }
        GroupPoint p = GroupPoint::identity(un);
        p.x = c.head(n);
        p.y = c.segment(n, n);
        p.t = c[2 * n];
        nodes.push_back(std::move(p));
        roles.push_back(in ? NodeRole::interior : NodeRole::collar);
    }
    std::vector<double> volumes(nodes.size(), vol);
    return std::make_shared<const Mesh>(std::move(nodes), std::move(roles), std::move(volumes),
                                        std::cbrt(vol), 0.5, DomainSpec::cube(n, -1.0, 1.0));
}

Field random_interior_field(const Mesh& mesh, std::mt19937_64& rng, double lo, double hi)
{
    std::uniform_real_distribution<double> dist(lo, hi);
    Field u = Field::Zero(static_cast<Eigen::Index>(mesh.size()));
    for (auto i : mesh.interior())
        u[static_cast<Eigen::Index>(i)] = dist(rng);
    return u;
}

double gradient_fd_error(const KernelGraph& graph, const Field& u, double step)
{
    const double p = graph.p();
    const Field r = residual(graph, u);
    double worst = 0.0;
    Field probe = u;
    for (auto i : graph.mesh().interior()) {
        const auto k = static_cast<Eigen::Index>(i);
        const double hstep = step * std::max(1.0, std::abs(u[k]));
        probe[k] = u[k] + hstep;
        const double ep = energy_seminorm_p(graph, probe);
        probe[k] = u[k] - hstep;
        const double em = energy_seminorm_p(graph, probe);
        probe[k] = u[k];
        const double fd = (ep - em) / (2.0 * hstep * p);
        worst = std::max(worst, std::abs(r[k] - fd));
    }
    const double scale = r.cwiseAbs().maxCoeff();
    if (!(scale > 0.0))
        throw std::invalid_argument("gradient_fd_error needs a field with nonzero residual");
    return worst / scale;
}

double scalar_oracle(double collar_weight, double p, double f, double vol, double n, double delta, double tol)
{
    if (!(collar_weight > 0.0) || !(f > 0.0) || !(vol > 0.0) || !(n > 0.0))
        throw std::invalid_argument("scalar_oracle needs positive weight, source, volume and level");
    const double shift = std::isinf(n) ? 0.0 : 1.0 / n;
    const double fn = std::min(f, n);
    // phi is increasing in u with phi(0) < 0.
    auto phi = [&](double u) { return 2.0 * collar_weight * std::pow(u, p - 1.0) - fn * std::pow(u + shift, -delta) * vol; };
    double lo = 0.0, hi = 1.0;
    while (phi(hi) < 0.0)
        hi *= 2.0;
    while (hi - lo > tol * std::max(1.0, hi)) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi)
            break;
        (phi(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

std::shared_ptr<const Mesh> single_node_mesh(int n, double h)
{
    return std::make_shared<const Mesh>(build_mesh(DomainSpec::cube(n, -0.5 * h, 0.5 * h), h, h));
}

}  // namespace hfrac
