#include "hfrac/extremal.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "hfrac/errors.hpp"

namespace hfrac {

namespace {

void require_delta(double delta)
{
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("extremal quantities require constant delta in (0,1)");
}

Field zero_field(const Mesh& mesh) { return Field::Zero(static_cast<Eigen::Index>(mesh.size())); }

bool positive_on_interior(const Mesh& mesh, const Field& v)
{
    for (auto i : mesh.interior())
        if (!(v[static_cast<Eigen::Index>(i)] > 0.0))
            return false;
    return true;
}

// Nearest-node pullback of `source` through `map`; nodes whose preimage is off-mesh get 0.
template <class Map>
Field pull_back(const Mesh& mesh, const Field& source, Map&& map)
{
    Field out = zero_field(mesh);
    const double tol = 0.5 * mesh.h() * (1.0 + 1e-9);
    for (auto i : mesh.interior()) {
        const auto hit = locate_node(mesh, map(mesh.node(i)), tol);
        if (hit && mesh.is_interior(*hit))
            out[static_cast<Eigen::Index>(i)] = source[static_cast<Eigen::Index>(*hit)];
    }
    return out;
}

}  // namespace

double require_subunit_delta(const SingularExponentField& delta)
{
    if (!delta.is_constant())
        throw std::invalid_argument("extremal quantities require a constant delta");
    const double d = delta.constant_value();
    require_delta(d);
    return d;
}

double constraint_mass(const Mesh& mesh, const Field& v, const SourceField& f, double delta)
{
    return weighted_lq_integral(mesh, v, f.values(), 1.0 - delta, PowerMode::magnitude);
}

double energy_identity_check(const KernelGraph& graph, const Field& u_delta, const SourceField& f, double delta)
{
    require_delta(delta);
    return energy_seminorm_p(graph, u_delta) - weighted_lq_integral(graph.mesh(), u_delta, f.values(), 1.0 - delta);
}

double tau_delta(const Mesh& mesh, const Field& u_delta, const SourceField& f, double delta)
{
    require_delta(delta);
    const double mass = weighted_lq_integral(mesh, u_delta, f.values(), 1.0 - delta);
    if (!(mass > 0.0))
        throw std::invalid_argument("tau_delta: zero mass, f u^{1-delta} pairing is degenerate");
    return std::pow(mass, -1.0 / (1.0 - delta));
}

double theta(const KernelGraph& graph, const Field& u_delta, double delta)
{
    require_delta(delta);
    const double p = graph.p();
    // ||u||^{p(1-delta-p)/(1-delta)} = (||u||^p)^{(1-delta-p)/(1-delta)}
    return std::pow(energy_seminorm_p(graph, u_delta), (1.0 - delta - p) / (1.0 - delta));
}

ExtremalResult compute_extremal(const KernelGraph& graph, const Field& u_delta, const SourceField& f, double delta,
                                double identity_tol)
{
    require_delta(delta);
    ExtremalResult out;
    const double energy = energy_seminorm_p(graph, u_delta);
    out.energy_identity_gap = energy_identity_check(graph, u_delta, f, delta) / energy;
    if (!(std::abs(out.energy_identity_gap) < identity_tol)) {
        std::ostringstream os;
        os << "energy identity gap " << out.energy_identity_gap << " exceeds " << identity_tol;
        throw InvariantViolation(os.str());
    }
    out.theta = theta(graph, u_delta, delta);
    out.tau_delta = tau_delta(graph.mesh(), u_delta, f, delta);
    out.v_delta = out.tau_delta * u_delta;
    out.theta_from_extremal = energy_seminorm_p(graph, out.v_delta);
    out.constraint_residual = constraint_mass(graph.mesh(), out.v_delta, f, delta) - 1.0;
    return out;
}

double sobolev_slack(const KernelGraph& graph, const SourceField& f, double delta, double theta_value,
                     const Field& v)
{
    require_delta(delta);
    const double mass = constraint_mass(graph.mesh(), v, f, delta);
    return energy_seminorm_p(graph, v) - theta_value * std::pow(mass, graph.p() / (1.0 - delta));
}

double sobolev_check(const KernelGraph& graph, const SourceField& f, double delta, double theta_value,
                     std::span<const Field> trials)
{
    double worst = INFINITY;
    for (const auto& v : trials)
        worst = std::min(worst, sobolev_slack(graph, f, delta, theta_value, v));
    return worst;
}

std::vector<Field> sobolev_trial_fields(const Mesh& mesh, const Field& v_delta, std::size_t count,
                                        std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> shift(-2, 2);
    const auto& interior = mesh.interior();
    const int n = mesh.group_dim();
    const GroupPoint center = mesh.domain() ? mesh.domain()->center() : GroupPoint::identity(n);

    Eigen::VectorXd lo = Eigen::VectorXd::Constant(2 * n + 1, INFINITY);
    Eigen::VectorXd hi = Eigen::VectorXd::Constant(2 * n + 1, -INFINITY);
    auto coords = [n](const GroupPoint& p) {
        Eigen::VectorXd c(2 * n + 1);
        c << p.x, p.y, p.t;
        return c;
    };
    for (auto i : interior) {
        const Eigen::VectorXd c = coords(mesh.node(i));
        lo = lo.cwiseMin(c);
        hi = hi.cwiseMax(c);
    }
    const Eigen::VectorXd span = (hi - lo).cwiseMax(mesh.h());

    auto bumps = [&]() {
        Field v = zero_field(mesh);
        const int count_bumps = 1 + static_cast<int>(unit(rng) * 3.0);
        for (int b = 0; b < count_bumps; ++b) {
            const auto pick = interior[static_cast<std::size_t>(unit(rng) * static_cast<double>(interior.size())) %
                                       interior.size()];
            const Eigen::VectorXd c0 = coords(mesh.node(pick));
            const double width = 0.15 + 0.5 * unit(rng);
            const double amp = 0.1 + unit(rng);
            for (auto i : interior) {
                const Eigen::VectorXd z = (coords(mesh.node(i)) - c0).cwiseQuotient(span);
                v[static_cast<Eigen::Index>(i)] += amp * std::exp(-z.squaredNorm() / (2.0 * width * width));
            }
        }
        return v;
    };

    std::vector<Field> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        Field v;
        switch (k % 4) {
        case 0:
            v = bumps();
            break;
        case 1:
            v = zero_field(mesh);
            for (auto i : interior)
                v[static_cast<Eigen::Index>(i)] = 2.0 * unit(rng) - 1.0;
            break;
        case 2: {
            Eigen::VectorXd offset(2 * n + 1);
            for (int a = 0; a < 2 * n + 1; ++a)
                offset[a] = shift(rng) * mesh.h();
            v = pull_back(mesh, v_delta, [&](const GroupPoint& p) {
                const Eigen::VectorXd c = coords(p) - offset;
                return GroupPoint(c.head(n), c.segment(n, n), c[2 * n]);
            });
            break;
        }
        default: {
            const double lambda = 0.6 + unit(rng);
            v = pull_back(mesh, v_delta, [&](const GroupPoint& p) {
                return compose(center, dilate(1.0 / lambda, compose(inverse(center), p)));
            });
            break;
        }
        }
        if (v.cwiseAbs().maxCoeff() == 0.0)
            v = bumps();
        out.push_back(std::move(v));
    }
    return out;
}

SimplicityVerdict simplicity_check(const KernelGraph& graph, const SourceField& f, double delta, double theta_value,
                                   const Field& u_delta, const Field& w, double equality_tol, double cv_tol)
{
    require_delta(delta);
    SimplicityVerdict out;
    const double energy = energy_seminorm_p(graph, w);
    if (!(energy > 0.0))
        throw std::invalid_argument("simplicity_check: w must not vanish identically");
    const double lhs = theta_value * std::pow(constraint_mass(graph.mesh(), w, f, delta), graph.p() / (1.0 - delta));
    out.equality_gap = std::abs(lhs - energy) / energy;
    if (!(out.equality_gap < equality_tol)) {
        out.verdict = Simplicity::no_equality;
        return out;
    }

    const Mesh& mesh = graph.mesh();
    double umax = 0.0;
    for (auto i : mesh.interior())
        umax = std::max(umax, u_delta[static_cast<Eigen::Index>(i)]);
    const double floor = 1e-12 * umax;
    std::vector<double> ratios;
    for (auto i : mesh.interior()) {
        const double ui = u_delta[static_cast<Eigen::Index>(i)];
        if (ui > floor)
            ratios.push_back(w[static_cast<Eigen::Index>(i)] / ui);
    }
    if (ratios.empty())
        throw std::invalid_argument("simplicity_check: u_delta has no values above the positivity floor");
    double mean = 0.0;
    for (double r : ratios)
        mean += r;
    mean /= static_cast<double>(ratios.size());
    double var = 0.0;
    for (double r : ratios)
        var += (r - mean) * (r - mean);
    var /= static_cast<double>(ratios.size());
    out.k = mean;
    out.ratio_cv = mean == 0.0 ? INFINITY : std::sqrt(var) / std::abs(mean);
    out.verdict = out.ratio_cv < cv_tol ? Simplicity::proportional : Simplicity::not_proportional;
    return out;
}

ComparisonVerdict comparison_check(const Mesh& mesh, const Field& u, const Field& v, const SourceField& f_u,
                                   const SourceField& f_v, double tol)
{
    ComparisonVerdict out;
    out.max_excess = -INFINITY;
    for (auto i : mesh.interior()) {
        if (f_u.at(i) > f_v.at(i))
            throw std::invalid_argument("comparison_check: requires f_u <= f_v pointwise");
        out.max_excess = std::max(out.max_excess, u[static_cast<Eigen::Index>(i)] - v[static_cast<Eigen::Index>(i)]);
    }
    out.ordered = out.max_excess <= tol;
    return out;
}

Field singular_defect(const KernelGraph& graph, const Field& u, const SourceField& f, double delta)
{
    Field r = residual(graph, u);
    const Mesh& mesh = graph.mesh();
    for (auto i : mesh.interior()) {
        const auto k = static_cast<Eigen::Index>(i);
        if (f.at(i) != 0.0)
            r[k] -= f.at(i) * std::pow(u[k], -delta) * mesh.volume(i);
    }
    return r;
}

double projected_search_min(const KernelGraph& graph, const SourceField& f, double delta, int restarts, int iters,
                            std::uint64_t seed)
{
    require_delta(delta);
    const Mesh& mesh = graph.mesh();
    const double p = graph.p();
    const double power = p / (1.0 - delta);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.1, 1.0);
    const Eigen::VectorXd jacobi = stiffness_diagonal(graph);

    auto log_ratio = [&](const Field& v) {
        return std::log(energy_seminorm_p(graph, v)) - power * std::log(constraint_mass(mesh, v, f, delta));
    };
    auto normalize = [&](Field& v) { v *= std::pow(constraint_mass(mesh, v, f, delta), -1.0 / (1.0 - delta)); };

    double best = INFINITY;
    for (int r = 0; r < restarts; ++r) {
        Field v = zero_field(mesh);
        for (auto i : mesh.interior())
            v[static_cast<Eigen::Index>(i)] = unit(rng);
        normalize(v);
        double value = log_ratio(v);
        for (int it = 0; it < iters; ++it) {
            const double energy = energy_seminorm_p(graph, v);
            const double mass = constraint_mass(mesh, v, f, delta);
            const Field res = residual(graph, v);
            Field dir = zero_field(mesh);
            double slope = 0.0;
            for (auto i : mesh.interior()) {
                const auto k = static_cast<Eigen::Index>(i);
                const double g = p * res[k] / energy -
                                 p * std::pow(v[k], -delta) * f.at(i) * mesh.volume(i) / mass;
                dir[k] = -g * energy / jacobi[graph.local_index(i)];
                slope += g * dir[k];
            }
            if (!(slope < -1e-300))
                break;
            double alpha = 1.0;
            bool moved = false;
            for (int b = 0; b < 40; ++b, alpha *= 0.5) {
                Field trial = v + alpha * dir;
                if (!positive_on_interior(mesh, trial))
                    continue;
                const double tv = log_ratio(trial);
                if (tv <= value + 1e-4 * alpha * slope) {
                    v = std::move(trial);
                    value = tv;
                    moved = true;
                    break;
                }
            }
            if (!moved)
                break;
        }
        normalize(v);
        best = std::min(best, energy_seminorm_p(graph, v));
    }
    return best;
}

}  // namespace hfrac
