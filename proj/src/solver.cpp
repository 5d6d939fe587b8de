#include "hfrac/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "hfrac/errors.hpp"

namespace hfrac {

namespace {

constexpr double kNegativityFloor = -1e-10;
constexpr double kGapFloor = 1e-8;

double inverse_level(double n) { return std::isinf(n) ? 0.0 : 1.0 / n; }

void require_level(double n)
{
    if (!(n >= 1.0))
        throw std::invalid_argument("regularization level n must be >= 1");
}

double min_interior(const Mesh& mesh, const Field& u)
{
    double m = INFINITY;
    for (auto i : mesh.interior())
        m = std::min(m, u[static_cast<Eigen::Index>(i)]);
    return m;
}

// Shift making the per-node primitive vanish at 0; skipped where G(0) is infinite.
double primitive_shift(double n, double delta)
{
    if (std::isinf(n) && delta >= 1.0)
        return 0.0;
    return g_n_primitive(0.0, n, delta);
}

double source_term(const KernelGraph& graph, const SourceField& f_n, double n, const SingularExponentField& delta,
                   const Field& u)
{
    const Mesh& mesh = graph.mesh();
    double sum = 0.0;
    for (auto i : mesh.interior()) {
        const double fi = f_n.at(i);
        if (fi == 0.0)
            continue;
        const double di = delta.at(i);
        const double g = g_n_primitive(u[static_cast<Eigen::Index>(i)], n, di);
        if (std::isinf(g))
            return g;
        sum += fi * (g - primitive_shift(n, di)) * mesh.volume(i);
    }
    return sum;
}

// Hessian of I_n at u on interior unknowns. For p < 2 gaps below floor_rel * max|u|
// (at least 1e-8) are raised to that floor, keeping the matrix finite.
Eigen::MatrixXd floored_hessian(const KernelGraph& graph, const SourceField& f_n, double n,
                                const SingularExponentField& delta, const Field& u, double floor_rel)
{
    const double p = graph.p();
    const Mesh& mesh = graph.mesh();
    const auto m = static_cast<Eigen::Index>(graph.interior_count());
    const double floor = std::max(floor_rel * u.cwiseAbs().maxCoeff(), 1e-8);
    auto curvature = [&](double w, double d) {
        return p == 2.0 ? 2.0 * w : 2.0 * (p - 1.0) * w * std::pow(std::max(std::abs(d), floor), p - 2.0);
    };
    Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(m, m);
    auto add_pair = [&](const WeightedPair& e) {
        const int a = graph.local_index(e.i);
        const int b = graph.local_index(e.j);
        const double c = curvature(e.w, u[e.i] - u[e.j]);
        if (a >= 0)
            hess(a, a) += c;
        if (b >= 0)
            hess(b, b) += c;
        if (a >= 0 && b >= 0) {
            hess(a, b) -= c;
            hess(b, a) -= c;
        }
    };
    for (const auto& e : graph.pairs())
        add_pair(e);
    if (graph.explicit_collar()) {
        for (const auto& e : graph.collar_pairs())
            add_pair(e);
    } else {
        for (auto i : mesh.interior()) {
            const int a = graph.local_index(i);
            hess(a, a) += curvature(graph.collar_weight()[static_cast<Eigen::Index>(i)], u[static_cast<Eigen::Index>(i)]);
        }
    }
    for (auto i : mesh.interior()) {
        const double fi = f_n.at(i);
        const double shifted = std::max(u[static_cast<Eigen::Index>(i)], 0.0) + inverse_level(n);
        if (fi != 0.0 && shifted > 0.0)
            hess(graph.local_index(i), graph.local_index(i)) +=
                fi * delta.at(i) * std::pow(shifted, -delta.at(i) - 1.0) * mesh.volume(i);
    }
    return hess;
}

// Interior restriction in local ordering.
Eigen::VectorXd gather(const KernelGraph& graph, const Field& full)
{
    const auto& interior = graph.mesh().interior();
    Eigen::VectorXd out(static_cast<Eigen::Index>(interior.size()));
    for (std::size_t k = 0; k < interior.size(); ++k)
        out[static_cast<Eigen::Index>(k)] = full[static_cast<Eigen::Index>(interior[k])];
    return out;
}

double scaled_sup(const KernelGraph& graph, const Eigen::VectorXd& local_grad)
{
    const auto& interior = graph.mesh().interior();
    double r = 0.0;
    for (std::size_t k = 0; k < interior.size(); ++k)
        r = std::max(r, std::abs(local_grad[static_cast<Eigen::Index>(k)]) / graph.mesh().volume(interior[k]));
    return r;
}

double scaled_l2(const KernelGraph& graph, const Eigen::VectorXd& local_grad)
{
    const auto& interior = graph.mesh().interior();
    double r = 0.0;
    for (std::size_t k = 0; k < interior.size(); ++k) {
        const double v = local_grad[static_cast<Eigen::Index>(k)] / graph.mesh().volume(interior[k]);
        r += v * v;
    }
    return std::sqrt(r);
}

}  // namespace

// ---------------------------------------------------------------------------
// Fields

SingularExponentField::SingularExponentField(Field values, double eps, double delta_star, bool is_constant)
    : values_(std::move(values)), epsilon_(eps), delta_star_(delta_star), is_constant_(is_constant)
{
}

SingularExponentField SingularExponentField::constant(const Mesh& mesh, double delta)
{
    if (!(delta > 0.0) || !std::isfinite(delta))
        throw std::invalid_argument("singular exponent delta must be positive");
    Field v = Field::Zero(static_cast<Eigen::Index>(mesh.size()));
    for (auto i : mesh.interior())
        v[static_cast<Eigen::Index>(i)] = delta;
    return {std::move(v), mesh.h(), std::max(1.0, delta), true};
}

SingularExponentField SingularExponentField::from_values(const Mesh& mesh, Field values, double eps,
                                                         double delta_star)
{
    if (static_cast<std::size_t>(values.size()) != mesh.size())
        throw std::invalid_argument("delta field length does not match the mesh");
    if (!(eps > 0.0))
        throw std::invalid_argument("strip width eps must be positive");
    if (!(delta_star >= 1.0))
        throw std::invalid_argument("delta* must be >= 1");
    const double first = values[static_cast<Eigen::Index>(mesh.interior().front())];
    bool same = true;
    for (auto i : mesh.interior()) {
        const double d = values[static_cast<Eigen::Index>(i)];
        if (!(d > 0.0) || !std::isfinite(d))
            throw std::invalid_argument("singular exponent delta must be positive at every interior node");
        same = same && d == first;
    }
    for (auto c : mesh.collar())
        values[static_cast<Eigen::Index>(c)] = 0.0;
    return {std::move(values), eps, delta_star, same};
}

double SingularExponentField::constant_value() const
{
    if (!is_constant_)
        throw std::logic_error("singular exponent field is not constant");
    return values_.maxCoeff();
}

double SingularExponentField::max_interior(const Mesh& mesh) const
{
    double m = 0.0;
    for (auto i : mesh.interior())
        m = std::max(m, at(i));
    return m;
}

SourceField::SourceField(const Mesh& mesh, Field values, double m) : values_(std::move(values)), m_(m)
{
    if (static_cast<std::size_t>(values_.size()) != mesh.size())
        throw std::invalid_argument("source field length does not match the mesh");
    if (!(m_ >= 1.0))
        throw std::invalid_argument("integrability exponent m must be >= 1");
    bool nonzero = false;
    for (auto i : mesh.interior()) {
        const double f = values_[static_cast<Eigen::Index>(i)];
        if (!(f >= 0.0) || !std::isfinite(f))
            throw std::invalid_argument("source f must be finite and nonnegative");
        nonzero = nonzero || f > 0.0;
    }
    if (!nonzero)
        throw std::invalid_argument("source f must not vanish identically");
    for (auto c : mesh.collar())
        values_[static_cast<Eigen::Index>(c)] = 0.0;
}

SourceField SourceField::constant(const Mesh& mesh, double value, double m)
{
    return {mesh, Field::Constant(static_cast<Eigen::Index>(mesh.size()), value), m};
}

SourceField truncate_source(const SourceField& f, double n)
{
    require_level(n);
    if (std::isinf(n))
        return f;
    return {f.values_.cwiseMin(n), f.m_};
}

// ---------------------------------------------------------------------------
// Regularized primitive and energy

double g_n_primitive(double t, double n, double delta)
{
    require_level(n);
    if (!(delta > 0.0))
        throw std::invalid_argument("delta must be positive");
    const double inv_n = inverse_level(n);
    if (inv_n == 0.0) {
        if (t < 0.0 || (t == 0.0 && delta >= 1.0))
            return -INFINITY;
        return delta == 1.0 ? std::log(t) : std::pow(t, 1.0 - delta) / (1.0 - delta);
    }
    const double shifted = std::max(t, 0.0) + inv_n;
    const double neg = std::max(-t, 0.0);
    if (delta == 1.0)
        return std::log(shifted) - std::log(inv_n) - n * neg;
    return std::pow(shifted, 1.0 - delta) / (1.0 - delta) - std::pow(n, delta) * neg;
}

double g_n_derivative(double t, double n, double delta)
{
    require_level(n);
    const double shifted = std::max(t, 0.0) + inverse_level(n);
    return shifted == 0.0 ? INFINITY : std::pow(shifted, -delta);
}

double regularized_energy(const KernelGraph& graph, const SourceField& f_n, double n,
                          const SingularExponentField& delta, const Field& u)
{
    const double elastic = energy_seminorm_p(graph, u) / graph.p();
    return elastic - source_term(graph, f_n, n, delta, u);
}

Field regularized_gradient(const KernelGraph& graph, const SourceField& f_n, double n,
                           const SingularExponentField& delta, const Field& u)
{
    Field g = residual(graph, u);
    const Mesh& mesh = graph.mesh();
    for (auto i : mesh.interior()) {
        const double fi = f_n.at(i);
        if (fi != 0.0)
            g[static_cast<Eigen::Index>(i)] -=
                fi * g_n_derivative(u[static_cast<Eigen::Index>(i)], n, delta.at(i)) * mesh.volume(i);
    }
    return g;
}

// ---------------------------------------------------------------------------
// Config

void SolveConfig::validate() const
{
    if (n_schedule.empty())
        throw std::invalid_argument("regularization schedule is empty");
    for (std::size_t k = 0; k < n_schedule.size(); ++k) {
        if (!(n_schedule[k] >= 1.0))
            throw std::invalid_argument("schedule entries must be >= 1");
        if (k > 0 && !(n_schedule[k] > n_schedule[k - 1]))
            throw std::invalid_argument("schedule must be strictly increasing");
    }
    if (inner_tol && !(*inner_tol > 0.0))
        throw std::invalid_argument("inner_tol must be positive");
    if (!(outer_tol > 0.0))
        throw std::invalid_argument("outer_tol must be positive");
    if (max_inner_iters < 1)
        throw std::invalid_argument("max_inner_iters must be positive");
    if (!(armijo.slope > 0.0 && armijo.slope < 1.0))
        throw std::invalid_argument("Armijo slope fraction must lie in (0,1)");
    if (!(armijo.backtrack > 0.0 && armijo.backtrack < 1.0))
        throw std::invalid_argument("Armijo backtrack factor must lie in (0,1)");
    if (!(armijo.initial_step > 0.0) || armijo.max_backtracks < 1)
        throw std::invalid_argument("Armijo initial step and backtrack count must be positive");
    if (!(monotonicity_slack >= 0.0) || !(norm_slack >= 0.0))
        throw std::invalid_argument("monotonicity slacks must be nonnegative");
}

InnerMethod SolveConfig::resolved_method(double p) const
{
    if (method == InnerMethod::automatic)
        return p == 2.0 ? InnerMethod::newton : InnerMethod::metric;
    if (method == InnerMethod::newton && p != 2.0)
        throw std::invalid_argument("Newton inner solver requires p = 2");
    return method;
}

double SolveConfig::resolved_inner_tol(double p) const
{
    if (inner_tol)
        return *inner_tol;
    return resolved_method(p) == InnerMethod::newton ? 1e-8 : 1e-6;
}

// ---------------------------------------------------------------------------
// Inner solve

LevelResult solve_level(const KernelGraph& graph, const SourceField& f, double n, const SingularExponentField& delta,
                        const Field& init, const SolveConfig& cfg)
{
    require_level(n);
    cfg.validate();
    graph.check_field(init);
    const Mesh& mesh = graph.mesh();
    const InnerMethod method = cfg.resolved_method(graph.p());
    const double tol = cfg.resolved_inner_tol(graph.p());
    const SourceField f_n = truncate_source(f, n);
    const auto& interior = mesh.interior();
    const auto m = static_cast<Eigen::Index>(interior.size());

    Field u = init;
    auto scatter = [&](Field& full, const Eigen::VectorXd& local) {
        for (Eigen::Index k = 0; k < m; ++k)
            full[static_cast<Eigen::Index>(interior[static_cast<std::size_t>(k)])] = local[k];
    };

    LevelStats stats;
    stats.n = n;
    double energy = regularized_energy(graph, f_n, n, delta, u);
    if (!std::isfinite(energy))
        throw SolverError("solve_level: initial iterate has infinite energy (needs u > 0 at the limit level)");
    Eigen::VectorXd x = gather(graph, u);
    Eigen::VectorXd grad = gather(graph, regularized_gradient(graph, f_n, n, delta, u));
    double res = scaled_sup(graph, grad);
    stats.energy_trace.push_back(energy);

    const Eigen::VectorXd jacobi = stiffness_diagonal(graph);
    Eigen::VectorXd prev_x;
    Eigen::VectorXd prev_grad;
    int it = 0;
    for (; it < cfg.max_inner_iters && !(res < tol); ++it) {
        Eigen::VectorXd dir;
        double trial = cfg.armijo.initial_step;
        if (method == InnerMethod::gradient) {
            dir = -grad.cwiseQuotient(jacobi);
            if (prev_x.size() == m) {
                const Eigen::VectorXd s = x - prev_x;
                const Eigen::VectorXd y = grad - prev_grad;
                const double sy = s.dot(y);
                if (sy > 0.0)
                    trial = std::clamp(s.dot(jacobi.cwiseProduct(s)) / sy, 1e-8, 1e8);
            }
        } else {
            Eigen::LLT<Eigen::MatrixXd> llt(floored_hessian(graph, f_n, n, delta, u, kGapFloor));
            if (llt.info() != Eigen::Success)
                throw SolverError("solve_level: Hessian metric is not positive definite");
            dir = -llt.solve(grad);
        }

        const double slope = grad.dot(dir);
        if (!(slope < 0.0))
            throw SolverError("solve_level: search direction is not a descent direction");
        const double scale = std::abs(energy) + energy_seminorm_p(graph, u) / graph.p() + 1e-300;

        double alpha = trial;
        bool accepted = false;
        Field u_trial = u;
        Eigen::VectorXd x_trial;
        double e_trial = 0.0;
        for (int b = 0; b < cfg.armijo.max_backtracks; ++b, alpha *= cfg.armijo.backtrack) {
            x_trial = x + alpha * dir;
            scatter(u_trial, x_trial);
            e_trial = regularized_energy(graph, f_n, n, delta, u_trial);
            if (!std::isfinite(e_trial))
                continue;
            const double predicted = cfg.armijo.slope * alpha * slope;
            if (e_trial <= energy + predicted) {
                accepted = true;
                stats.energy_trace.push_back(e_trial);
                break;
            }
            // Below energy resolution the Armijo test is noise; fall back to residual decrease.
            if (std::abs(alpha * slope) < 1e-13 * scale) {
                const Eigen::VectorXd g_trial = gather(graph, regularized_gradient(graph, f_n, n, delta, u_trial));
                if (scaled_l2(graph, g_trial) < scaled_l2(graph, grad)) {
                    accepted = true;
                    ++stats.roundoff_steps;
                    break;
                }
            }
        }
        if (!accepted) {
            std::ostringstream os;
            os << "solve_level: line search failed at n=" << n << ", iteration " << it << ", residual " << res;
            throw SolverError(os.str());
        }
        prev_x = x;
        prev_grad = grad;
        x = x_trial;
        u = u_trial;
        energy = e_trial;
        grad = gather(graph, regularized_gradient(graph, f_n, n, delta, u));
        res = scaled_sup(graph, grad);
    }
    if (!(res < tol)) {
        std::ostringstream os;
        os << "solve_level: max_inner_iters (" << cfg.max_inner_iters << ") exceeded at n=" << n << ", residual "
           << res << " > " << tol;
        throw SolverError(os.str());
    }

    stats.iterations = it;
    stats.residual = res;
    stats.energy = energy;
    stats.norm = seminorm(graph, u);
    stats.min_interior = min_interior(mesh, u);
    if (stats.min_interior < kNegativityFloor) {
        std::ostringstream os;
        os << "solve_level: minimizer is negative (" << stats.min_interior << ") at n=" << n;
        throw InvariantViolation(os.str());
    }
    return {std::move(u), std::move(stats)};
}

// ---------------------------------------------------------------------------
// Outer loop

SolveReport monotone_solve(const KernelGraph& graph, const SourceField& f, const SingularExponentField& delta,
                           const SolveConfig& cfg)
{
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    const Mesh& mesh = graph.mesh();

    SolveReport report;
    Field prev = Field::Zero(static_cast<Eigen::Index>(mesh.size()));
    double prev_norm = 0.0;

    auto advance = [&](double n) {
        LevelResult level = solve_level(graph, f, n, delta, prev, cfg);
        const double step = (level.u - prev).minCoeff();
        const double norm_step = level.stats.norm - prev_norm;
        report.worst_pointwise_step = std::min(report.worst_pointwise_step, step);
        report.worst_norm_step = std::min(report.worst_norm_step, norm_step);
        if (step < -cfg.monotonicity_slack) {
            std::ostringstream os;
            os << "monotonicity violated at n=" << n << ": min(u_next - u_prev) = " << step;
            throw InvariantViolation(os.str());
        }
        if (norm_step < -cfg.norm_slack) {
            std::ostringstream os;
            os << "norm monotonicity violated at n=" << n << ": ||u_next|| - ||u_prev|| = " << norm_step;
            throw InvariantViolation(os.str());
        }
        const double change = (level.u - prev).cwiseAbs().maxCoeff();
        report.levels.push_back(level.stats);
        report.level_fields.push_back(level.u);
        prev_norm = level.stats.norm;
        prev = std::move(level.u);
        return change;
    };

    for (double n : cfg.n_schedule) {
        if (advance(n) < cfg.outer_tol) {
            report.outer_tol_reached = true;
            break;
        }
    }
    if (cfg.limit_level) {
        if (report.levels.empty())
            throw std::invalid_argument("limit level needs at least one regularized level first");
        if (min_interior(mesh, prev) <= 0.0)
            throw InvariantViolation("limit level needs a positive warm start");
        advance(kLimitLevel);
    }
    report.converged = report.outer_tol_reached || cfg.limit_level;
    report.solution = prev;
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

// ---------------------------------------------------------------------------
// Diagnostics

double check_prop1(const KernelGraph& graph, const SourceField& f, double n, double delta, const Field& u_n,
                   const Field& phi)
{
    require_level(n);
    const Mesh& mesh = graph.mesh();
    const SourceField f_n = truncate_source(f, n);
    double pairing_sum = 0.0;
    for (auto i : mesh.interior()) {
        const auto k = static_cast<Eigen::Index>(i);
        pairing_sum += (u_n[k] - phi[k]) * g_n_derivative(u_n[k], n, delta) * f_n.at(i) * mesh.volume(i);
    }
    return energy_seminorm_p(graph, phi) + graph.p() * pairing_sum - energy_seminorm_p(graph, u_n);
}

AprioriReport apriori_norm_report(const KernelGraph& graph, const SolveReport& report,
                                  const SingularExponentField& delta, double slack)
{
    AprioriReport out;
    const double p = graph.p();
    const double exponent = delta.is_constant() ? delta.constant_value() : delta.delta_star();
    if (exponent > 1.0)
        out.power = (exponent + p - 1.0) / p;
    for (std::size_t k = 0; k < report.levels.size(); ++k) {
        Field v = report.level_fields[k];
        if (out.power != 1.0)
            v = v.cwiseMax(0.0).array().pow(out.power).matrix();
        out.rows.push_back({report.levels[k].n, seminorm(graph, v)});
    }
    out.bounded = !out.rows.empty();
    if (out.bounded) {
        const double cap = out.rows.back().value * (1.0 + slack);
        for (const auto& row : out.rows)
            out.bounded = out.bounded && row.value <= cap;
    }
    return out;
}

}  // namespace hfrac
