#include "hfrac/nonlocal.hpp"

#include <cmath>
#include <stdexcept>

namespace hfrac {

namespace {

inline double abs_pow(double t, double p)
{
    const double a = std::abs(t);
    if (p == 2.0)
        return a * a;
    return a == 0.0 ? 0.0 : std::pow(a, p);
}

}  // namespace

double j_p(double t, double p)
{
    if (p == 2.0)
        return t;
    if (t == 0.0)
        return 0.0;
    return std::copysign(std::pow(std::abs(t), p - 1.0), t);
}

KernelGraph::KernelGraph(std::shared_ptr<const Mesh> mesh, ModelParams params, std::vector<WeightedPair> pairs,
                         Eigen::VectorXd collar_weight, std::vector<WeightedPair> collar_pairs,
                         bool explicit_collar)
    : mesh_(std::move(mesh)),
      params_(params),
      pairs_(std::move(pairs)),
      collar_weight_(std::move(collar_weight)),
      collar_pairs_(std::move(collar_pairs)),
      explicit_collar_(explicit_collar),
      local_(mesh_->size(), -1)
{
    if (static_cast<std::size_t>(collar_weight_.size()) != mesh_->size())
        throw std::invalid_argument("KernelGraph: collar weight length mismatch");
    const auto& interior = mesh_->interior();
    for (std::size_t k = 0; k < interior.size(); ++k)
        local_[interior[k]] = static_cast<int>(k);
}

void KernelGraph::check_field(const Field& u) const
{
    if (static_cast<std::size_t>(u.size()) != mesh_->size())
        throw std::invalid_argument("field length does not match the mesh");
    if (!explicit_collar_)
        for (auto c : mesh_->collar())
            if (u[static_cast<Eigen::Index>(c)] != 0.0)
                throw std::invalid_argument("field is nonzero on the collar; assemble with explicit_collar");
}

KernelGraph assemble(std::shared_ptr<const Mesh> mesh, const ModelParams& params, const AssembleOptions& options)
{
    if (!mesh)
        throw std::invalid_argument("assemble: null mesh");
    if (mesh->group_dim() != params.n())
        throw std::invalid_argument("assemble: mesh dimension does not match N");

    const auto& nodes = mesh->nodes();
    const auto& interior = mesh->interior();
    const auto& collar = mesh->collar();
    const double cutoff = options.cutoff.value_or(INFINITY);

    auto weight = [&](std::size_t a, std::size_t b, double& w) {
        const double d = distance(nodes[a], nodes[b]);
        if (!(d > 0.0))
            throw std::invalid_argument("assemble: coincident mesh nodes");
        if (d > cutoff)
            return false;
        w = mesh->volume(a) * mesh->volume(b) * std::pow(d, -params.kernel_exponent());
        return true;
    };

    std::vector<WeightedPair> pairs;
    pairs.reserve(interior.size() * (interior.size() - 1) / 2);
    for (std::size_t a = 0; a < interior.size(); ++a)
        for (std::size_t b = a + 1; b < interior.size(); ++b) {
            const auto i = std::min(interior[a], interior[b]);
            const auto j = std::max(interior[a], interior[b]);
            double w = 0.0;
            if (weight(i, j, w))
                pairs.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), w});
        }

    Eigen::VectorXd collar_weight = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh->size()));
    std::vector<WeightedPair> collar_pairs;
    if (options.explicit_collar) {
        for (std::size_t i = 0; i < nodes.size(); ++i)
            for (std::size_t j = i + 1; j < nodes.size(); ++j) {
                if (mesh->is_interior(i) && mesh->is_interior(j))
                    continue;
                double w = 0.0;
                if (weight(i, j, w))
                    collar_pairs.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), w});
            }
    } else {
        for (auto i : interior) {
            double sum = 0.0;
            for (auto c : collar) {
                double w = 0.0;
                if (weight(i, c, w))
                    sum += w;
            }
            collar_weight[static_cast<Eigen::Index>(i)] = sum;
        }
    }
    return KernelGraph(std::move(mesh), params, std::move(pairs), std::move(collar_weight), std::move(collar_pairs),
                       options.explicit_collar);
}

double energy_seminorm_p(const KernelGraph& graph, const Field& u)
{
    graph.check_field(u);
    const double p = graph.p();
    double sum = 0.0;
    for (const auto& e : graph.pairs())
        sum += e.w * abs_pow(u[e.i] - u[e.j], p);
    if (graph.explicit_collar()) {
        for (const auto& e : graph.collar_pairs())
            sum += e.w * abs_pow(u[e.i] - u[e.j], p);
    } else {
        for (auto i : graph.mesh().interior())
            sum += graph.collar_weight()[static_cast<Eigen::Index>(i)] * abs_pow(u[static_cast<Eigen::Index>(i)], p);
    }
    return 2.0 * sum;
}

double seminorm(const KernelGraph& graph, const Field& u)
{
    return std::pow(energy_seminorm_p(graph, u), 1.0 / graph.p());
}

Field residual(const KernelGraph& graph, const Field& u)
{
    graph.check_field(u);
    const double p = graph.p();
    Field r = Field::Zero(u.size());
    auto add_pair = [&](const WeightedPair& e) {
        const double flux = 2.0 * e.w * j_p(u[e.i] - u[e.j], p);
        r[e.i] += flux;
        r[e.j] -= flux;
    };
    for (const auto& e : graph.pairs())
        add_pair(e);
    if (graph.explicit_collar()) {
        for (const auto& e : graph.collar_pairs())
            add_pair(e);
    } else {
        for (auto i : graph.mesh().interior()) {
            const auto k = static_cast<Eigen::Index>(i);
            r[k] += 2.0 * graph.collar_weight()[k] * j_p(u[k], p);
        }
    }
    for (auto c : graph.mesh().collar())
        r[static_cast<Eigen::Index>(c)] = 0.0;
    return r;
}

double pairing(const KernelGraph& graph, const Field& u, const Field& v)
{
    graph.check_field(u);
    graph.check_field(v);
    const double p = graph.p();
    double sum = 0.0;
    for (const auto& e : graph.pairs())
        sum += e.w * j_p(u[e.i] - u[e.j], p) * (v[e.i] - v[e.j]);
    if (graph.explicit_collar()) {
        for (const auto& e : graph.collar_pairs())
            sum += e.w * j_p(u[e.i] - u[e.j], p) * (v[e.i] - v[e.j]);
    } else {
        for (auto i : graph.mesh().interior()) {
            const auto k = static_cast<Eigen::Index>(i);
            sum += graph.collar_weight()[k] * j_p(u[k], p) * v[k];
        }
    }
    return 2.0 * sum;
}

Eigen::MatrixXd energy_hessian(const KernelGraph& graph, const Field& u)
{
    graph.check_field(u);
    const double p = graph.p();
    const auto m = static_cast<Eigen::Index>(graph.interior_count());
    Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(m, m);
    auto curvature = [p](double w, double d) {
        return p == 2.0 ? 2.0 * w : 2.0 * (p - 1.0) * w * std::pow(std::abs(d), p - 2.0);
    };
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
        for (auto i : graph.mesh().interior()) {
            const auto k = static_cast<Eigen::Index>(i);
            const int a = graph.local_index(i);
            hess(a, a) += curvature(graph.collar_weight()[k], u[k]);
        }
    }
    return hess;
}

Eigen::VectorXd stiffness_diagonal(const KernelGraph& graph)
{
    const auto m = static_cast<Eigen::Index>(graph.interior_count());
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(m);
    auto add = [&](const WeightedPair& e) {
        const int a = graph.local_index(e.i);
        const int b = graph.local_index(e.j);
        if (a >= 0)
            diag[a] += 2.0 * e.w;
        if (b >= 0)
            diag[b] += 2.0 * e.w;
    };
    for (const auto& e : graph.pairs())
        add(e);
    if (graph.explicit_collar()) {
        for (const auto& e : graph.collar_pairs())
            add(e);
    } else {
        for (auto i : graph.mesh().interior())
            diag[graph.local_index(i)] += 2.0 * graph.collar_weight()[static_cast<Eigen::Index>(i)];
    }
    return diag;
}

double weighted_lq_integral(const Mesh& mesh, const Field& u, const Field& weight, double q, PowerMode mode)
{
    if (static_cast<std::size_t>(u.size()) != mesh.size() || static_cast<std::size_t>(weight.size()) != mesh.size())
        throw std::invalid_argument("weighted_lq_integral: field length does not match the mesh");
    const bool integer_q = std::floor(q) == q;
    double sum = 0.0;
    for (auto i : mesh.interior()) {
        const double ui = u[static_cast<Eigen::Index>(i)];
        double term = 1.0;
        if (q != 0.0) {
            if (mode == PowerMode::magnitude) {
                term = std::pow(std::abs(ui), q);
            } else {
                if (ui < 0.0 && !integer_q)
                    throw std::domain_error("weighted_lq_integral: negative base with fractional exponent");
                term = std::pow(ui, q);
            }
        }
        sum += weight[static_cast<Eigen::Index>(i)] * term * mesh.volume(i);
    }
    return sum;
}

}  // namespace hfrac
