#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "hfrac/hgroup.hpp"
#include "hfrac/mesh.hpp"

namespace hfrac {

/// Nodal values over every mesh node (interior followed by collar in mesh order).
using Field = Eigen::VectorXd;

struct WeightedPair {
    std::uint32_t i;
    std::uint32_t j;
    double w;
};

struct AssembleOptions {
    /// Keep pairs touching the collar as explicit pairs instead of per-node sums.
    /// Needed only for fields that are nonzero on the collar.
    bool explicit_collar = false;
    /// Drop pairs beyond this gauge distance. Off by default.
    std::optional<double> cutoff;
};

/// Symmetric pair weights w_ij = vol_i vol_j |x_j^{-1} o x_i|^{-(Q+sp)} over the mesh.
///
/// Interior-interior pairs are stored explicitly. Pairs with one collar endpoint
/// are folded into collar_weight(i) = sum_c w_ic, which is exact for fields that
/// vanish on the collar; collar-collar pairs never contribute to such fields and
/// are dropped unless explicit_collar is set.
class KernelGraph {
public:
    KernelGraph(std::shared_ptr<const Mesh> mesh, ModelParams params, std::vector<WeightedPair> pairs,
                Eigen::VectorXd collar_weight, std::vector<WeightedPair> collar_pairs, bool explicit_collar);

    const Mesh& mesh() const { return *mesh_; }
    std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }
    const ModelParams& params() const { return params_; }
    double p() const { return params_.p(); }

    const std::vector<WeightedPair>& pairs() const { return pairs_; }
    const std::vector<WeightedPair>& collar_pairs() const { return collar_pairs_; }
    const Eigen::VectorXd& collar_weight() const { return collar_weight_; }
    bool explicit_collar() const { return explicit_collar_; }

    /// Position of node i among interior nodes, -1 for collar nodes.
    int local_index(std::size_t node) const { return local_[node]; }
    std::size_t interior_count() const { return mesh_->interior().size(); }

    /// Throws std::invalid_argument when u does not match the mesh or is
    /// nonzero on the collar while collar pairs are aggregated.
    void check_field(const Field& u) const;

private:
    std::shared_ptr<const Mesh> mesh_;
    ModelParams params_;
    std::vector<WeightedPair> pairs_;
    Eigen::VectorXd collar_weight_;
    std::vector<WeightedPair> collar_pairs_;
    bool explicit_collar_;
    std::vector<int> local_;
};

/// |t|^{p-2} t, with j_p(0) = 0.
double j_p(double t, double p);

KernelGraph assemble(std::shared_ptr<const Mesh> mesh, const ModelParams& params,
                     const AssembleOptions& options = {});

/// Sum over ordered pairs i != j of w_ij |u_i - u_j|^p; the discrete norm is its p-th root.
double energy_seminorm_p(const KernelGraph& graph, const Field& u);
double seminorm(const KernelGraph& graph, const Field& u);

/// Gradient of (1/p) energy_seminorm_p at interior nodes, zero on the collar:
/// R_i = sum_{j != i} 2 w_ij j_p(u_i - u_j).
Field residual(const KernelGraph& graph, const Field& u);

/// Brute-force pairing sum_{i != j} w_ij j_p(u_i - u_j)(v_i - v_j).
double pairing(const KernelGraph& graph, const Field& u, const Field& v);

/// Hessian of (1/p) energy_seminorm_p restricted to interior unknowns (local ordering).
/// Entries with |u_i - u_j| = 0 are singular for p < 2; callers use it at p >= 2.
Eigen::MatrixXd energy_hessian(const KernelGraph& graph, const Field& u);

/// Diagonal of the p = 2 stiffness matrix on interior unknowns (local ordering).
Eigen::VectorXd stiffness_diagonal(const KernelGraph& graph);

enum class PowerMode {
    /// u^q; a negative base with non-integer q is a domain error.
    strict,
    /// |u|^q.
    magnitude,
};

/// sum over interior i of weight_i * u_i^q * vol_i, with u^0 := 1.
double weighted_lq_integral(const Mesh& mesh, const Field& u, const Field& weight, double q,
                            PowerMode mode = PowerMode::strict);

}  // namespace hfrac
