#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hfrac/solver.hpp"

namespace hfrac {

/// Extremal data of the mixed Sobolev inequality for constant delta in (0,1).
struct ExtremalResult {
    /// ||u_delta||^{p(1-delta-p)/(1-delta)}
    double theta = 0.0;
    /// ||V_delta||^p, equal to theta when u_delta solves the singular problem.
    double theta_from_extremal = 0.0;
    double tau_delta = 0.0;
    Field v_delta;
    /// Relative gap (||u||^p - sum u^{1-delta} f vol) / ||u||^p.
    double energy_identity_gap = 0.0;
    /// sum |V|^{1-delta} f vol - 1
    double constraint_residual = 0.0;
};

/// Throws std::invalid_argument unless delta is constant in (0,1).
double require_subunit_delta(const SingularExponentField& delta);

/// sum over interior of |v|^{1-delta} f vol.
double constraint_mass(const Mesh& mesh, const Field& v, const SourceField& f, double delta);

/// ||u||^p - sum u^{1-delta} f vol (absolute, unnormalized).
double energy_identity_check(const KernelGraph& graph, const Field& u_delta, const SourceField& f, double delta);

/// (sum u^{1-delta} f vol)^{-1/(1-delta)}; throws on zero mass.
double tau_delta(const Mesh& mesh, const Field& u_delta, const SourceField& f, double delta);

/// ||u_delta||^{p(1-delta-p)/(1-delta)}
double theta(const KernelGraph& graph, const Field& u_delta, double delta);

/// Full extremal computation; throws InvariantViolation when the relative energy
/// identity gap exceeds identity_tol.
ExtremalResult compute_extremal(const KernelGraph& graph, const Field& u_delta, const SourceField& f, double delta,
                                double identity_tol = 1e-6);

/// ||v||^p - Theta (sum |v|^{1-delta} f vol)^{p/(1-delta)}
double sobolev_slack(const KernelGraph& graph, const SourceField& f, double delta, double theta_value,
                     const Field& v);
/// Minimum slack over the trial fields.
double sobolev_check(const KernelGraph& graph, const SourceField& f, double delta, double theta_value,
                     std::span<const Field> trials);

/// Random bumps, signed noise, and translated / dilated copies of V_delta, all zero on the collar.
std::vector<Field> sobolev_trial_fields(const Mesh& mesh, const Field& v_delta, std::size_t count,
                                        std::uint64_t seed);

enum class Simplicity { proportional, not_proportional, no_equality };

struct SimplicityVerdict {
    Simplicity verdict = Simplicity::no_equality;
    /// Proportionality constant w / u_delta (mean ratio).
    double k = 0.0;
    /// Relative gap of the equality Theta (sum |w|^{1-delta} f)^{p/(1-delta)} = ||w||^p.
    double equality_gap = 0.0;
    /// Coefficient of variation of w_i / u_delta,i.
    double ratio_cv = 0.0;
};

SimplicityVerdict simplicity_check(const KernelGraph& graph, const SourceField& f, double delta, double theta_value,
                                   const Field& u_delta, const Field& w, double equality_tol = 1e-6,
                                   double cv_tol = 1e-6);

struct ComparisonVerdict {
    bool ordered = false;
    double max_excess = 0.0;  // max over interior of u - v
};

/// Ordering of converged solutions u (source f_u) and v (source f_v >= f_u).
/// Throws std::invalid_argument if f_u > f_v at some interior node.
ComparisonVerdict comparison_check(const Mesh& mesh, const Field& u, const Field& v, const SourceField& f_u,
                                   const SourceField& f_v, double tol = 1e-8);

/// R_i(u) - f_i u_i^{-delta} vol_i at interior nodes: <= 0 for subsolutions, >= 0 for supersolutions.
Field singular_defect(const KernelGraph& graph, const Field& u, const SourceField& f, double delta);

/// Smallest ||v||^p over S_delta found by projected descent from random positive starts.
double projected_search_min(const KernelGraph& graph, const SourceField& f, double delta, int restarts, int iters,
                            std::uint64_t seed);

}  // namespace hfrac
