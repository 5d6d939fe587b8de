#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "hfrac/nonlocal.hpp"

namespace hfrac {

/// Regularization level standing for n = infinity: f is not truncated and the
/// shift 1/n vanishes, i.e. the discrete singular problem itself.
inline constexpr double kLimitLevel = std::numeric_limits<double>::infinity();

/// Singular exponent delta(x) > 0 at interior nodes, plus the strip width eps and
/// bound delta* of the boundary-strip condition.
class SingularExponentField {
public:
    static SingularExponentField constant(const Mesh& mesh, double delta);
    /// Per-node values (collar entries ignored). Detects constant fields.
    static SingularExponentField from_values(const Mesh& mesh, Field values, double eps, double delta_star);

    double at(std::size_t node) const { return values_[static_cast<Eigen::Index>(node)]; }
    const Field& values() const { return values_; }
    bool is_constant() const { return is_constant_; }
    double constant_value() const;
    double epsilon() const { return epsilon_; }
    double delta_star() const { return delta_star_; }
    double max_interior(const Mesh& mesh) const;

private:
    SingularExponentField(Field values, double eps, double delta_star, bool is_constant);

    Field values_;
    double epsilon_;
    double delta_star_;
    bool is_constant_;
};

/// Nonnegative source f, not identically zero on the interior; m is the declared
/// integrability exponent.
class SourceField {
public:
    SourceField(const Mesh& mesh, Field values, double m = 1.0);
    static SourceField constant(const Mesh& mesh, double value, double m = kLimitLevel);

    double at(std::size_t node) const { return values_[static_cast<Eigen::Index>(node)]; }
    const Field& values() const { return values_; }
    double m() const { return m_; }

private:
    SourceField(Field values, double m) : values_(std::move(values)), m_(m) {}
    friend SourceField truncate_source(const SourceField& f, double n);

    Field values_;
    double m_;
};

/// Pointwise min(f, n). n = kLimitLevel returns f.
SourceField truncate_source(const SourceField& f, double n);

/// Primitive of (t^+ + 1/n)^{-delta}:
///   (t^+ + 1/n)^{1-delta} / (1-delta) - n^delta t^-         (delta != 1)
///   log(t^+ + 1/n) - log(1/n) - n t^-                        (delta == 1)
/// At n = kLimitLevel this is t^{1-delta}/(1-delta) or log t for t > 0 and -inf for t < 0.
double g_n_primitive(double t, double n, double delta);
/// (t^+ + 1/n)^{-delta}
double g_n_derivative(double t, double n, double delta);

/// I_n(u) = (1/p) energy(u) - sum_i f_n,i (G_n(u_i) - G_n(0)) vol_i.
/// The G_n(0) shift is skipped at the limit level when delta >= 1, where it is infinite.
double regularized_energy(const KernelGraph& graph, const SourceField& f_n, double n,
                          const SingularExponentField& delta, const Field& u);

/// Gradient of regularized_energy: residual(u) - f_n (u^+ + 1/n)^{-delta} vol on the interior.
Field regularized_gradient(const KernelGraph& graph, const SourceField& f_n, double n,
                           const SingularExponentField& delta, const Field& u);

/// newton: exact Hessian step (p = 2 only). gradient: Jacobi-scaled gradient with
/// Barzilai-Borwein trial steps. metric: gradient step in the Hessian metric, with
/// pair gaps floored at 1e-8 max|u| so the metric stays finite for p < 2.
/// automatic picks newton at p = 2 and metric otherwise.
enum class InnerMethod { automatic, newton, gradient, metric };

struct ArmijoParams {
    double slope = 1e-4;
    double backtrack = 0.5;
    double initial_step = 1.0;
    int max_backtracks = 80;
};

struct SolveConfig {
    std::vector<double> n_schedule{1, 2, 4, 8, 16, 32, 64};
    /// Finish with the unregularized level n = kLimitLevel after the schedule.
    bool limit_level = true;
    /// Sup-norm of the Euler-Lagrange residual per unit node volume. Defaults to
    /// 1e-8 for Newton and 1e-6 for gradient descent.
    std::optional<double> inner_tol;
    double outer_tol = 1e-6;
    int max_inner_iters = 50000;
    ArmijoParams armijo;
    double monotonicity_slack = 1e-8;
    double norm_slack = 1e-10;
    InnerMethod method = InnerMethod::automatic;

    void validate() const;
    InnerMethod resolved_method(double p) const;
    double resolved_inner_tol(double p) const;
};

struct LevelStats {
    double n = 0.0;
    int iterations = 0;
    double residual = 0.0;
    double norm = 0.0;
    double min_interior = 0.0;
    double energy = 0.0;
    /// Steps accepted on residual decrease because the Armijo test was below energy roundoff.
    int roundoff_steps = 0;
    /// I_n after every accepted Armijo step.
    std::vector<double> energy_trace;
};

struct LevelResult {
    Field u;
    LevelStats stats;
};

/// Minimizes I_n from `init` (zero on the collar) with the configured inner
/// method, globalized by Armijo backtracking. Throws SolverError on iteration
/// or line-search failure, InvariantViolation if the minimizer is negative.
LevelResult solve_level(const KernelGraph& graph, const SourceField& f, double n, const SingularExponentField& delta,
                        const Field& init, const SolveConfig& cfg);

struct SolveReport {
    std::vector<LevelStats> levels;
    std::vector<Field> level_fields;
    bool converged = false;
    bool outer_tol_reached = false;
    Field solution;
    double wall_seconds = 0.0;
    /// Most negative min(u_next - u_prev) observed across consecutive levels.
    double worst_pointwise_step = 0.0;
    /// Most negative ||u_next|| - ||u_prev|| observed across consecutive levels.
    double worst_norm_step = 0.0;
};

/// Warm-started sweep over the regularization schedule, checking pointwise and
/// norm monotonicity between consecutive levels (InvariantViolation beyond slack).
SolveReport monotone_solve(const KernelGraph& graph, const SourceField& f, const SingularExponentField& delta,
                           const SolveConfig& cfg);

/// ||phi||^p + p sum (u_n - phi)(u_n + 1/n)^{-delta} f_n vol - ||u_n||^p for constant delta.
double check_prop1(const KernelGraph& graph, const SourceField& f, double n, double delta, const Field& u_n,
                   const Field& phi);

struct AprioriRow {
    double n;
    double value;
};

struct AprioriReport {
    /// 1 for the plain norm ||u_n||, (delta + p - 1)/p for ||u_n^{(delta+p-1)/p}||.
    double power = 1.0;
    std::vector<AprioriRow> rows;
    bool bounded = false;
};

AprioriReport apriori_norm_report(const KernelGraph& graph, const SolveReport& report,
                                  const SingularExponentField& delta, double slack = 1e-6);

}  // namespace hfrac
