#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hfrac/solver.hpp"

namespace hfrac {

enum class RegularityCase { variable_delta, delta_below_one, delta_one, delta_above_one };

const char* to_string(RegularityCase c);

/// Which dimension enters gamma in the variable-exponent case. The printed
/// formula uses N; every other critical quantity uses the homogeneous dimension Q.
enum class DimensionConvention { homogeneous_q, printed_n };

struct RegularityPrediction {
    RegularityCase regularity_case = RegularityCase::delta_one;
    double m = 1.0;
    bool bounded = false;  // u in L^infinity
    double t = 0.0;        // finite exponent when !bounded
    double gamma = 0.0;
};

/// Conjugate exponent l/(l-1); +inf at l = 1.
double conjugate(double l);

/// p_s^* = Qp/(Q - sp)
double sobolev_exponent(const ModelParams& params);

/// Q/(sp): above it the solution is bounded.
double linf_threshold(const ModelParams& params);

/// Summability of f required for existence:
///   variable delta: ((delta*+p-1) p_s^* / (p delta*))'
///   0 < delta < 1:  (p_s^*/(1-delta))'
///   delta >= 1:     1
double required_m(RegularityCase c, double delta, const ModelParams& params);

/// (p_s^*)', the exponent used in the delta* = 1 a-priori bound.
double required_m_unit_delta_star(const ModelParams& params);

/// Lower end of the variable-delta L^t range: Q(delta*+p-1)/(Q(p-1)+delta* sp).
double variable_case_lower_m(double delta_star, const ModelParams& params);

/// gamma = D(p-1)(m-1)/(m(D-sp)-D(m-1)), D = Q or N.
double gamma_variable(double m, const ModelParams& params,
                      DimensionConvention convention = DimensionConvention::homogeneous_q);

/// gamma for constant delta: (delta+p-1)m'/(pm'-p_s^*) for delta != 1, pm'/(pm'-p_s^*) for delta = 1.
double gamma_constant(double m, double delta, const ModelParams& params);

/// Integrability of the solution for the given case; throws std::domain_error when
/// m lies outside every admissible interval.
RegularityPrediction predicted_integrability(RegularityCase c, double m, double delta, const ModelParams& params,
                                             DimensionConvention convention = DimensionConvention::homogeneous_q);

/// (sum over interior |u|^t vol)^{1/t}
double discrete_lt_norm(const Mesh& mesh, const Field& u, double t);

struct RefinementRun {
    std::shared_ptr<const Mesh> mesh;
    Field u;
};

struct TrendRecord {
    std::vector<double> h;
    std::vector<double> lt_norm;  // NaN for L^infinity predictions
    std::vector<double> max_value;
    double last_change = 0.0;  // relative change of the tracked quantity over the last refinement
    bool bounded = false;
};

/// Tracks ||u||_{L^t} (or max |u| for bounded predictions) over meshes of decreasing h.
TrendRecord empirical_lt_study(std::span<const RefinementRun> runs, const RegularityPrediction& prediction,
                               double threshold = 0.05);

/// delta <= delta* on the boundary strip of width eps.
bool check_condition_P(const SingularExponentField& delta, const Mesh& mesh, double eps, double delta_star);

struct LemmaReport {
    std::string name;
    std::string parameters;
    std::size_t samples = 0;
    std::size_t violations = 0;
    /// Smallest observed ratio lhs / rhs (for the monotonicity lemma: the empirical C(p)).
    double min_ratio = 0.0;
};

/// <J_p(x)-J_p(y), x-y> >= C (|x|+|y|)^{p-2} |x-y|^2 in R^k, checked against
/// C = 2^{2-p} for p >= 2 and C = p-1 for p < 2.
LemmaReport monotonicity_lemma_suite(double p, std::size_t samples, std::uint64_t seed);

/// J_p(a-b)(g(a)-g(b)) >= |G(a)-G(b)|^p for g(t) = t^q on [0, inf), G by tanh-sinh quadrature.
LemmaReport primitive_lemma_suite(double p, double q, std::size_t samples, std::uint64_t seed);

/// |x^q - y^q| >= eps^{q-1}|x-y| on {x >= eps, y >= 0} u {y >= eps, x >= 0}.
LemmaReport power_gap_lemma_suite(double q, double eps, std::size_t samples, std::uint64_t seed);

/// All three suites over p in {1.5, 2, 3}, q in {1.5, 2.5}, eps in {0.1, 1}.
std::vector<LemmaReport> lemma_suites(std::size_t samples, std::uint64_t seed);

}  // namespace hfrac
