#include "hfrac/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include <boost/math/quadrature/tanh_sinh.hpp>

namespace hfrac {

namespace {

std::string describe(std::initializer_list<std::pair<const char*, double>> kv)
{
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, v] : kv) {
        os << (first ? "" : " ") << k << "=" << v;
        first = false;
    }
    return os.str();
}

}  // namespace

const char* to_string(RegularityCase c)
{
    switch (c) {
    case RegularityCase::variable_delta:
        return "variable-delta";
    case RegularityCase::delta_below_one:
        return "delta<1";
    case RegularityCase::delta_one:
        return "delta=1";
    case RegularityCase::delta_above_one:
        return "delta>1";
    }
    return "?";
}

double conjugate(double l)
{
    if (!(l >= 1.0))
        throw std::domain_error("conjugate exponent needs l >= 1");
    if (l == 1.0)
        return INFINITY;
    if (std::isinf(l))
        return 1.0;
    return l / (l - 1.0);
}

double sobolev_exponent(const ModelParams& params)
{
    const double q = params.q();
    if (!(params.sp() < q))
        throw std::domain_error("p_s^* requires sp < Q");
    return q * params.p() / (q - params.sp());
}

double linf_threshold(const ModelParams& params) { return params.q() / params.sp(); }

double required_m(RegularityCase c, double delta, const ModelParams& params)
{
    const double ps = sobolev_exponent(params);
    const double p = params.p();
    switch (c) {
    case RegularityCase::variable_delta:
        if (!(delta >= 1.0))
            throw std::domain_error("variable-delta case needs delta* >= 1");
        return conjugate((delta + p - 1.0) * ps / (p * delta));
    case RegularityCase::delta_below_one:
        if (!(delta > 0.0 && delta < 1.0))
            throw std::domain_error("case delta<1 needs 0 < delta < 1");
        return conjugate(ps / (1.0 - delta));
    case RegularityCase::delta_one:
        if (delta != 1.0)
            throw std::domain_error("case delta=1 needs delta = 1");
        return 1.0;
    case RegularityCase::delta_above_one:
        if (!(delta > 1.0))
            throw std::domain_error("case delta>1 needs delta > 1");
        return 1.0;
    }
    throw std::logic_error("unknown regularity case");
}

double required_m_unit_delta_star(const ModelParams& params) { return conjugate(sobolev_exponent(params)); }

double variable_case_lower_m(double delta_star, const ModelParams& params)
{
    const double q = params.q();
    const double p = params.p();
    return q * (delta_star + p - 1.0) / (q * (p - 1.0) + delta_star * params.sp());
}

double gamma_variable(double m, const ModelParams& params, DimensionConvention convention)
{
    const double d = convention == DimensionConvention::homogeneous_q ? params.q() : params.n();
    const double p = params.p();
    const double denom = m * (d - params.sp()) - d * (m - 1.0);
    if (!(denom > 0.0))
        throw std::domain_error("gamma is undefined: nonpositive denominator m(D-sp) - D(m-1)");
    return d * (p - 1.0) * (m - 1.0) / denom;
}

double gamma_constant(double m, double delta, const ModelParams& params)
{
    const double ps = sobolev_exponent(params);
    const double p = params.p();
    const double mc = conjugate(m);
    const double denom = p * mc - ps;
    if (!(denom > 0.0))
        throw std::domain_error("gamma is undefined: p m' <= p_s^*");
    if (delta == 1.0)
        return p * mc / denom;
    return (delta + p - 1.0) * mc / denom;
}

RegularityPrediction predicted_integrability(RegularityCase c, double m, double delta, const ModelParams& params,
                                             DimensionConvention convention)
{
    RegularityPrediction out;
    out.regularity_case = c;
    out.m = m;
    const double threshold = linf_threshold(params);
    if (m > threshold) {
        out.bounded = true;
        return out;
    }

    auto reject = [&](double lo, const char* bracket) {
        std::ostringstream os;
        os << "m = " << m << " outside the admissible range " << bracket << lo << ", " << threshold << ") for case "
           << to_string(c) << " and not above Q/(sp) = " << threshold;
        throw std::domain_error(os.str());
    };

    switch (c) {
    case RegularityCase::variable_delta: {
        const double lo = variable_case_lower_m(delta, params);
        if (!(m >= lo && m < threshold))
            reject(lo, "[");
        out.gamma = gamma_variable(m, params, convention);
        out.t = conjugate(m) * out.gamma;
        break;
    }
    case RegularityCase::delta_below_one: {
        const double lo = required_m(c, delta, params);
        if (!(m > lo && m < threshold))
            reject(lo, "(");
        out.gamma = gamma_constant(m, delta, params);
        out.t = sobolev_exponent(params) * out.gamma;
        break;
    }
    case RegularityCase::delta_one:
    case RegularityCase::delta_above_one: {
        required_m(c, delta, params);
        if (!(m > 1.0 && m < threshold))
            reject(1.0, "(");
        out.gamma = gamma_constant(m, delta, params);
        out.t = sobolev_exponent(params) * out.gamma;
        break;
    }
    }
    return out;
}

double discrete_lt_norm(const Mesh& mesh, const Field& u, double t)
{
    if (!(t > 0.0))
        throw std::domain_error("L^t norm needs t > 0");
    const Field ones = Field::Ones(u.size());
    return std::pow(weighted_lq_integral(mesh, u, ones, t, PowerMode::magnitude), 1.0 / t);
}

TrendRecord empirical_lt_study(std::span<const RefinementRun> runs, const RegularityPrediction& prediction,
                               double threshold)
{
    if (runs.size() < 2)
        throw std::invalid_argument("empirical_lt_study needs at least two refinement runs");
    TrendRecord out;
    for (const auto& run : runs) {
        const Mesh& mesh = *run.mesh;
        double umax = 0.0;
        for (auto i : mesh.interior())
            umax = std::max(umax, std::abs(run.u[static_cast<Eigen::Index>(i)]));
        out.h.push_back(mesh.h());
        out.max_value.push_back(umax);
        out.lt_norm.push_back(prediction.bounded ? NAN : discrete_lt_norm(mesh, run.u, prediction.t));
    }
    const auto& tracked = prediction.bounded ? out.max_value : out.lt_norm;
    const double a = tracked[tracked.size() - 2];
    const double b = tracked.back();
    out.last_change = std::abs(b - a) / std::max(std::abs(a), std::abs(b));
    out.bounded = out.last_change < threshold;
    return out;
}

bool check_condition_P(const SingularExponentField& delta, const Mesh& mesh, double eps, double delta_star)
{
    if (!(delta_star >= 1.0))
        throw std::invalid_argument("condition P needs delta* >= 1");
    for (auto i : boundary_strip(mesh, eps))
        if (delta.at(i) > delta_star)
            return false;
    return true;
}

// ---------------------------------------------------------------------------
// Algebraic lemma suites

LemmaReport monotonicity_lemma_suite(double p, std::size_t samples, std::uint64_t seed)
{
    LemmaReport out{"monotonicity", describe({{"p", p}}), samples, 0, INFINITY};
    const double floor = p >= 2.0 ? std::pow(2.0, 2.0 - p) : p - 1.0;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coord(-2.0, 2.0);
    std::uniform_real_distribution<double> decade(-3.0, 3.0);
    std::uniform_int_distribution<int> dim(1, 3);
    auto jp = [p](const Eigen::VectorXd& v) -> Eigen::VectorXd {
        const double n = v.norm();
        return n == 0.0 ? Eigen::VectorXd::Zero(v.size()) : Eigen::VectorXd(std::pow(n, p - 2.0) * v);
    };
    for (std::size_t s = 0; s < samples; ++s) {
        const int k = dim(rng);
        Eigen::VectorXd x(k), y(k);
        for (int a = 0; a < k; ++a) {
            x[a] = coord(rng);
            y[a] = coord(rng);
        }
        // Cover scale and near-antipodal configurations.
        if (s % 3 == 1)
            y = -std::abs(coord(rng)) * x;
        const double scale = std::pow(10.0, decade(rng));
        x *= scale;
        y *= scale;
        const double dist = (x - y).norm();
        if (dist == 0.0)
            continue;
        const double lhs = (jp(x) - jp(y)).dot(x - y);
        const double rhs = std::pow(x.norm() + y.norm(), p - 2.0) * dist * dist;
        const double ratio = lhs / rhs;
        out.min_ratio = std::min(out.min_ratio, ratio);
        if (!(ratio >= floor * (1.0 - 1e-12)))
            ++out.violations;
    }
    return out;
}

LemmaReport primitive_lemma_suite(double p, double q, std::size_t samples, std::uint64_t seed)
{
    LemmaReport out{"primitive", describe({{"p", p}, {"q", q}}), samples, 0, INFINITY};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coord(0.0, 3.0);
    // G' = (g')^{1/p} with g(t) = t^q on t >= 0.
    auto root_derivative = [p, q](double s) { return std::pow(q * std::pow(s, q - 1.0), 1.0 / p); };
    // Double-exponential quadrature copes with the s^{(q-1)/p} endpoint singularity at 0.
    boost::math::quadrature::tanh_sinh<double> quad;
    auto integrand = [&](double x, double) { return root_derivative(x); };
    for (std::size_t s = 0; s < samples; ++s) {
        double a = coord(rng);
        double b = s % 10 == 0 ? 0.0 : coord(rng);
        if (s % 2 == 1)
            std::swap(a, b);
        const double lhs = j_p(a - b, p) * (std::pow(a, q) - std::pow(b, q));
        const double span = a == b ? 0.0 : quad.integrate(integrand, std::min(a, b), std::max(a, b));
        const double rhs = std::pow(span, p);
        if (rhs == 0.0) {
            if (lhs < 0.0)
                ++out.violations;
            continue;
        }
        const double ratio = lhs / rhs;
        out.min_ratio = std::min(out.min_ratio, ratio);
        if (!(ratio >= 1.0 - 1e-9))
            ++out.violations;
    }
    return out;
}

LemmaReport power_gap_lemma_suite(double q, double eps, std::size_t samples, std::uint64_t seed)
{
    LemmaReport out{"power-gap", describe({{"q", q}, {"eps", eps}}), samples, 0, INFINITY};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double factor = std::pow(eps, q - 1.0);
    for (std::size_t s = 0; s < samples; ++s) {
        // Point of S^x_eps; the S^y_eps half is its mirror image.
        double x = s % 7 == 0 ? eps : eps + 5.0 * unit(rng);
        double y = s % 11 == 0 ? 0.0 : 5.0 * unit(rng);
        if (s % 2 == 1)
            std::swap(x, y);
        const double gap = std::abs(x - y);
        if (gap == 0.0)
            continue;
        const double ratio = std::abs(std::pow(x, q) - std::pow(y, q)) / (factor * gap);
        out.min_ratio = std::min(out.min_ratio, ratio);
        if (!(ratio >= 1.0 - 1e-12))
            ++out.violations;
    }
    return out;
}

std::vector<LemmaReport> lemma_suites(std::size_t samples, std::uint64_t seed)
{
    std::vector<LemmaReport> out;
    std::uint64_t stream = seed;
    for (double p : {1.5, 2.0, 3.0})
        out.push_back(monotonicity_lemma_suite(p, samples, ++stream));
    for (double p : {1.5, 2.0, 3.0})
        for (double q : {1.5, 2.5})
            out.push_back(primitive_lemma_suite(p, q, samples, ++stream));
    for (double q : {1.5, 2.5})
        for (double eps : {0.1, 1.0})
            out.push_back(power_gap_lemma_suite(q, eps, samples, ++stream));
    return out;
}

}  // namespace hfrac
