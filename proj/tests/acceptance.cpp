// Acceptance suite: one PASS/FAIL line per criterion on the default instance
// (N = 1, s = 0.5, p = 2, cube [-1,1]^3, collar 1.0, f = 1, seed 0).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "hfrac/analysis.hpp"
#include "hfrac/config.hpp"
#include "hfrac/extremal.hpp"
#include "hfrac/run.hpp"
#include "hfrac/verify.hpp"

using namespace hfrac;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 0;
constexpr double kH = 0.4;
constexpr double kFineH = 0.25;
constexpr double kCollar = 1.0;
constexpr double kDelta = 0.5;

// Tolerances.
constexpr double kGroupTol = 1e-12;
constexpr double kGroupSeconds = 5.0;
constexpr double kGradientTol = 1e-6;
constexpr double kOracleTol = 1e-10;
constexpr double kPointwiseSlack = 1e-8;
constexpr double kNormSlack = 1e-10;
constexpr double kMonotoneSeconds = 60.0;
constexpr double kUniquenessTol = 1e-8;
constexpr double kIdentityTolNewton = 1e-6;
constexpr double kIdentityTolOther = 1e-4;
constexpr double kThetaTol = 1e-6;
constexpr double kConstraintTol = 1e-10;
constexpr double kSlackTol = -1e-10;
constexpr double kEqualityTol = 1e-6;
constexpr double kComparisonTol = 1e-8;
constexpr double kLemmaSeconds = 10.0;
constexpr double kProp1Tol = -1e-8;
constexpr double kTrendTol = 0.05;
constexpr double kSuiteSeconds = 300.0;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, const std::function<Verdict()>& body)
{
    Verdict v;
    const auto t0 = Clock::now();
    try {
        v = body();
    } catch (const std::exception& e) {
        v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.pass)
        ++failures;
    std::ostringstream os;
    os.precision(3);
    os << (v.pass ? "[PASS]" : "[FAIL]") << " criterion " << id << ": " << title << " -- " << v.detail << " ("
       << seconds_since(t0) << " s)";
    std::cout << os.str() << std::endl;
}

std::string fmt(double v)
{
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

struct Instance {
    std::shared_ptr<const Mesh> mesh;
    KernelGraph graph;
    SourceField f;
    SingularExponentField delta;
};

Instance instance(double h, double p, double delta = kDelta)
{
    auto mesh = std::make_shared<const Mesh>(build_mesh(DomainSpec::cube(1, -1.0, 1.0), h, kCollar));
    auto graph = assemble(mesh, ModelParams(1, 0.5, p));
    auto f = SourceField::constant(*mesh, 1.0);
    auto d = SingularExponentField::constant(*mesh, delta);
    return {mesh, std::move(graph), std::move(f), std::move(d)};
}

double interior_max(const Mesh& mesh, const Field& u)
{
    double m = -INFINITY;
    for (auto i : mesh.interior())
        m = std::max(m, u[static_cast<Eigen::Index>(i)]);
    return m;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// Shared converged solutions at h = 0.4 for criteria 6-9.
struct Singular {
    Instance in;
    Field u;
};

Singular& singular(double p)
{
    static std::map<double, std::unique_ptr<Singular>> cache;
    auto& slot = cache[p];
    if (!slot) {
        Instance in = instance(kH, p);
        SolveConfig cfg;
        if (p == 2.0)
            cfg.inner_tol = 1e-10;
        const auto rep = monotone_solve(in.graph, in.f, in.delta, cfg);
        slot = std::make_unique<Singular>(Singular{std::move(in), rep.solution});
    }
    return *slot;
}

}  // namespace

int main()
{
    const auto suite_start = Clock::now();

    criterion(1, "group algebra suite", [] {
        const auto t0 = Clock::now();
        double worst = 0.0;
        for (const auto& c : group_axiom_suite(1, 10000, kSeed))
            worst = std::max(worst, c.max_rel_err);
        const double secs = seconds_since(t0);
        return Verdict{worst <= kGroupTol && secs < kGroupSeconds,
                       "6 properties x 1e4 samples, max rel err " + fmt(worst)};
    });

    criterion(2, "gradient consistency", [] {
        auto mesh = random_cloud_mesh(1, 40, 10, 0.05, kSeed);
        std::mt19937_64 rng(kSeed);
        double worst = 0.0;
        for (double p : {1.5, 2.0, 3.0}) {
            const auto g = assemble(mesh, ModelParams(1, 0.5, p));
            for (int k = 0; k < 20; ++k)
                worst = std::max(worst, gradient_fd_error(g, random_interior_field(*mesh, rng, -1.0, 1.0)));
        }
        return Verdict{worst < kGradientTol, "50 nodes, 3 x 20 fields, max rel err " + fmt(worst)};
    });

    criterion(3, "scalar oracle", [] {
        auto mesh = single_node_mesh(1, kH);
        const auto g = assemble(mesh, ModelParams(1, 0.5, 2.0));
        const auto f = SourceField::constant(*mesh, 1.0);
        const std::size_t i = mesh->interior().front();
        const auto k = static_cast<Eigen::Index>(i);
        double worst = 0.0;
        for (double delta : {0.5, 1.0, 2.0})
            for (double n : {1.0, 4.0, 16.0}) {
                SolveConfig cfg;
                cfg.inner_tol = 1e-12;
                const auto r = solve_level(g, f, n, SingularExponentField::constant(*mesh, delta),
                                           Field::Zero(static_cast<Eigen::Index>(mesh->size())), cfg);
                const double oracle = scalar_oracle(g.collar_weight()[k], 2.0, 1.0, mesh->volume(i), n, delta);
                worst = std::max(worst, std::abs(r.u[k] - oracle));
            }
        return Verdict{worst <= kOracleTol, "9 (delta, n) cases, max abs err " + fmt(worst)};
    });

    criterion(4, "monotone scheme at h = 0.25", [] {
        const auto t0 = Clock::now();
        const Instance in = instance(kFineH, 2.0);
        const auto rep = monotone_solve(in.graph, in.f, in.delta, SolveConfig{});
        const double secs = seconds_since(t0);
        const double umin = rep.levels.back().min_interior;
        bool norms = true;
        for (std::size_t k = 1; k < rep.levels.size(); ++k)
            norms = norms && rep.levels[k].norm >= rep.levels[k - 1].norm - kNormSlack;
        const bool pass = rep.worst_pointwise_step >= -kPointwiseSlack && norms && umin > 0.0 &&
                          secs < kMonotoneSeconds;
        return Verdict{pass, std::to_string(in.mesh->interior().size()) + " interior nodes, worst step " +
                                 fmt(rep.worst_pointwise_step) + ", worst norm step " + fmt(rep.worst_norm_step) +
                                 ", min u " + fmt(umin)};
    });

    criterion(5, "uniqueness across solver paths", [] {
        const Instance in = instance(kH, 2.0);
        const double n = 64.0;
        const Field zero = Field::Zero(static_cast<Eigen::Index>(in.mesh->size()));
        SolveConfig newton;
        newton.method = InnerMethod::newton;
        newton.inner_tol = 1e-10;
        SolveConfig grad = newton;
        grad.method = InnerMethod::gradient;
        std::mt19937_64 rng(kSeed);
        const auto a = solve_level(in.graph, in.f, n, in.delta, zero, newton);
        const auto b = solve_level(in.graph, in.f, n, in.delta, random_interior_field(*in.mesh, rng, 0.0, 2.0), newton);
        const auto c = solve_level(in.graph, in.f, n, in.delta, zero, grad);
        const double init_gap = (a.u - b.u).cwiseAbs().maxCoeff();
        const double method_gap = (a.u - c.u).cwiseAbs().maxCoeff();
        return Verdict{init_gap <= kUniquenessTol && method_gap <= kUniquenessTol,
                       "zero vs random init " + fmt(init_gap) + ", gradient vs Newton " + fmt(method_gap)};
    });

    criterion(6, "energy identity", [] {
        std::string detail;
        bool pass = true;
        for (double p : {2.0, 1.5, 3.0}) {
            const auto& s = singular(p);
            const double gap = std::abs(energy_identity_check(s.in.graph, s.u, s.in.f, kDelta)) /
                               energy_seminorm_p(s.in.graph, s.u);
            pass = pass && gap < (p == 2.0 ? kIdentityTolNewton : kIdentityTolOther);
            detail += "p=" + fmt(p) + ": " + fmt(gap) + (p == 3.0 ? "" : ", ");
        }
        return Verdict{pass, detail};
    });

    criterion(7, "extremal consistency", [] {
        const auto& s = singular(2.0);
        const auto ex = compute_extremal(s.in.graph, s.u, s.in.f, kDelta);
        const double gap = std::abs(ex.theta - ex.theta_from_extremal) / ex.theta;
        return Verdict{gap < kThetaTol && std::abs(ex.constraint_residual) <= kConstraintTol,
                       "theta gap " + fmt(gap) + ", constraint residual " + fmt(ex.constraint_residual)};
    });

    criterion(8, "Sobolev inequality", [] {
        const auto& s = singular(2.0);
        const auto ex = compute_extremal(s.in.graph, s.u, s.in.f, kDelta);
        const auto trials = sobolev_trial_fields(*s.in.mesh, ex.v_delta, 100, kSeed);
        const double slack = sobolev_check(s.in.graph, s.in.f, kDelta, ex.theta, trials);
        double eq = 0.0;
        for (double lambda : {1.0, 0.5, 3.0}) {
            const Field v = lambda * ex.v_delta;
            eq = std::max(eq, std::abs(sobolev_slack(s.in.graph, s.in.f, kDelta, ex.theta, v)) /
                                  energy_seminorm_p(s.in.graph, v));
        }
        return Verdict{slack >= kSlackTol && eq < kEqualityTol,
                       "min slack over 100 trials " + fmt(slack) + ", equality gap " + fmt(eq)};
    });

    criterion(9, "simplicity", [] {
        const auto& s = singular(2.0);
        const double th = theta(s.in.graph, s.u, kDelta);
        const auto three = simplicity_check(s.in.graph, s.in.f, kDelta, th, s.u, 3.0 * s.u);
        const auto minus = simplicity_check(s.in.graph, s.in.f, kDelta, th, s.u, -1.0 * s.u);
        std::mt19937_64 rng(kSeed);
        std::uniform_real_distribution<double> jitter(-0.2, 0.2);
        Field w = s.u;
        for (auto i : s.in.mesh->interior())
            w[static_cast<Eigen::Index>(i)] *= 1.0 + jitter(rng);
        const auto perturbed = simplicity_check(s.in.graph, s.in.f, kDelta, th, s.u, w);
        const bool pass = three.verdict == Simplicity::proportional && std::abs(three.k - 3.0) < 1e-6 &&
                          minus.verdict == Simplicity::proportional && minus.k < 0.0 &&
                          perturbed.verdict == Simplicity::no_equality;
        return Verdict{pass, "k(3u) " + fmt(three.k) + ", k(-u) " + fmt(minus.k) + ", perturbed equality gap " +
                                 fmt(perturbed.equality_gap)};
    });

    criterion(10, "comparison principle", [] {
        const Instance in = instance(kH, 2.0);
        std::mt19937_64 rng(kSeed);
        std::uniform_real_distribution<double> bump(0.0, 1.0);
        double worst = -INFINITY;
        for (int k = 0; k < 20; ++k) {
            const Field f1 = random_interior_field(*in.mesh, rng, 0.5, 1.5);
            Field f2 = f1;
            for (auto i : in.mesh->interior())
                f2[static_cast<Eigen::Index>(i)] += bump(rng);
            const SourceField s1(*in.mesh, f1, INFINITY), s2(*in.mesh, f2, INFINITY);
            const auto u1 = monotone_solve(in.graph, s1, in.delta, SolveConfig{}).solution;
            const auto u2 = monotone_solve(in.graph, s2, in.delta, SolveConfig{}).solution;
            worst = std::max(worst, comparison_check(*in.mesh, u1, u2, s1, s2).max_excess);
        }
        return Verdict{worst <= kComparisonTol, "20 pairs, max(u1 - u2) " + fmt(worst)};
    });

    criterion(11, "algebraic lemma suites", [] {
        const auto t0 = Clock::now();
        std::size_t violations = 0, suites = 0;
        double c15 = INFINITY;
        for (const auto& r : lemma_suites(100000, kSeed)) {
            violations += r.violations;
            ++suites;
            if (r.name == "monotonicity" && r.parameters.find("1.5") != std::string::npos)
                c15 = r.min_ratio;
        }
        const double secs = seconds_since(t0);
        return Verdict{violations == 0 && secs < kLemmaSeconds,
                       std::to_string(suites) + " suites x 1e5 samples, violations " + std::to_string(violations) +
                           ", empirical C(1.5) " + fmt(c15)};
    });

    criterion(12, "check_prop1 at converged levels", [] {
        const Instance in = instance(kH, 2.0);
        const auto rep = monotone_solve(in.graph, in.f, in.delta, SolveConfig{});
        std::mt19937_64 rng(kSeed);
        const double top = 2.0 * interior_max(*in.mesh, rep.solution);
        double worst = INFINITY;
        for (std::size_t k = 0; k < rep.levels.size(); ++k)
            for (int j = 0; j < 20; ++j)
                worst = std::min(worst, check_prop1(in.graph, in.f, rep.levels[k].n, kDelta, rep.level_fields[k],
                                                    random_interior_field(*in.mesh, rng, 0.0, top)));
        return Verdict{worst >= kProp1Tol,
                       std::to_string(rep.levels.size()) + " levels x 20 fields, min slack " + fmt(worst)};
    });

    criterion(13, "exponent calculators", [] {
        const ModelParams mp(1, 0.5, 2.0);
        const double m = required_m(RegularityCase::delta_below_one, 0.5, mp);
        const auto pred = predicted_integrability(RegularityCase::delta_one, 1.5, 1.0, mp);
        const double thr = linf_threshold(mp);
        const bool bounded5 = predicted_integrability(RegularityCase::delta_one, 5.0, 1.0, mp).bounded;
        const double g_end = gamma_constant(m, 0.5, mp);
        const double t_end = sobolev_exponent(mp) * g_end;
        const bool pass = rational_form(m) == "16/13" && std::abs(pred.t - 4.8) < 1e-12 && thr == 4.0 && bounded5 &&
                          std::abs(g_end - 1.0) < 1e-12 && std::abs(t_end - sobolev_exponent(mp)) < 1e-12;
        return Verdict{pass, "m " + rational_form(m) + ", t " + fmt(pred.t) + ", Q/(sp) " + fmt(thr) +
                                 ", endpoint gamma " + fmt(g_end) + ", endpoint t " + fmt(t_end)};
    });

    criterion(14, "L-infinity trend between h = 0.4 and h = 0.25", [] {
        const Instance a = instance(kH, 2.0);
        const Instance b = instance(kFineH, 2.0);
        const std::vector<RefinementRun> runs{
            {a.mesh, monotone_solve(a.graph, a.f, a.delta, SolveConfig{}).solution},
            {b.mesh, monotone_solve(b.graph, b.f, b.delta, SolveConfig{}).solution}};
        const auto pred = predicted_integrability(RegularityCase::delta_below_one, INFINITY, kDelta, a.graph.params());
        const auto trend = empirical_lt_study(runs, pred, kTrendTol);
        return Verdict{pred.bounded && trend.bounded, "max u " + fmt(trend.max_value[0]) + " -> " +
                                                          fmt(trend.max_value[1]) + ", relative change " +
                                                          fmt(trend.last_change)};
    });

    criterion(15, "determinism of verify", [] {
        const RunConfig cfg = parse_config(fs::path(HFRAC_SOURCE_DIR) / "configs" / "default.cfg");
        const fs::path root = fs::temp_directory_path() / "hfrac_acceptance";
        fs::remove_all(root);
        std::ostringstream log;
        const int a = run(cfg, root / "a", log);
        const int b = run(cfg, root / "b", log);
        bool same = true;
        std::string files;
        for (const char* name : {"summary.txt", "solution.csv", "profile.dat"}) {
            same = same && fs::exists(root / "a" / name) && slurp(root / "a" / name) == slurp(root / "b" / name);
            files += std::string(files.empty() ? "" : ", ") + name;
        }
        return Verdict{same && a == kExitOk && b == kExitOk,
                       "exit codes " + std::to_string(a) + "/" + std::to_string(b) + ", " + files +
                           (same ? " identical" : " differ")};
    });

    const double total = seconds_since(suite_start);
    const bool in_budget = total < kSuiteSeconds;
    if (!in_budget)
        ++failures;
    std::cout << (in_budget ? "[PASS]" : "[FAIL]") << " full suite runtime " << fmt(total) << " s (budget "
              << kSuiteSeconds << " s)" << std::endl;
    std::cout << failures << " failed" << std::endl;
    return failures == 0 ? 0 : 1;
}
