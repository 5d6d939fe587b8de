#include "hfrac/run.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "hfrac/errors.hpp"
#include "hfrac/extremal.hpp"
#include "hfrac/verify.hpp"

namespace hfrac {

namespace {

std::string num(double v)
{
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

class Summary {
public:
    void add(const std::string& key, const std::string& value) { rows_.emplace_back(key, value); }
    void add(const std::string& key, double value) { add(key, num(value)); }
    void add(const std::string& key, std::size_t value) { add(key, std::to_string(value)); }
    void add(const std::string& key, int value) { add(key, std::to_string(value)); }
    void add(const std::string& key, bool value) { add(key, std::string(value ? "true" : "false")); }

    /// Records a pass/fail flag.
    void check(const std::string& name, bool pass)
    {
        add("check." + name, std::string(pass ? "pass" : "FAIL"));
        if (!pass)
            failures_.push_back(name);
    }
    const std::vector<std::string>& failures() const { return failures_; }

    void write(const std::filesystem::path& path) const
    {
        std::ofstream out(path);
        if (!out)
            throw std::runtime_error("cannot write " + path.string());
        for (const auto& [k, v] : rows_)
            out << k << ": " << v << "\n";
    }

private:
    std::vector<std::pair<std::string, std::string>> rows_;
    std::vector<std::string> failures_;
};

struct Problem {
    std::shared_ptr<const Mesh> mesh;
    std::shared_ptr<const KernelGraph> graph;
    SingularExponentField delta;
    SourceField source;
};

std::shared_ptr<const Mesh> make_mesh(const RunConfig& cfg, double h)
{
    return std::make_shared<const Mesh>(build_mesh(cfg.domain, h, cfg.collar_width, cfg.max_nodes));
}

Problem make_problem(const RunConfig& cfg, double h)
{
    auto mesh = make_mesh(cfg, h);
    auto graph = std::make_shared<const KernelGraph>(assemble(mesh, cfg.params()));
    Field dv = materialize(cfg.delta, *mesh);
    double dmax = 0.0;
    for (auto i : mesh->interior()) {
        const double d = dv[static_cast<Eigen::Index>(i)];
        if (!(d > 0.0))
            throw ConfigError("delta must be positive (delta > 0) at every interior node");
        dmax = std::max(dmax, d);
    }
    auto delta = SingularExponentField::from_values(*mesh, std::move(dv), cfg.delta_epsilon.value_or(mesh->h()),
                                                    cfg.delta_star.value_or(std::max(1.0, dmax)));
    SourceField source(*mesh, materialize(cfg.source, *mesh), cfg.source_m);
    return {mesh, graph, std::move(delta), std::move(source)};
}

double interior_max(const Mesh& mesh, const Field& u)
{
    double m = -INFINITY;
    for (auto i : mesh.interior())
        m = std::max(m, u[static_cast<Eigen::Index>(i)]);
    return m;
}

double interior_min(const Mesh& mesh, const Field& u)
{
    double m = INFINITY;
    for (auto i : mesh.interior())
        m = std::min(m, u[static_cast<Eigen::Index>(i)]);
    return m;
}

void write_profile(const std::filesystem::path& path, const Mesh& mesh, const Field& u)
{
    const GroupPoint c = mesh.domain() ? mesh.domain()->center()
                                       : GroupPoint::identity(static_cast<std::size_t>(mesh.group_dim()));
    std::vector<std::pair<double, double>> rows;
    for (auto i : mesh.interior())
        rows.emplace_back(distance(mesh.node(i), c), u[static_cast<Eigen::Index>(i)]);
    std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << "# r u\n";
    for (const auto& [r, v] : rows)
        out << num(r) << " " << num(v) << "\n";
}

RegularityCase classify(const SingularExponentField& delta)
{
    if (!delta.is_constant())
        return RegularityCase::variable_delta;
    const double d = delta.constant_value();
    if (d < 1.0)
        return RegularityCase::delta_below_one;
    return d == 1.0 ? RegularityCase::delta_one : RegularityCase::delta_above_one;
}

double case_delta(RegularityCase c, const SingularExponentField& delta)
{
    return c == RegularityCase::variable_delta ? delta.delta_star() : delta.constant_value();
}

void prediction_block(Summary& sum, const RunConfig& cfg, RegularityCase c, double d)
{
    const ModelParams params = cfg.params();
    sum.add("prediction.case", std::string(to_string(c)));
    sum.add("prediction.m", cfg.source_m);
    const double req = required_m(c, d, params);
    sum.add("prediction.required_m", req);
    sum.add("prediction.m_admissible", cfg.source_m >= req);
    try {
        const auto pred = predicted_integrability(c, cfg.source_m, d, params, cfg.gamma_convention);
        sum.add("prediction.bounded", pred.bounded);
        if (!pred.bounded) {
            sum.add("prediction.gamma", pred.gamma);
            sum.add("prediction.t", pred.t);
        }
    } catch (const std::domain_error& e) {
        sum.add("prediction.status", std::string(e.what()));
    }
}

void solve_block(Summary& sum, const std::string& prefix, const SolveReport& rep, const Mesh& mesh)
{
    for (std::size_t k = 0; k < rep.levels.size(); ++k) {
        const auto& s = rep.levels[k];
        const std::string key = prefix + ".level." + std::to_string(k);
        sum.add(key + ".n", s.n);
        sum.add(key + ".iterations", s.iterations);
        sum.add(key + ".residual", s.residual);
        sum.add(key + ".norm", s.norm);
        sum.add(key + ".min_interior", s.min_interior);
        sum.add(key + ".energy", s.energy);
    }
    sum.add(prefix + ".converged", rep.converged);
    sum.add(prefix + ".outer_tol_reached", rep.outer_tol_reached);
    sum.add(prefix + ".worst_pointwise_step", rep.worst_pointwise_step);
    sum.add(prefix + ".worst_norm_step", rep.worst_norm_step);
    sum.add(prefix + ".solution_max", interior_max(mesh, rep.solution));
    sum.add(prefix + ".solution_min", interior_min(mesh, rep.solution));
}

SolveReport solve_and_report(Summary& sum, const RunConfig& cfg, const Problem& pb)
{
    SolveReport rep = monotone_solve(*pb.graph, pb.source, pb.delta, cfg.solver);
    solve_block(sum, "solve", rep, *pb.mesh);
    const auto apriori = apriori_norm_report(*pb.graph, rep, pb.delta);
    sum.add("apriori.power", apriori.power);
    for (std::size_t k = 0; k < apriori.rows.size(); ++k)
        sum.add("apriori.level." + std::to_string(k), apriori.rows[k].value);
    sum.add("apriori.bounded", apriori.bounded);
    const RegularityCase c = classify(pb.delta);
    prediction_block(sum, cfg, c, case_delta(c, pb.delta));
    return rep;
}

void write_fields(const RunConfig& cfg, const std::filesystem::path& out_dir, const Mesh& mesh, const Field& u)
{
    if (cfg.write_solution)
        write_solution_csv(out_dir / "solution.csv", mesh, u);
    if (cfg.write_profile)
        write_profile(out_dir / "profile.dat", mesh, u);
}

// ---------------------------------------------------------------------------

void mode_mesh_info(Summary& sum, const RunConfig& cfg)
{
    const auto mesh = make_mesh(cfg, cfg.h);
    const std::size_t n = mesh->size();
    const std::size_t ni = mesh->interior().size();
    const std::size_t nc = mesh->collar().size();
    sum.add("mesh.nodes", n);
    sum.add("mesh.interior", ni);
    sum.add("mesh.collar", nc);
    sum.add("mesh.node_volume", std::pow(cfg.h, 2 * cfg.n + 1));
    sum.add("mesh.interior_volume", mesh->interior_volume());
    sum.add("mesh.domain_volume", cfg.domain.volume());
    sum.add("mesh.pairs_all", n * (n - 1) / 2);
    sum.add("mesh.pairs_interior", ni * (ni - 1) / 2);
    sum.add("mesh.pairs_interior_collar", ni * nc);
}

void mode_exponents(Summary& sum, const RunConfig& cfg, const std::filesystem::path& out_dir)
{
    const ModelParams params = cfg.params();
    const double ps = sobolev_exponent(params);
    const double thr = linf_threshold(params);
    sum.add("exponents.Q", params.q());
    sum.add("exponents.sobolev", ps);
    sum.add("exponents.linf_threshold", thr);
    sum.add("exponents.required_m_unit_delta_star", required_m_unit_delta_star(params));

    RegularityCase c;
    double d;
    if (cfg.delta.kind == FieldSpec::Kind::constant) {
        d = cfg.delta.value;
        c = d < 1.0 ? RegularityCase::delta_below_one
                    : (d == 1.0 ? RegularityCase::delta_one : RegularityCase::delta_above_one);
    } else {
        c = RegularityCase::variable_delta;
        d = cfg.delta_star.value_or(1.0);
    }
    sum.add("exponents.case", std::string(to_string(c)));
    sum.add("exponents.delta", d);
    const double req = required_m(c, d, params);
    sum.add("m", rational_form(req).empty() ? num(req) : rational_form(req));
    sum.add("exponents.required_m", req);

    double lo = 1.0;
    bool closed = false;
    if (c == RegularityCase::variable_delta) {
        lo = variable_case_lower_m(d, params);
        closed = true;
        sum.add("exponents.variable_lower_m", lo);
    } else if (c == RegularityCase::delta_below_one) {
        lo = req;
        sum.add("exponents.endpoint.gamma", gamma_constant(req, d, params));
        sum.add("exponents.endpoint.t", ps * gamma_constant(req, d, params));
    }

    std::ofstream dat(out_dir / "exponents.dat");
    if (!dat)
        throw std::runtime_error("cannot write " + (out_dir / "exponents.dat").string());
    dat << "# m gamma t (t = inf: bounded)\n";
    constexpr int kRows = 8;
    int row = 0;
    for (int k = closed ? 0 : 1; k < kRows; ++k) {
        const double m = lo + (thr - lo) * k / kRows;
        const auto pred = predicted_integrability(c, m, d, params, cfg.gamma_convention);
        const std::string key = "t_table." + std::to_string(row++);
        sum.add(key + ".m", m);
        sum.add(key + ".gamma", pred.gamma);
        sum.add(key + ".t", pred.t);
        dat << num(m) << " " << num(pred.gamma) << " " << num(pred.t) << "\n";
    }
    const double mb = thr + 1.0;
    const auto pred = predicted_integrability(c, mb, d, params, cfg.gamma_convention);
    const std::string key = "t_table." + std::to_string(row);
    sum.add(key + ".m", mb);
    sum.add(key + ".t", pred.bounded ? std::string("inf") : num(pred.t));
    dat << num(mb) << " nan inf\n";

    prediction_block(sum, cfg, c, d);
}

void extremal_block(Summary& sum, const RunConfig& cfg, const Problem& pb, const Field& u)
{
    const double d = require_subunit_delta(pb.delta);
    const KernelGraph& g = *pb.graph;
    const double p = g.p();
    const ExtremalResult ex = compute_extremal(g, u, pb.source, d);
    sum.add("extremal.theta", ex.theta);
    sum.add("extremal.theta_from_extremal", ex.theta_from_extremal);
    sum.add("extremal.tau_delta", ex.tau_delta);
    sum.add("extremal.energy_identity_gap", ex.energy_identity_gap);
    sum.add("extremal.constraint_residual", ex.constraint_residual);
    const double theta_gap = std::abs(ex.theta - ex.theta_from_extremal) / ex.theta;
    sum.add("extremal.theta_gap", theta_gap);
    sum.check("energy_identity", std::abs(ex.energy_identity_gap) < (p == 2.0 ? 1e-6 : 1e-4));
    sum.check("extremal_theta", theta_gap < 1e-6);
    sum.check("extremal_constraint", std::abs(ex.constraint_residual) <= 1e-10);

    const auto trials = sobolev_trial_fields(*pb.mesh, ex.v_delta, cfg.verify.trial_fields, cfg.seed);
    const double slack = sobolev_check(g, pb.source, d, ex.theta, trials);
    sum.add("sobolev.trials", trials.size());
    sum.add("sobolev.min_slack", slack);
    sum.check("sobolev_slack", slack >= -1e-10);
    double worst_eq = 0.0;
    for (double lambda : {1.0, 0.5, 3.0}) {
        const Field v = lambda * ex.v_delta;
        const double rel = std::abs(sobolev_slack(g, pb.source, d, ex.theta, v)) / energy_seminorm_p(g, v);
        worst_eq = std::max(worst_eq, rel);
    }
    sum.add("sobolev.equality_gap", worst_eq);
    sum.check("sobolev_equality", worst_eq < 1e-6);

    const auto three = simplicity_check(g, pb.source, d, ex.theta, u, 3.0 * u);
    const auto minus = simplicity_check(g, pb.source, d, ex.theta, u, -1.0 * u);
    std::mt19937_64 rng(cfg.seed + 17);
    Field w = u;
    std::uniform_real_distribution<double> jitter(-0.2, 0.2);
    for (auto i : pb.mesh->interior())
        w[static_cast<Eigen::Index>(i)] *= 1.0 + jitter(rng);
    const auto perturbed = simplicity_check(g, pb.source, d, ex.theta, u, w);
    sum.add("simplicity.three.k", three.k);
    sum.add("simplicity.minus.k", minus.k);
    sum.add("simplicity.perturbed.equality_gap", perturbed.equality_gap);
    sum.check("simplicity_scaled", three.verdict == Simplicity::proportional && std::abs(three.k - 3.0) < 1e-6);
    sum.check("simplicity_negative", minus.verdict == Simplicity::proportional && minus.k < 0.0);
    sum.check("simplicity_perturbed", perturbed.verdict == Simplicity::no_equality);
}

void mode_extremal(Summary& sum, const RunConfig& cfg, const std::filesystem::path& out_dir)
{
    const Problem pb = make_problem(cfg, cfg.h);
    try {
        require_subunit_delta(pb.delta);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("extremal mode: ") + e.what());
    }
    const SolveReport rep = solve_and_report(sum, cfg, pb);
    write_fields(cfg, out_dir, *pb.mesh, rep.solution);
    extremal_block(sum, cfg, pb, rep.solution);
    const ExtremalResult ex = compute_extremal(*pb.graph, rep.solution, pb.source, pb.delta.constant_value());
    if (cfg.write_solution)
        write_solution_csv(out_dir / "extremal.csv", *pb.mesh, ex.v_delta);
}

void mode_verify(Summary& sum, const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log)
{
    const auto& vs = cfg.verify;
    const ModelParams params = cfg.params();

    log << "verify: group axioms\n";
    for (const auto& pc : group_axiom_suite(cfg.n, vs.group_samples, cfg.seed)) {
        sum.add("group." + pc.name + ".max_rel_err", pc.max_rel_err);
        sum.check("group_" + pc.name, pc.max_rel_err <= 1e-12);
    }

    log << "verify: lemma suites\n";
    for (const auto& rep : lemma_suites(vs.lemma_samples, cfg.seed)) {
        const std::string key = "lemma." + rep.name + "[" + rep.parameters + "]";
        sum.add(key + ".min_ratio", rep.min_ratio);
        sum.add(key + ".violations", rep.violations);
        sum.check("lemma_" + rep.name + "[" + rep.parameters + "]", rep.violations == 0);
    }

    log << "verify: gradient consistency\n";
    for (double p : {1.5, 2.0, 3.0}) {
        const ModelParams pp(cfg.n, cfg.s, p);
        auto mesh = random_cloud_mesh(cfg.n, 40, 10, 0.05, cfg.seed);
        const KernelGraph g = assemble(mesh, pp);
        std::mt19937_64 rng(cfg.seed + 101);
        double worst = 0.0;
        for (std::size_t k = 0; k < vs.gradient_fields; ++k)
            worst = std::max(worst, gradient_fd_error(g, random_interior_field(*mesh, rng, -1.0, 1.0)));
        sum.add("gradient[p=" + num(p) + "].max_rel_err", worst);
        sum.check("gradient[p=" + num(p) + "]", worst < 1e-6);
    }

    log << "verify: scalar oracle\n";
    {
        auto mesh = single_node_mesh(cfg.n, cfg.h);
        const KernelGraph g = assemble(mesh, params);
        const std::size_t i = mesh->interior().front();
        const SourceField f = SourceField::constant(*mesh, 1.0);
        SolveConfig sc = cfg.solver;
        sc.inner_tol = 1e-12;
        double worst = 0.0;
        for (double d : {0.5, 1.0, 2.0})
            for (double n : {1.0, 4.0, 16.0}) {
                const auto delta = SingularExponentField::constant(*mesh, d);
                const auto lvl = solve_level(g, f, n, delta, Field::Zero(static_cast<Eigen::Index>(mesh->size())), sc);
                const double ref = scalar_oracle(g.collar_weight()[static_cast<Eigen::Index>(i)], params.p(), 1.0,
                                                 mesh->volume(i), n, d);
                worst = std::max(worst, std::abs(lvl.u[static_cast<Eigen::Index>(i)] - ref) / std::max(1.0, ref));
            }
        sum.add("scalar_oracle.max_err", worst);
        sum.check("scalar_oracle", worst <= 1e-10);
    }

    log << "verify: monotone solve\n";
    const Problem pb = make_problem(cfg, cfg.h);
    const SolveReport rep = solve_and_report(sum, cfg, pb);
    write_fields(cfg, out_dir, *pb.mesh, rep.solution);
    sum.check("monotone_pointwise", rep.worst_pointwise_step >= -cfg.solver.monotonicity_slack);
    sum.check("monotone_norm", rep.worst_norm_step >= -cfg.solver.norm_slack);
    sum.check("solution_positive", interior_min(*pb.mesh, rep.solution) > 0.0);
    sum.check("apriori_bounded", apriori_norm_report(*pb.graph, rep, pb.delta).bounded);
    sum.check("condition_P",
              check_condition_P(pb.delta, *pb.mesh, pb.delta.epsilon(), pb.delta.delta_star()));

    log << "verify: uniqueness\n";
    {
        std::mt19937_64 rng(cfg.seed + 202);
        const double top = 2.0 * interior_max(*pb.mesh, rep.solution);
        const Field init = random_interior_field(*pb.mesh, rng, 0.1 * top, top);
        const double last_n = rep.levels.back().n;
        const auto alt = solve_level(*pb.graph, truncate_source(pb.source, last_n), last_n, pb.delta, init, cfg.solver);
        const double diff = (alt.u - rep.solution).cwiseAbs().maxCoeff();
        sum.add("uniqueness.sup_diff", diff);
        sum.check("uniqueness", diff <= 1e-8);
    }

    if (pb.delta.is_constant()) {
        log << "verify: prop1\n";
        const double d = pb.delta.constant_value();
        std::mt19937_64 rng(cfg.seed + 303);
        const double top = 2.0 * interior_max(*pb.mesh, rep.solution);
        double worst = INFINITY;
        for (std::size_t k = 0; k < rep.levels.size(); ++k) {
            const double n = rep.levels[k].n;
            for (std::size_t j = 0; j < vs.prop1_fields; ++j) {
                const Field phi = random_interior_field(*pb.mesh, rng, 0.0, top);
                worst = std::min(worst, check_prop1(*pb.graph, pb.source, n, d, rep.level_fields[k], phi));
            }
        }
        sum.add("prop1.min_slack", worst);
        sum.check("prop1", worst >= -1e-8);
    } else {
        sum.add("prop1.status", std::string("skipped (variable delta)"));
    }

    if (vs.comparison_pairs > 0) {
        log << "verify: comparison principle\n";
        std::mt19937_64 rng(cfg.seed + 404);
        std::uniform_real_distribution<double> bump(0.0, 1.0);
        double worst = -INFINITY;
        for (std::size_t k = 0; k < vs.comparison_pairs; ++k) {
            const Field f1 = random_interior_field(*pb.mesh, rng, 0.5, 1.5);
            Field f2 = f1;
            for (auto i : pb.mesh->interior())
                f2[static_cast<Eigen::Index>(i)] += bump(rng);
            const SourceField s1(*pb.mesh, f1, cfg.source_m), s2(*pb.mesh, f2, cfg.source_m);
            const auto r1 = monotone_solve(*pb.graph, s1, pb.delta, cfg.solver);
            const auto r2 = monotone_solve(*pb.graph, s2, pb.delta, cfg.solver);
            worst = std::max(worst, comparison_check(*pb.mesh, r1.solution, r2.solution, s1, s2).max_excess);
        }
        sum.add("comparison.pairs", vs.comparison_pairs);
        sum.add("comparison.max_excess", worst);
        sum.check("comparison", worst <= 1e-8);
    }

    if (pb.delta.is_constant() && pb.delta.constant_value() < 1.0) {
        log << "verify: extremal\n";
        extremal_block(sum, cfg, pb, rep.solution);
    }

    if (cfg.refine_h.size() >= 2) {
        log << "verify: refinement trend\n";
        std::vector<RefinementRun> runs;
        for (double h : cfg.refine_h) {
            const Problem rp = h == cfg.h ? pb : make_problem(cfg, h);
            const Field u = h == cfg.h ? rep.solution : monotone_solve(*rp.graph, rp.source, rp.delta, cfg.solver).solution;
            runs.push_back({rp.mesh, u});
        }
        const RegularityCase c = classify(pb.delta);
        const double d = case_delta(c, pb.delta);
        try {
            const auto pred = predicted_integrability(c, cfg.source_m, d, params, cfg.gamma_convention);
            const auto trend = empirical_lt_study(runs, pred);
            for (std::size_t k = 0; k < runs.size(); ++k) {
                const std::string key = "trend." + std::to_string(k);
                sum.add(key + ".h", trend.h[k]);
                sum.add(key + ".max_u", trend.max_value[k]);
                if (!pred.bounded)
                    sum.add(key + ".lt_norm", trend.lt_norm[k]);
            }
            sum.add("trend.last_change", trend.last_change);
            sum.add("trend.bounded", std::string(trend.bounded ? "true" : "false"));
        } catch (const std::domain_error& e) {
            sum.add("trend.status", std::string(e.what()));
        }
    }
}

}  // namespace

std::string rational_form(double v)
{
    if (!std::isfinite(v))
        return {};
    for (long q = 1; q <= 10000; ++q) {
        const double pn = std::round(v * static_cast<double>(q));
        if (std::abs(pn / static_cast<double>(q) - v) <= 1e-12 * std::max(1.0, std::abs(v)))
            return q == 1 ? num(pn) : num(pn) + "/" + std::to_string(q);
    }
    return {};
}

void write_solution_csv(const std::filesystem::path& path, const Mesh& mesh, const Field& u)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    const int n = mesh.group_dim();
    out << "node_id,role";
    for (int k = 0; k < n; ++k)
        out << ",x" << (n == 1 ? "" : std::to_string(k + 1));
    for (int k = 0; k < n; ++k)
        out << ",y" << (n == 1 ? "" : std::to_string(k + 1));
    out << ",t,volume,u\n";
    for (std::size_t i = 0; i < mesh.size(); ++i) {
        const GroupPoint& p = mesh.node(i);
        out << i << "," << (mesh.is_interior(i) ? "interior" : "collar");
        for (int k = 0; k < n; ++k)
            out << "," << num(p.x[k]);
        for (int k = 0; k < n; ++k)
            out << "," << num(p.y[k]);
        out << "," << num(p.t) << "," << num(mesh.volume(i)) << "," << num(u[static_cast<Eigen::Index>(i)]) << "\n";
    }
}

int run(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log)
{
    Summary sum;
    int code = kExitOk;
    std::string status = "ok";
    try {
        std::filesystem::create_directories(out_dir);
        for (const auto& [k, v] : cfg.echo())
            sum.add("config." + k, v);
        switch (cfg.mode) {
        case Mode::mesh_info:
            mode_mesh_info(sum, cfg);
            break;
        case Mode::exponents:
            mode_exponents(sum, cfg, out_dir);
            break;
        case Mode::solve: {
            const Problem pb = make_problem(cfg, cfg.h);
            const SolveReport rep = solve_and_report(sum, cfg, pb);
            write_fields(cfg, out_dir, *pb.mesh, rep.solution);
            break;
        }
        case Mode::extremal:
            mode_extremal(sum, cfg, out_dir);
            break;
        case Mode::verify:
            mode_verify(sum, cfg, out_dir, log);
            break;
        }
        if (!sum.failures().empty()) {
            code = kExitInvariant;
            status = "failed checks:";
            for (const auto& f : sum.failures())
                status += " " + f;
        }
    } catch (const SolverError& e) {
        code = kExitSolver;
        status = std::string("solver error: ") + e.what();
    } catch (const InvariantViolation& e) {
        code = kExitInvariant;
        status = std::string("invariant violation: ") + e.what();
    } catch (const ConfigError& e) {
        code = kExitConfig;
        status = std::string("config error: ") + e.what();
    } catch (const MeshError& e) {
        code = kExitConfig;
        status = std::string("mesh error: ") + e.what();
    } catch (const std::invalid_argument& e) {
        code = kExitConfig;
        status = std::string("invalid argument: ") + e.what();
    } catch (const std::domain_error& e) {
        code = kExitConfig;
        status = std::string("domain error: ") + e.what();
    }
    sum.add("status", status);
    sum.add("exit_code", code);
    if (code != kExitOk)
        log << status << "\n";
    try {
        std::filesystem::create_directories(out_dir);
        sum.write(out_dir / "summary.txt");
    } catch (const std::exception& e) {
        log << "cannot write summary: " << e.what() << "\n";
        if (code == kExitOk)
            code = kExitConfig;
    }
    return code;
}

}  // namespace hfrac
