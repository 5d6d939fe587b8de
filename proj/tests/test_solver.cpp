#include <doctest.h>

#include <cmath>
#include <random>

#include "hfrac/errors.hpp"
#include "hfrac/solver.hpp"
#include "hfrac/verify.hpp"

using namespace hfrac;

namespace {

std::shared_ptr<const Mesh> small_cube(double h = 0.5)
{
    return std::make_shared<const Mesh>(build_mesh(DomainSpec::cube(1, -1.0, 1.0), h, 1.0));
}

Field positive_interior(const Mesh& mesh, std::mt19937_64& rng)
{
    return random_interior_field(mesh, rng, 0.1, 2.0);
}

}  // namespace

TEST_CASE("truncate_source")
{
    auto mesh = small_cube();
    Field v = Field::Zero(static_cast<Eigen::Index>(mesh->size()));
    v[static_cast<Eigen::Index>(mesh->interior()[0])] = 5.0;
    v[static_cast<Eigen::Index>(mesh->interior()[1])] = 0.5;
    const SourceField f(*mesh, v);
    const auto t = truncate_source(f, 2.0);
    CHECK(t.at(mesh->interior()[0]) == 2.0);
    CHECK(t.at(mesh->interior()[1]) == 0.5);
    CHECK(truncate_source(f, kLimitLevel).at(mesh->interior()[0]) == 5.0);
}

TEST_CASE("source and delta validation")
{
    auto mesh = small_cube();
    const Field zero = Field::Zero(static_cast<Eigen::Index>(mesh->size()));
    CHECK_THROWS_WITH_AS(SourceField(*mesh, zero), "source f must not vanish identically", std::invalid_argument);
    Field neg = zero;
    neg[static_cast<Eigen::Index>(mesh->interior()[0])] = -1.0;
    CHECK_THROWS_AS(SourceField(*mesh, neg), std::invalid_argument);
    CHECK_THROWS_AS(SourceField::constant(*mesh, 1.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(SingularExponentField::constant(*mesh, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(SingularExponentField::from_values(*mesh, zero.array() + 0.5, 0.1, 0.5), std::invalid_argument);
    const auto d = SingularExponentField::from_values(*mesh, zero.array() + 0.7, 0.1, 1.0);
    CHECK(d.is_constant());
    CHECK(d.constant_value() == doctest::Approx(0.7));
}

TEST_CASE("g_n primitive and derivative")
{
    CHECK(g_n_derivative(-1.0, 1.0, 0.5) == doctest::Approx(1.0));
    CHECK(g_n_derivative(3.0, 1.0, 2.0) == doctest::Approx(1.0 / 16.0));
    CHECK(g_n_primitive(0.0, 1.0, 1.0) == doctest::Approx(0.0));
    CHECK(g_n_primitive(-2.0, 4.0, 1.0) == doctest::Approx(-8.0));
    CHECK(g_n_primitive(0.0, 4.0, 0.5) == doctest::Approx(2.0 * std::sqrt(0.25)));
    CHECK(g_n_primitive(4.0, kLimitLevel, 0.5) == doctest::Approx(4.0));
    CHECK(std::isinf(g_n_primitive(-1.0, kLimitLevel, 0.5)));
    CHECK(g_n_primitive(std::exp(1.0), kLimitLevel, 1.0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(g_n_primitive(1.0, 1.0, 0.0), std::invalid_argument);
    for (double delta : {0.5, 1.0, 2.0})
        for (double n : {1.0, 8.0})
            for (double t : {-0.7, 0.3, 2.5}) {
                const double e = 1e-6;
                const double fd = (g_n_primitive(t + e, n, delta) - g_n_primitive(t - e, n, delta)) / (2 * e);
                CHECK(fd == doctest::Approx(g_n_derivative(t, n, delta)).epsilon(1e-6));
            }
}

TEST_CASE("regularized energy vanishes at zero and its gradient matches finite differences")
{
    auto mesh = small_cube();
    std::mt19937_64 rng(1);
    for (double p : {1.5, 2.0, 3.0})
        for (double delta : {0.5, 1.0, 2.0}) {
            const auto g = assemble(mesh, ModelParams(1, 0.5, p));
            const auto f = SourceField::constant(*mesh, 1.0);
            const auto d = SingularExponentField::constant(*mesh, delta);
            const Field zero = Field::Zero(static_cast<Eigen::Index>(mesh->size()));
            CHECK(regularized_energy(g, f, 4.0, d, zero) == 0.0);
            const Field u = random_interior_field(*mesh, rng, -0.5, 1.5);
            const Field grad = regularized_gradient(g, f, 4.0, d, u);
            double worst = 0.0;
            for (auto i : mesh->interior()) {
                const auto k = static_cast<Eigen::Index>(i);
                const double e = 1e-6;
                Field up = u, um = u;
                up[k] += e;
                um[k] -= e;
                const double fd =
                    (regularized_energy(g, f, 4.0, d, up) - regularized_energy(g, f, 4.0, d, um)) / (2 * e);
                worst = std::max(worst, std::abs(fd - grad[k]));
            }
            CHECK(worst < 1e-6 * std::max(1.0, grad.cwiseAbs().maxCoeff()));
        }
}

TEST_CASE("single interior node matches the scalar oracle")
{
    auto mesh = single_node_mesh(1, 0.5);
    REQUIRE(mesh->interior().size() == 1);
    for (double p : {1.5, 2.0, 3.0}) {
        const auto g = assemble(mesh, ModelParams(1, 0.5, p));
        const auto f = SourceField::constant(*mesh, 1.0);
        const std::size_t i = mesh->interior()[0];
        for (double delta : {0.5, 1.0, 2.0})
            for (double n : {1.0, 4.0, 16.0}) {
                SolveConfig cfg;
                cfg.inner_tol = 1e-12;
                const auto d = SingularExponentField::constant(*mesh, delta);
                const auto r = solve_level(g, f, n, d, Field::Zero(static_cast<Eigen::Index>(mesh->size())), cfg);
                const double oracle =
                    scalar_oracle(g.collar_weight()[static_cast<Eigen::Index>(i)], p, 1.0, mesh->volume(i), n, delta);
                CHECK(std::abs(r.u[static_cast<Eigen::Index>(i)] - oracle) <= 1e-10 * std::max(1.0, oracle));
            }
    }
}

TEST_CASE("solve_level: distinct starting points reach the same minimizer")
{
    auto mesh = small_cube();
    std::mt19937_64 rng(3);
    for (double p : {1.5, 2.0, 3.0}) {
        const auto g = assemble(mesh, ModelParams(1, 0.5, p));
        const auto f = SourceField::constant(*mesh, 1.0);
        const auto d = SingularExponentField::constant(*mesh, 0.5);
        SolveConfig cfg;
        if (p == 2.0)
            cfg.inner_tol = 1e-10;
        const auto a = solve_level(g, f, 4.0, d, Field::Zero(static_cast<Eigen::Index>(mesh->size())), cfg);
        const auto b = solve_level(g, f, 4.0, d, positive_interior(*mesh, rng), cfg);
        CHECK((a.u - b.u).cwiseAbs().maxCoeff() < (p == 2.0 ? 1e-8 : 1e-5));
        CHECK(a.stats.min_interior > 0.0);
        for (std::size_t k = 1; k < a.stats.energy_trace.size(); ++k)
            CHECK(a.stats.energy_trace[k] <= a.stats.energy_trace[k - 1] + 1e-12 * std::abs(a.stats.energy_trace[k - 1]));
    }
}

TEST_CASE("gradient and Newton agree at p = 2")
{
    auto mesh = small_cube();
    const auto g = assemble(mesh, ModelParams(1, 0.5, 2.0));
    const auto f = SourceField::constant(*mesh, 1.0);
    const auto d = SingularExponentField::constant(*mesh, 0.5);
    SolveConfig newton, grad;
    newton.method = InnerMethod::newton;
    newton.inner_tol = 1e-10;
    grad.method = InnerMethod::gradient;
    grad.inner_tol = 1e-10;
    const Field zero = Field::Zero(static_cast<Eigen::Index>(mesh->size()));
    const auto a = solve_level(g, f, 8.0, d, zero, newton);
    const auto b = solve_level(g, f, 8.0, d, zero, grad);
    CHECK((a.u - b.u).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("SolveConfig validation")
{
    SolveConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.resolved_method(2.0) == InnerMethod::newton);
    CHECK(cfg.resolved_method(1.5) == InnerMethod::metric);
    CHECK(cfg.resolved_inner_tol(2.0) == 1e-8);
    CHECK(cfg.resolved_inner_tol(3.0) == 1e-6);
    cfg.method = InnerMethod::newton;
    CHECK_THROWS_AS(cfg.resolved_method(3.0), std::invalid_argument);
    SolveConfig bad;
    bad.n_schedule = {1, 4, 2};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.n_schedule = {};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.n_schedule = {0.5};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    SolveConfig tol;
    tol.inner_tol = 0.0;
    CHECK_THROWS_AS(tol.validate(), std::invalid_argument);
}

TEST_CASE("monotone_solve: increasing levels, positivity and limit level")
{
    auto mesh = small_cube();
    for (double p : {1.5, 2.0, 3.0}) {
        const auto g = assemble(mesh, ModelParams(1, 0.5, p));
        const auto f = SourceField::constant(*mesh, 1.0);
        const auto d = SingularExponentField::constant(*mesh, 0.5);
        SolveConfig cfg;
        const auto rep = monotone_solve(g, f, d, cfg);
        CHECK(rep.converged);
        REQUIRE(rep.levels.size() == cfg.n_schedule.size() + 1);
        CHECK(std::isinf(rep.levels.back().n));
        CHECK(rep.worst_pointwise_step >= -1e-8);
        CHECK(rep.worst_norm_step >= -1e-10);
        CHECK(rep.levels.back().min_interior > 0.0);
        for (std::size_t k = 1; k < rep.levels.size(); ++k)
            CHECK(rep.levels[k].norm >= rep.levels[k - 1].norm - 1e-10);
    }
}

TEST_CASE("monotone_solve: infinite outer tolerance stops after the first level")
{
    auto mesh = small_cube();
    const auto g = assemble(mesh, ModelParams(1, 0.5, 2.0));
    const auto f = SourceField::constant(*mesh, 1.0);
    const auto d = SingularExponentField::constant(*mesh, 0.5);
    SolveConfig cfg;
    cfg.outer_tol = INFINITY;
    cfg.limit_level = false;
    const auto rep = monotone_solve(g, f, d, cfg);
    CHECK(rep.levels.size() == 1);
    CHECK(rep.outer_tol_reached);
    CHECK(rep.converged);
}

TEST_CASE("check_prop1 at the level solution")
{
    auto mesh = small_cube();
    std::mt19937_64 rng(9);
    for (double p : {1.5, 2.0, 3.0}) {
        const auto g = assemble(mesh, ModelParams(1, 0.5, p));
        const auto f = SourceField::constant(*mesh, 1.0);
        const auto d = SingularExponentField::constant(*mesh, 0.5);
        SolveConfig cfg;
        if (p == 2.0)
            cfg.inner_tol = 1e-10;
        const auto r = solve_level(g, f, 4.0, d, Field::Zero(static_cast<Eigen::Index>(mesh->size())), cfg);
        CHECK(std::abs(check_prop1(g, f, 4.0, 0.5, r.u, r.u)) < 1e-12);
        CHECK(check_prop1(g, f, 4.0, 0.5, r.u, Field::Zero(r.u.size())) >= -1e-8);
        CHECK(check_prop1(g, f, 4.0, 0.5, r.u, 2.0 * r.u) >= -1e-8);
        for (int k = 0; k < 5; ++k)
            CHECK(check_prop1(g, f, 4.0, 0.5, r.u, random_interior_field(*mesh, rng, 0.0, 1.0)) >= -1e-8);
    }
}

TEST_CASE("apriori report picks the power from delta")
{
    auto mesh = small_cube();
    const auto g = assemble(mesh, ModelParams(1, 0.5, 2.0));
    const auto f = SourceField::constant(*mesh, 1.0);
    SolveConfig cfg;
    for (double delta : {0.5, 2.0}) {
        const auto d = SingularExponentField::constant(*mesh, delta);
        const auto rep = monotone_solve(g, f, d, cfg);
        const auto ap = apriori_norm_report(g, rep, d);
        CHECK(ap.power == doctest::Approx(delta > 1.0 ? 1.5 : 1.0));
        CHECK(ap.rows.size() == rep.levels.size());
        CHECK(ap.bounded);
    }
}

TEST_CASE("limit level from a nonpositive start is rejected")
{
    auto mesh = small_cube();
    const auto g = assemble(mesh, ModelParams(1, 0.5, 2.0));
    const auto f = SourceField::constant(*mesh, 1.0);
    const auto d = SingularExponentField::constant(*mesh, 2.0);
    CHECK_THROWS_AS(
        solve_level(g, f, kLimitLevel, d, Field::Zero(static_cast<Eigen::Index>(mesh->size())), SolveConfig{}),
        SolverError);
}
