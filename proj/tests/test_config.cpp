#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <cmath>
#include <map>
#include <variant>
#include <sstream>

#include "hfrac/errors.hpp"
#include "hfrac/run.hpp"

using namespace hfrac;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("hfrac_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::map<std::string, std::string> summary(const fs::path& dir)
{
    std::map<std::string, std::string> out;
    std::istringstream in(slurp(dir / "summary.txt"));
    std::string line;
    while (std::getline(in, line)) {
        const auto c = line.find(": ");
        if (c != std::string::npos)
            out[line.substr(0, c)] = line.substr(c + 2);
    }
    return out;
}

const char* kSmall = R"(
model.N = 1
model.s = 0.5
model.p = 2
mesh.h = 0.5
delta.value = 0.5
verify.group_samples = 200
verify.lemma_samples = 500
verify.trial_fields = 8
verify.comparison_pairs = 2
verify.prop1_fields = 2
verify.gradient_fields = 1
)";

std::string message_of(const std::string& text)
{
    try {
        parse_config_text(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("parse_config: defaults")
{
    const RunConfig cfg = parse_config_text("");
    CHECK(cfg.mode == Mode::solve);
    CHECK(cfg.n == 1);
    CHECK(cfg.s == 0.5);
    CHECK(cfg.p == 2.0);
    CHECK(cfg.h == 0.4);
    CHECK(cfg.collar_width == 1.0);
    CHECK(cfg.delta.kind == FieldSpec::Kind::constant);
    CHECK(cfg.source.value == 1.0);
    CHECK(cfg.solver.n_schedule.size() == 7);
    const auto echo = cfg.echo();
    CHECK_FALSE(echo.empty());
    bool has_h = false;
    for (const auto& [k, v] : echo)
        has_h = has_h || k == "mesh.h";
    CHECK(has_h);
}

TEST_CASE("parse_config: values and comments")
{
    const RunConfig cfg = parse_config_text(R"(
# comment
mode = extremal
seed = 7
model.p = 1.5   # trailing
source.m = inf
solver.method = gradient
solver.schedule = 1 3 9
domain.shape = koranyi_ball
domain.radius = 0.8
)");
    CHECK(cfg.mode == Mode::extremal);
    CHECK(cfg.seed == 7);
    CHECK(cfg.p == 1.5);
    CHECK(std::isinf(cfg.source_m));
    CHECK(cfg.solver.method == InnerMethod::gradient);
    CHECK(cfg.solver.n_schedule == std::vector<double>{1, 3, 9});
    CHECK(std::holds_alternative<KoranyiBall>(cfg.domain.shape()));
}

TEST_CASE("parse_config: errors name the line or the violated inequality")
{
    CHECK(message_of("model.s = 1.2") == "s must lie in (0,1)");
    CHECK(message_of("model.s = 0.9\nmodel.p = 5") == "sp < Q violated (4.5 ≥ 4)");
    CHECK(message_of("\nbogus.key = 1") == "line 2: unknown key 'bogus.key'");
    CHECK(message_of("mesh.h = 0.4\nmesh.h = 0.3") == "line 2: duplicate key 'mesh.h'");
    CHECK(message_of("mesh.h = abc") == "line 1: expected a number, got 'abc'");
    CHECK(message_of("just text") == "line 1: expected 'key = value'");
    CHECK(message_of("delta.value = -1") == "line 1: delta must be positive (delta > 0)");
    CHECK(message_of("source.value = 0").find("f must not vanish identically") != std::string::npos);
    CHECK(message_of("source.m = 0.5").find("m >= 1") != std::string::npos);
    CHECK(message_of("delta.star = 0.5").find("delta* >= 1") != std::string::npos);
    CHECK(message_of("mode = fly") == "line 1: unknown mode 'fly'");
    CHECK(message_of("domain.lower = -1 -1") .find("2N+1") != std::string::npos);
    CHECK_THROWS_AS(parse_config("/nonexistent/hfrac.cfg"), ConfigError);
}

TEST_CASE("radial profiles interpolate and clamp")
{
    const RunConfig cfg = parse_config_text("delta.kind = radial\ndelta.radial = 0:2, 1:1");
    const auto& prof = cfg.delta.radial;
    CHECK(prof(-1.0) == 2.0);
    CHECK(prof(0.5) == doctest::Approx(1.5));
    CHECK(prof(3.0) == 1.0);
    CHECK(message_of("delta.kind = radial\ndelta.radial = 1:2, 0:1").find("increasing") != std::string::npos);
}

TEST_CASE("rational_form")
{
    CHECK(rational_form(16.0 / 13.0) == "16/13");
    CHECK(rational_form(4.0) == "4");
    CHECK(rational_form(std::sqrt(2.0)).empty());
}

TEST_CASE("run: mesh-info counts")
{
    const auto dir = scratch("meshinfo");
    RunConfig cfg = parse_config_text("mode = mesh-info");
    std::ostringstream log;
    CHECK(run(cfg, dir, log) == kExitOk);
    auto s = summary(dir);
    CHECK(s["status"] == "ok");
    CHECK(s["mesh.interior"] == "125");
    CHECK(s["mesh.nodes"] == "871");
    CHECK(s["mesh.pairs_all"] == std::to_string(871ull * 870ull / 2ull));
}

TEST_CASE("run: exponents mode reports m = 16/13 and the t-table")
{
    const auto dir = scratch("exponents");
    RunConfig cfg = parse_config_text("mode = exponents\ndelta.value = 0.5");
    std::ostringstream log;
    CHECK(run(cfg, dir, log) == kExitOk);
    const std::string text = slurp(dir / "summary.txt");
    CHECK(text.find("m: 16/13") != std::string::npos);
    CHECK(text.find("t_table.0.m") != std::string::npos);
    CHECK(fs::exists(dir / "exponents.dat"));
}

TEST_CASE("run: solve writes the solution and round-trips it as a node file")
{
    const auto dir = scratch("solve");
    RunConfig cfg = parse_config_text(std::string(kSmall) + "mode = solve\n");
    std::ostringstream log;
    REQUIRE(run(cfg, dir, log) == kExitOk);
    auto s = summary(dir);
    CHECK(s["solve.converged"] == "true");
    REQUIRE(fs::exists(dir / "solution.csv"));
    REQUIRE(fs::exists(dir / "profile.dat"));

    const Mesh mesh = build_mesh(cfg.domain, cfg.h, cfg.collar_width);
    const Field u = read_node_file(dir / "solution.csv", mesh);
    CHECK(u.size() == static_cast<Eigen::Index>(mesh.size()));
    for (auto i : mesh.interior())
        CHECK(u[static_cast<Eigen::Index>(i)] > 0.0);

    RunConfig again = parse_config_text(std::string(kSmall) + "mode = solve\nsource.kind = file\nsource.file = " +
                                        (dir / "solution.csv").string() + "\n");
    CHECK(again.source.kind == FieldSpec::Kind::file);
    const Field f = materialize(again.source, mesh);
    CHECK((f - u).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("read_node_file rejects incomplete tables")
{
    const auto dir = scratch("nodefile");
    const Mesh mesh = build_mesh(DomainSpec::cube(1, -1.0, 1.0), 0.5, 1.0);
    {
        std::ofstream out(dir / "f.csv");
        out << "x,y,t,f\n0,0,0,1\n";
    }
    CHECK_THROWS_AS(read_node_file(dir / "f.csv", mesh), ConfigError);
    {
        std::ofstream out(dir / "g.csv");
        out << "x,y,t,f\n0.123,0,0,1\n";
    }
    CHECK_THROWS_AS(read_node_file(dir / "g.csv", mesh), ConfigError);
}

TEST_CASE("run: extremal mode requires delta below one")
{
    const auto dir = scratch("extremal_bad");
    RunConfig cfg = parse_config_text(std::string(kSmall) + "mode = extremal\n");
    cfg.delta.value = 2.0;
    std::ostringstream log;
    CHECK(run(cfg, dir, log) == kExitConfig);
    CHECK(summary(dir)["exit_code"] == "3");
}

TEST_CASE("run: verify is green and deterministic")
{
    const auto a = scratch("verify_a");
    const auto b = scratch("verify_b");
    RunConfig cfg = parse_config_text(std::string(kSmall) + "mode = verify\n");
    std::ostringstream log;
    REQUIRE(run(cfg, a, log) == kExitOk);
    REQUIRE(run(cfg, b, log) == kExitOk);
    for (const char* name : {"summary.txt", "solution.csv", "profile.dat"}) {
        INFO(name);
        CHECK(slurp(a / name) == slurp(b / name));
    }
    const auto s = summary(a);
    for (const auto& [k, v] : s)
        if (k.rfind("check.", 0) == 0) {
            INFO(k);
            CHECK(v == "pass");
        }
}
