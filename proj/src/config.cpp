#include "hfrac/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "hfrac/errors.hpp"

namespace hfrac {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, const std::string& seps)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (seps.find(c) != std::string::npos) {
            if (!trim(cur).empty())
                out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!trim(cur).empty())
        out.push_back(trim(cur));
    return out;
}

double to_double(const std::string& text, int line)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw ConfigError("expected a number, got '" + text + "'", line);
    }
    if (used != text.size())
        throw ConfigError("expected a number, got '" + text + "'", line);
    return v;
}

std::vector<double> to_list(const std::string& text, int line)
{
    std::vector<double> out;
    for (const auto& item : split(text, " ,\t"))
        out.push_back(to_double(item, line));
    return out;
}

bool to_bool(const std::string& text, int line)
{
    if (text == "true" || text == "yes" || text == "1" || text == "on")
        return true;
    if (text == "false" || text == "no" || text == "0" || text == "off")
        return false;
    throw ConfigError("expected a boolean, got '" + text + "'", line);
}

std::size_t to_count(const std::string& text, int line)
{
    const double v = to_double(text, line);
    if (!(v >= 0.0) || std::floor(v) != v)
        throw ConfigError("expected a nonnegative integer, got '" + text + "'", line);
    return static_cast<std::size_t>(v);
}

RadialProfile to_profile(const std::string& text, int line)
{
    RadialProfile prof;
    for (const auto& knot : split(text, ",")) {
        const auto parts = split(knot, ":");
        if (parts.size() != 2)
            throw ConfigError("radial knot must be 'r:value', got '" + knot + "'", line);
        prof.knots.emplace_back(to_double(parts[0], line), to_double(parts[1], line));
    }
    if (prof.knots.empty())
        throw ConfigError("radial profile needs at least one knot", line);
    for (std::size_t k = 1; k < prof.knots.size(); ++k)
        if (!(prof.knots[k].first > prof.knots[k - 1].first))
            throw ConfigError("radial knots must have increasing radii", line);
    return prof;
}

std::string fmt(double v)
{
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

std::string fmt_list(const Eigen::VectorXd& v)
{
    std::string out;
    for (Eigen::Index k = 0; k < v.size(); ++k)
        out += (k ? " " : "") + fmt(v[k]);
    return out;
}

std::string fmt_field(const FieldSpec& spec)
{
    switch (spec.kind) {
    case FieldSpec::Kind::constant:
        return "constant " + fmt(spec.value);
    case FieldSpec::Kind::file:
        return "file " + spec.file.string();
    case FieldSpec::Kind::radial: {
        std::string out = "radial";
        for (const auto& [r, v] : spec.radial.knots)
            out += " " + fmt(r) + ":" + fmt(v);
        return out;
    }
    }
    return "?";
}

const char* method_name(InnerMethod m)
{
    switch (m) {
    case InnerMethod::automatic:
        return "auto";
    case InnerMethod::newton:
        return "newton";
    case InnerMethod::gradient:
        return "gradient";
    case InnerMethod::metric:
        return "metric";
    }
    return "?";
}

}  // namespace

const char* to_string(Mode mode)
{
    switch (mode) {
    case Mode::solve:
        return "solve";
    case Mode::extremal:
        return "extremal";
    case Mode::verify:
        return "verify";
    case Mode::exponents:
        return "exponents";
    case Mode::mesh_info:
        return "mesh-info";
    }
    return "?";
}

std::optional<Mode> parse_mode(const std::string& text)
{
    for (Mode m : {Mode::solve, Mode::extremal, Mode::verify, Mode::exponents, Mode::mesh_info})
        if (text == to_string(m))
            return m;
    return std::nullopt;
}

double RadialProfile::operator()(double r) const
{
    if (r <= knots.front().first)
        return knots.front().second;
    if (r >= knots.back().first)
        return knots.back().second;
    const auto hi = std::upper_bound(knots.begin(), knots.end(), r,
                                     [](double x, const auto& k) { return x < k.first; });
    const auto lo = hi - 1;
    const double w = (r - lo->first) / (hi->first - lo->first);
    return (1.0 - w) * lo->second + w * hi->second;
}

std::vector<std::pair<std::string, std::string>> RunConfig::echo() const
{
    std::vector<std::pair<std::string, std::string>> out;
    out.emplace_back("mode", to_string(mode));
    out.emplace_back("seed", std::to_string(seed));
    out.emplace_back("model.N", std::to_string(n));
    out.emplace_back("model.Q", std::to_string(2 * n + 2));
    out.emplace_back("model.s", fmt(s));
    out.emplace_back("model.p", fmt(p));
    if (const auto* ball = std::get_if<KoranyiBall>(&domain.shape())) {
        out.emplace_back("domain.shape", "koranyi_ball");
        out.emplace_back("domain.radius", fmt(ball->radius));
        Eigen::VectorXd c(2 * n + 1);
        c << ball->center.x, ball->center.y, ball->center.t;
        out.emplace_back("domain.center", fmt_list(c));
    } else {
        const auto& box = std::get<CoordinateBox>(domain.shape());
        out.emplace_back("domain.shape", "box");
        out.emplace_back("domain.lower", fmt_list(box.lower));
        out.emplace_back("domain.upper", fmt_list(box.upper));
    }
    out.emplace_back("mesh.h", fmt(h));
    out.emplace_back("mesh.collar_width", fmt(collar_width));
    out.emplace_back("mesh.max_nodes", std::to_string(max_nodes));
    out.emplace_back("delta", fmt_field(delta));
    out.emplace_back("delta.epsilon", delta_epsilon ? fmt(*delta_epsilon) : "default");
    out.emplace_back("delta.star", delta_star ? fmt(*delta_star) : "default");
    out.emplace_back("source", fmt_field(source));
    out.emplace_back("source.m", fmt(source_m));
    std::string sched;
    for (double v : solver.n_schedule)
        sched += (sched.empty() ? "" : " ") + fmt(v);
    out.emplace_back("solver.schedule", sched);
    out.emplace_back("solver.limit_level", solver.limit_level ? "true" : "false");
    out.emplace_back("solver.method", method_name(solver.resolved_method(p)));
    out.emplace_back("solver.inner_tol", fmt(solver.resolved_inner_tol(p)));
    out.emplace_back("solver.outer_tol", fmt(solver.outer_tol));
    out.emplace_back("solver.max_inner_iters", std::to_string(solver.max_inner_iters));
    out.emplace_back("solver.armijo_slope", fmt(solver.armijo.slope));
    out.emplace_back("solver.armijo_backtrack", fmt(solver.armijo.backtrack));
    out.emplace_back("solver.armijo_initial_step", fmt(solver.armijo.initial_step));
    out.emplace_back("solver.monotonicity_slack", fmt(solver.monotonicity_slack));
    out.emplace_back("solver.norm_slack", fmt(solver.norm_slack));
    return out;
}

RunConfig parse_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot read config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path.parent_path().empty() ? "." : path.parent_path());
}

RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir)
{
    RunConfig cfg;
    std::map<std::string, std::pair<std::string, int>> entries;
    {
        std::istringstream in(text);
        std::string raw;
        int line = 0;
        while (std::getline(in, raw)) {
            ++line;
            const auto hash = raw.find('#');
            const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
            if (body.empty())
                continue;
            const auto eq = body.find('=');
            if (eq == std::string::npos)
                throw ConfigError("expected 'key = value'", line);
            const std::string key = trim(body.substr(0, eq));
            const std::string value = trim(body.substr(eq + 1));
            if (key.empty() || value.empty())
                throw ConfigError("expected 'key = value'", line);
            if (!entries.emplace(key, std::make_pair(value, line)).second)
                throw ConfigError("duplicate key '" + key + "'", line);
        }
    }

    using Handler = std::function<void(const std::string&, int)>;
    std::optional<std::vector<double>> lower, upper, center;
    std::optional<double> radius;
    std::string shape = "box";
    std::string delta_kind = "constant", source_kind = "constant";
    std::optional<std::string> delta_value, delta_file, delta_radial, source_value, source_file, source_radial;
    std::string method = "auto";

    const std::map<std::string, Handler> handlers = {
        {"mode",
         [&](const std::string& v, int l) {
             const auto m = parse_mode(v);
             if (!m)
                 throw ConfigError("unknown mode '" + v + "'", l);
             cfg.mode = *m;
         }},
        {"seed", [&](const std::string& v, int l) { cfg.seed = to_count(v, l); }},
        {"model.N",
         [&](const std::string& v, int l) {
             const auto n = to_count(v, l);
             if (n < 1)
                 throw ConfigError("N must be a positive integer", l);
             cfg.n = static_cast<int>(n);
         }},
        {"model.s", [&](const std::string& v, int l) { cfg.s = to_double(v, l); }},
        {"model.p", [&](const std::string& v, int l) { cfg.p = to_double(v, l); }},
        {"domain.shape",
         [&](const std::string& v, int l) {
             if (v != "box" && v != "koranyi_ball")
                 throw ConfigError("domain.shape must be 'box' or 'koranyi_ball'", l);
             shape = v;
         }},
        {"domain.lower", [&](const std::string& v, int l) { lower = to_list(v, l); }},
        {"domain.upper", [&](const std::string& v, int l) { upper = to_list(v, l); }},
        {"domain.radius", [&](const std::string& v, int l) { radius = to_double(v, l); }},
        {"domain.center", [&](const std::string& v, int l) { center = to_list(v, l); }},
        {"mesh.h", [&](const std::string& v, int l) { cfg.h = to_double(v, l); }},
        {"mesh.collar_width", [&](const std::string& v, int l) { cfg.collar_width = to_double(v, l); }},
        {"mesh.max_nodes", [&](const std::string& v, int l) { cfg.max_nodes = to_count(v, l); }},
        {"delta.kind", [&](const std::string& v, int) { delta_kind = v; }},
        {"delta.value", [&](const std::string& v, int) { delta_value = v; }},
        {"delta.file", [&](const std::string& v, int) { delta_file = v; }},
        {"delta.radial", [&](const std::string& v, int) { delta_radial = v; }},
        {"delta.epsilon", [&](const std::string& v, int l) { cfg.delta_epsilon = to_double(v, l); }},
        {"delta.star", [&](const std::string& v, int l) { cfg.delta_star = to_double(v, l); }},
        {"source.kind", [&](const std::string& v, int) { source_kind = v; }},
        {"source.value", [&](const std::string& v, int) { source_value = v; }},
        {"source.file", [&](const std::string& v, int) { source_file = v; }},
        {"source.radial", [&](const std::string& v, int) { source_radial = v; }},
        {"source.m",
         [&](const std::string& v, int l) { cfg.source_m = v == "inf" ? INFINITY : to_double(v, l); }},
        {"solver.schedule", [&](const std::string& v, int l) { cfg.solver.n_schedule = to_list(v, l); }},
        {"solver.limit_level", [&](const std::string& v, int l) { cfg.solver.limit_level = to_bool(v, l); }},
        {"solver.inner_tol", [&](const std::string& v, int l) { cfg.solver.inner_tol = to_double(v, l); }},
        {"solver.outer_tol",
         [&](const std::string& v, int l) { cfg.solver.outer_tol = v == "inf" ? INFINITY : to_double(v, l); }},
        {"solver.max_inner_iters",
         [&](const std::string& v, int l) { cfg.solver.max_inner_iters = static_cast<int>(to_count(v, l)); }},
        {"solver.method", [&](const std::string& v, int) { method = v; }},
        {"solver.armijo_slope", [&](const std::string& v, int l) { cfg.solver.armijo.slope = to_double(v, l); }},
        {"solver.armijo_backtrack",
         [&](const std::string& v, int l) { cfg.solver.armijo.backtrack = to_double(v, l); }},
        {"solver.armijo_initial_step",
         [&](const std::string& v, int l) { cfg.solver.armijo.initial_step = to_double(v, l); }},
        {"solver.monotonicity_slack",
         [&](const std::string& v, int l) { cfg.solver.monotonicity_slack = to_double(v, l); }},
        {"solver.norm_slack", [&](const std::string& v, int l) { cfg.solver.norm_slack = to_double(v, l); }},
        {"output.solution", [&](const std::string& v, int l) { cfg.write_solution = to_bool(v, l); }},
        {"output.profile", [&](const std::string& v, int l) { cfg.write_profile = to_bool(v, l); }},
        {"verify.group_samples", [&](const std::string& v, int l) { cfg.verify.group_samples = to_count(v, l); }},
        {"verify.lemma_samples", [&](const std::string& v, int l) { cfg.verify.lemma_samples = to_count(v, l); }},
        {"verify.trial_fields", [&](const std::string& v, int l) { cfg.verify.trial_fields = to_count(v, l); }},
        {"verify.comparison_pairs",
         [&](const std::string& v, int l) { cfg.verify.comparison_pairs = to_count(v, l); }},
        {"verify.prop1_fields", [&](const std::string& v, int l) { cfg.verify.prop1_fields = to_count(v, l); }},
        {"verify.gradient_fields",
         [&](const std::string& v, int l) { cfg.verify.gradient_fields = to_count(v, l); }},
        {"analysis.refine_h", [&](const std::string& v, int l) { cfg.refine_h = to_list(v, l); }},
        {"analysis.gamma_convention",
         [&](const std::string& v, int l) {
             if (v == "Q")
                 cfg.gamma_convention = DimensionConvention::homogeneous_q;
             else if (v == "N")
                 cfg.gamma_convention = DimensionConvention::printed_n;
             else
                 throw ConfigError("analysis.gamma_convention must be 'Q' or 'N'", l);
         }},
    };

    for (const auto& [key, entry] : entries) {
        const auto it = handlers.find(key);
        if (it == handlers.end())
            throw ConfigError("unknown key '" + key + "'", entry.second);
        it->second(entry.first, entry.second);
    }
    auto line_of = [&](const std::string& key) {
        const auto it = entries.find(key);
        return it == entries.end() ? 0 : it->second.second;
    };

    // Model constraints.
    try {
        (void)cfg.params();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }

    // Domain.
    const int dim = 2 * cfg.n + 1;
    auto sized = [&](const std::optional<std::vector<double>>& v, double fill, const char* key) {
        if (!v)
            return Eigen::VectorXd::Constant(dim, fill).eval();
        if (static_cast<int>(v->size()) != dim)
            throw ConfigError(std::string(key) + " needs 2N+1 = " + std::to_string(dim) + " values", line_of(key));
        return Eigen::Map<const Eigen::VectorXd>(v->data(), dim).eval();
    };
    try {
        if (shape == "box") {
            cfg.domain = DomainSpec::box(sized(lower, -1.0, "domain.lower"), sized(upper, 1.0, "domain.upper"));
        } else {
            const Eigen::VectorXd c = sized(center, 0.0, "domain.center");
            cfg.domain =
                DomainSpec::ball(radius.value_or(1.0), GroupPoint(c.head(cfg.n), c.segment(cfg.n, cfg.n), c[2 * cfg.n]));
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }

    if (!(cfg.h > 0.0))
        throw ConfigError("mesh.h must be positive", line_of("mesh.h"));
    if (!(cfg.collar_width > 0.0))
        throw ConfigError("mesh.collar_width must be positive", line_of("mesh.collar_width"));
    for (double h : cfg.refine_h)
        if (!(h > 0.0))
            throw ConfigError("analysis.refine_h entries must be positive", line_of("analysis.refine_h"));

    // Fields.
    auto field_spec = [&](const std::string& prefix, const std::string& kind, const std::optional<std::string>& value,
                          const std::optional<std::string>& file, const std::optional<std::string>& radial) {
        FieldSpec spec;
        if (kind == "constant") {
            spec.kind = FieldSpec::Kind::constant;
            if (value)
                spec.value = to_double(*value, line_of(prefix + ".value"));
            else
                spec.value = prefix == "delta" ? 0.5 : 1.0;
        } else if (kind == "radial") {
            spec.kind = FieldSpec::Kind::radial;
            if (!radial)
                throw ConfigError(prefix + ".kind = radial needs " + prefix + ".radial", line_of(prefix + ".kind"));
            spec.radial = to_profile(*radial, line_of(prefix + ".radial"));
        } else if (kind == "file" || kind == "table" || kind == "grid") {
            spec.kind = FieldSpec::Kind::file;
            if (!file)
                throw ConfigError(prefix + ".kind = " + kind + " needs " + prefix + ".file", line_of(prefix + ".kind"));
            spec.file = std::filesystem::path(*file).is_absolute() ? std::filesystem::path(*file) : base_dir / *file;
            if (!std::filesystem::exists(spec.file))
                throw ConfigError("cannot find " + spec.file.string(), line_of(prefix + ".file"));
        } else {
            throw ConfigError(prefix + ".kind must be constant, radial or file", line_of(prefix + ".kind"));
        }
        return spec;
    };
    cfg.delta = field_spec("delta", delta_kind, delta_value, delta_file, delta_radial);
    cfg.source = field_spec("source", source_kind, source_value, source_file, source_radial);

    if (cfg.delta.kind == FieldSpec::Kind::constant && !(cfg.delta.value > 0.0))
        throw ConfigError("delta must be positive (delta > 0)", line_of("delta.value"));
    if (cfg.delta.kind == FieldSpec::Kind::radial)
        for (const auto& k : cfg.delta.radial.knots)
            if (!(k.second > 0.0))
                throw ConfigError("delta must be positive (delta > 0)", line_of("delta.radial"));
    if (cfg.source.kind == FieldSpec::Kind::constant && !(cfg.source.value > 0.0))
        throw ConfigError(cfg.source.value == 0.0 ? "f must not vanish identically" : "f must be nonnegative (f >= 0)",
                          line_of("source.value"));
    if (cfg.source.kind == FieldSpec::Kind::radial) {
        bool nonzero = false;
        for (const auto& k : cfg.source.radial.knots) {
            if (!(k.second >= 0.0))
                throw ConfigError("f must be nonnegative (f >= 0)", line_of("source.radial"));
            nonzero = nonzero || k.second > 0.0;
        }
        if (!nonzero)
            throw ConfigError("f must not vanish identically", line_of("source.radial"));
    }
    if (!(cfg.source_m >= 1.0))
        throw ConfigError("source.m must satisfy m >= 1", line_of("source.m"));
    if (cfg.delta_epsilon && !(*cfg.delta_epsilon > 0.0))
        throw ConfigError("delta.epsilon must be positive", line_of("delta.epsilon"));
    if (cfg.delta_star && !(*cfg.delta_star >= 1.0))
        throw ConfigError("delta.star must satisfy delta* >= 1", line_of("delta.star"));

    // Solver.
    if (method == "auto")
        cfg.solver.method = InnerMethod::automatic;
    else if (method == "newton")
        cfg.solver.method = InnerMethod::newton;
    else if (method == "gradient")
        cfg.solver.method = InnerMethod::gradient;
    else if (method == "metric")
        cfg.solver.method = InnerMethod::metric;
    else
        throw ConfigError("solver.method must be auto, newton, gradient or metric", line_of("solver.method"));
    try {
        cfg.solver.validate();
        (void)cfg.solver.resolved_method(cfg.p);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

Field read_node_file(const std::filesystem::path& path, const Mesh& mesh)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot read node file " + path.string());
    const int n = mesh.group_dim();
    std::string header;
    if (!std::getline(in, header))
        throw ConfigError("node file " + path.string() + " is empty");
    const auto columns = split(header, ",");
    auto column = [&](const std::string& name) {
        const auto it = std::find(columns.begin(), columns.end(), name);
        if (it == columns.end())
            throw ConfigError("node file " + path.string() + " lacks column '" + name + "'", 1);
        return static_cast<std::size_t>(it - columns.begin());
    };
    std::vector<std::size_t> xcol, ycol;
    for (int k = 0; k < n; ++k) {
        const std::string suffix = n == 1 ? "" : std::to_string(k + 1);
        xcol.push_back(column("x" + suffix));
        ycol.push_back(column("y" + suffix));
    }
    const std::size_t tcol = column("t");
    const std::size_t vcol = columns.size() - 1;

    Field values = Field::Zero(static_cast<Eigen::Index>(mesh.size()));
    std::vector<bool> seen(mesh.size(), false);
    std::string raw;
    int line = 1;
    const double tol = 1e-6 * mesh.h();
    while (std::getline(in, raw)) {
        ++line;
        if (trim(raw).empty())
            continue;
        const auto cells = split(raw, ",");
        if (cells.size() != columns.size())
            throw ConfigError("node file row has " + std::to_string(cells.size()) + " cells, expected " +
                                  std::to_string(columns.size()),
                              line);
        GroupPoint p = GroupPoint::identity(static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k) {
            p.x[k] = to_double(cells[xcol[static_cast<std::size_t>(k)]], line);
            p.y[k] = to_double(cells[ycol[static_cast<std::size_t>(k)]], line);
        }
        p.t = to_double(cells[tcol], line);
        const auto hit = locate_node(mesh, p, tol);
        if (!hit)
            throw ConfigError("node file row does not match any mesh node", line);
        seen[*hit] = true;
        if (mesh.is_interior(*hit))
            values[static_cast<Eigen::Index>(*hit)] = to_double(cells[vcol], line);
    }
    for (auto i : mesh.interior())
        if (!seen[i])
            throw ConfigError("node file " + path.string() + " misses interior node " + std::to_string(i));
    return values;
}

Field materialize(const FieldSpec& spec, const Mesh& mesh)
{
    Field values = Field::Zero(static_cast<Eigen::Index>(mesh.size()));
    switch (spec.kind) {
    case FieldSpec::Kind::constant:
        for (auto i : mesh.interior())
            values[static_cast<Eigen::Index>(i)] = spec.value;
        break;
    case FieldSpec::Kind::radial: {
        const GroupPoint c = mesh.domain() ? mesh.domain()->center()
                                           : GroupPoint::identity(static_cast<std::size_t>(mesh.group_dim()));
        for (auto i : mesh.interior())
            values[static_cast<Eigen::Index>(i)] = spec.radial(distance(mesh.node(i), c));
        break;
    }
    case FieldSpec::Kind::file:
        values = read_node_file(spec.file, mesh);
        break;
    }
    return values;
}

}  // namespace hfrac
